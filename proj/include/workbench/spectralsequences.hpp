// Multigraded spectral-sequence replay over a presented E1 ring: generator-level differential rules
// extended by the Leibniz rule, page turning by integral homology, towers, hidden extensions and
// comparison of the associated graded with a target ring.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "workbench/gradedpresent.hpp"

namespace wb {

class InconsistentRule : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class TargetNotOnPage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// d_r has degree base + r * step.
struct DifferentialGrading {
  MultiDegree base;
  MultiDegree step;
  int filtration_component = -1;  // ignored when matching hidden extensions
  MultiDegree shift(int r) const;
};

struct DifferentialRule {
  int page = 1;
  std::string source;  // E1 element
  std::string target;
  std::string citation;
};

std::vector<DifferentialRule> rules_from_json(const std::string& text);
std::string rules_to_json(const std::vector<DifferentialRule>& rules);

struct PageSpec {
  RingPresentation ring;  // E1
  int page = 1;           // first page
  DifferentialGrading grading;
};

struct SSWindow {
  MultiDegree lo, hi;
  int max_page = 8;
};

struct HiddenExtension {
  std::string text;
  Poly lhs, rhs;
  MultiDegree degree;
};

struct TowerDescriptor {
  MultiDegree key;  // degree of the bottom cell of the orbit
  std::size_t free = 0;
  std::vector<int> truncated;  // lengths, sorted
};

struct SSState;

struct RunReport {
  std::string name;
  std::size_t arity = 0;
  std::vector<std::string> column_names;
  std::vector<int> pages;                                       // page numbers in order
  std::vector<std::map<MultiDegree, GroupDescriptor>> groups;  // groups[i] is page pages[i]
  std::map<MultiDegree, GroupDescriptor> einf;                  // last page, with labels
  std::vector<std::string> notes;                               // TargetNotOnPage and window truncations
  std::vector<HiddenExtension> extensions;
  std::vector<TowerDescriptor> towers;
  std::shared_ptr<const SSState> state;

  std::string csv() const;   // E_infinity table
  std::string json() const;  // all pages
};

RunReport run(const PageSpec& spec, const std::vector<DifferentialRule>& rules, const SSWindow& window,
              const std::string& name = "ss");

// Rules given at a = 1 are lifted to d_k(x) = a^k y; multiples by powers of a follow by the Leibniz rule.
std::vector<DifferentialRule> lift_rules(const std::vector<DifferentialRule>& stable_rules, const std::string& a);
RunReport uaahss_lift(const PageSpec& unstable, const std::vector<DifferentialRule>& stable_rules,
                      const std::string& a, const SSWindow& window, const std::string& name = "uaahss");

// "lhs = rhs" in E1 names; both sides must agree in every grading component except the filtration.
RunReport register_hidden_extension(RunReport report, const PageSpec& spec, const std::string& relation);

// Persistence of multiplication by g on the final page, over F_p. Orbits are cut at `trusted_hi`
// (componentwise, empty for the whole window) so that classes whose differentials leave the window
// are not mistaken for infinite towers.
std::vector<TowerDescriptor> towers(const RunReport& report, const std::string& g, unsigned long p,
                                    const MultiDegree& trusted_hi = {});

// Group obtained from the tower structure: free towers give Z, a bar of length k gives Z/p^k.
GroupDescriptor tower_group(const TowerDescriptor& t, unsigned long p);

struct DiffLine {
  MultiDegree degree;
  GroupDescriptor got, want;
};

// Projects E_infinity onto the kept components (summing the rest) and compares with the target
// at every projected degree inside [lo, hi].
std::vector<DiffLine> compare_assoc_graded(const RunReport& report, const std::vector<std::size_t>& keep,
                                           const std::function<GroupDescriptor(const MultiDegree&)>& target,
                                           const MultiDegree& lo, const MultiDegree& hi);
std::vector<DiffLine> compare_assoc_graded(const RunReport& report, const RingPresentation& target,
                                           const std::vector<std::size_t>& keep, const MultiDegree& lo,
                                           const MultiDegree& hi);
std::string diff_string(const std::vector<DiffLine>& d);

// Copy of the report whose E_infinity table is the given page (no labels).
RunReport page_report(const RunReport& report, int page);

// Drops cells outside [lo, hi] from every page and from E_infinity.
RunReport restrict_window(const RunReport& report, const MultiDegree& lo, const MultiDegree& hi);

// Setting a = 1: the stable group at (.., u) equals the unstable group at (.., m_top, u) once every
// a-tower born at u has either died or persisted, i.e. for u <= m_top - margin.
std::vector<DiffLine> collapse_check(const RunReport& unstable, const RunReport& stable, std::size_t m_component,
                                     int m_top, int margin);

// Sum of E_infinity over the components not in `keep`.
GroupDescriptor projected_group(const RunReport& report, const std::vector<std::size_t>& keep, const MultiDegree& d);

}  // namespace wb
