// Batch driver: expand, verify, basis, ext, ss, rank, chart.
// Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 input or configuration error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "workbench/charts.hpp"
#include "workbench/jacobiforms.hpp"
#include "workbench/parallel.hpp"
#include "workbench/scenarios.hpp"

namespace {

using nlohmann::ordered_json;
using namespace wb;

constexpr std::int64_t kMaxQprec24 = 24 * 64;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::int64_t parse_qprec(const std::string& text) {
  mpq_class q;
  try {
    q = mpq_class(text);
    q.canonicalize();
  } catch (const std::invalid_argument&) {
    throw InputError("--qprec: not a rational number: " + text);
  }
  const mpq_class q24 = q * 24;
  if (q24.get_den() != 1) throw InputError("--qprec must be a multiple of 1/24");
  if (q24 < 0 || q24 > kMaxQprec24) throw InputError("--qprec must lie in [0, 64]");
  return q24.get_num().get_si();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw InputError("cannot write " + out);
  f << text;
}

// Meta header for the CLI forms; eta has dimension 1 (weight 1/2).
FormMeta meta_of(const std::string& name, std::int64_t p) {
  if (name == "eta") return {1, 0};
  if (name == "delta") return form_delta(0).meta;
  if (name == "c4") return form_c4(0).meta;
  if (name == "c6") return form_c6(0).meta;
  if (name == "a") return jacobi_a(std::min<std::int64_t>(p, 24)).meta;
  if (name == "b") return jacobi_b(std::min<std::int64_t>(p, 24)).meta;
  if (name == "c") return jacobi_c(std::min<std::int64_t>(p, 24)).meta;
  throw InputError("unknown form '" + name + "' (expected eta, delta, c4, c6, a, b, c)");
}

NamedForm base_form(const std::string& name, std::int64_t p) {
  if (name == "a") return jacobi_a(p);
  if (name == "b") return jacobi_b(p);
  if (name == "c") return jacobi_c(p);
  if (name == "c4") return form_c4(p);
  if (name == "c6") return form_c6(p);
  if (name == "delta") return form_delta(p);
  throw InputError("unknown form '" + name + "' (expected a, b, c, c4, c6, delta)");
}

// Products such as "a^2" or "a*c".
NamedForm form_expression(const std::string& text, std::int64_t p) {
  std::optional<NamedForm> acc;
  std::stringstream ss(text);
  std::string factor;
  while (std::getline(ss, factor, '*')) {
    unsigned k = 1;
    std::string name = factor;
    if (auto caret = factor.find('^'); caret != std::string::npos) {
      name = factor.substr(0, caret);
      try {
        k = static_cast<unsigned>(std::stoul(factor.substr(caret + 1)));
      } catch (const std::exception&) {
        throw InputError("bad exponent in '" + factor + "'");
      }
      if (k == 0) throw InputError("zero exponent in '" + factor + "'");
    }
    NamedForm f = power(base_form(name, p), k);
    acc = acc ? product(*acc, f) : f;
  }
  if (!acc) throw InputError("empty form expression");
  acc->name = text;
  return *acc;
}

ordered_json group_json(const MultiDegree& d, const GroupDescriptor& g) {
  std::vector<std::string> tor;
  for (const auto& t : g.torsion) tor.push_back(t.get_str());
  return {{"degree", d}, {"rank", g.free_rank}, {"torsion", tor}, {"labels", g.labels}};
}

void check_format(const std::string& fmt, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (fmt == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw InputError("unsupported --format '" + fmt + "' (expected " + list + ")");
}

MultiDegree degree_arg(const std::vector<int>& v, std::size_t arity, const char* flag) {
  if (v.size() == arity) return v;
  if (v.size() == 1) {
    MultiDegree d(arity, 0);
    d[0] = v[0];
    return d;
  }
  throw InputError(std::string(flag) + " needs " + std::to_string(arity) + " components");
}

// ---------------------------------------------------------------- commands

int cmd_expand(const std::string& name, const std::string& qprec, const std::string& fmt, const std::string& out) {
  check_format(fmt, {"json", "txt"});
  const std::int64_t p = parse_qprec(qprec);
  const FormMeta meta = meta_of(name, p);
  QZSeries s;
  try {
    s = expand_named(name, p);
  } catch (const EmptyWindow&) {
    s = QZSeries(p);
  }
  if (fmt == "txt") {
    emit(s.to_string() + "\n", out);
    return 0;
  }
  ordered_json j;
  j["form"] = name;
  j["meta"] = {{"dimension", meta.dimension}, {"doubled_index", meta.doubled_index}};
  j["series"] = ordered_json::parse(s.to_json());
  emit(j.dump() + "\n", out);
  return 0;
}

int cmd_verify_cubic(const std::string& qprec) {
  const std::int64_t p = parse_qprec(qprec);
  const ResidualReport r = verify_cubic_relation(p);
  std::cout << "cubic relation 432c^2 - b^3 + 3c4a^4b - 2c6a^6 below q^" << reduced(p, 24).get_str() << ": ";
  if (r.zero) {
    std::cout << "zero\n";
    return 0;
  }
  std::cout << "nonzero, leading term " << r.leading << "\n";
  return 1;
}

int cmd_verify_map(const std::string& ring) {
  std::vector<std::string> keys;
  try {
    keys = discriminant_map_keys();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("discriminant_maps.json: ") + e.what());
  }
  if (std::find(keys.begin(), keys.end(), ring) == keys.end()) {
    std::string list;
    for (const auto& k : keys) list += (list.empty() ? "" : ", ") + k;
    throw InputError("unknown ring '" + ring + "' (expected one of " + list + ")");
  }
  const MapCheck m = verify_discriminant_map(ring);
  std::cout << "map mf -> " << m.ring << ": ";
  if (!m.error.empty()) {
    std::cout << "error: " << m.error << "\n";
    return 1;
  }
  if (m.ok()) {
    std::cout << "every relation maps to zero\n";
    return 0;
  }
  std::cout << m.report.residuals.size() << " relation(s) fail\n";
  for (const auto& r : m.report.residuals) std::cout << "  " << r << "\n";
  return 1;
}

int cmd_verify_elliptic(const std::string& form, int lambda, const std::string& qprec) {
  const NamedForm f = form_expression(form, parse_qprec(qprec));
  const SymmetryReport r = elliptic_symmetry_check(f, lambda);
  std::cout << "elliptic symmetry of " << form << " at lambda " << lambda << ": " << r.checked << " coefficients checked, "
            << r.violations.size() << " violations\n";
  for (std::size_t i = 0; i < r.violations.size() && i < 10; ++i) std::cout << "  " << r.violations[i] << "\n";
  return r.ok() ? 0 : 1;
}

int cmd_verify_validate(const std::string& file, int bound) {
  const HopfAlgebroid h = load_algebroid(file);
  const ValidationReport r = validate(h, bound);
  std::cout << "validate " << h.name << " through degree " << bound << ": " << r.checks << " checks, "
            << r.failures.size() << " failures\n";
  for (std::size_t i = 0; i < r.failures.size() && i < 10; ++i) std::cout << "  " << r.failures[i] << "\n";
  return r.ok() ? 0 : 1;
}

int cmd_basis(int dimension, int doubled_index, const std::string& qprec, const std::string& fmt,
              const std::string& out) {
  check_format(fmt, {"txt", "json"});
  const BasisResult b = jf_basis_series(dimension, doubled_index, parse_qprec(qprec));
  const bool ok = b.rank == b.forms.size();
  if (fmt == "json") {
    ordered_json j;
    j["dimension"] = dimension;
    j["doubled_index"] = doubled_index;
    j["monomials"] = ordered_json::array();
    for (const auto& f : b.forms) j["monomials"].push_back(f.name);
    j["rank"] = b.rank;
    emit(j.dump(2) + "\n", out);
  } else {
    std::ostringstream os;
    os << "jf(" << dimension << ", " << doubled_index << "/2): " << b.forms.size() << " monomials, rank " << b.rank
       << "\n";
    for (const auto& f : b.forms) os << "  " << f.name << "\n";
    emit(os.str(), out);
  }
  return ok ? 0 : 1;
}

int cmd_ext(const std::string& file, int smax, const std::vector<int>& tmax, const std::string& fmt,
            const std::string& out) {
  check_format(fmt, {"csv", "json", "svg", "txt"});
  const HopfAlgebroid h = load_algebroid(file);
  CobarWindow w;
  w.s_max = smax;
  w.hi = tmax.size() == 1 ? MultiDegree(h.arity(), tmax[0]) : tmax;
  if (w.hi.size() != h.arity()) throw InputError("--tmax needs 1 or " + std::to_string(h.arity()) + " components");
  const ExtTable t = cobar_ext(h, w);
  if (fmt == "csv") {
    emit(t.csv(), out);
  } else if (fmt == "json") {
    ordered_json j;
    j["name"] = t.name;
    j["cells"] = ordered_json::array();
    for (const auto& c : t.cells) {
      ordered_json cell = group_json(c.t, c.group);
      cell["s"] = c.s;
      j["cells"].push_back(cell);
    }
    emit(j.dump(2) + "\n", out);
  } else {
    const ChartData c = chart_from_ext(t);
    emit(fmt == "svg" ? render_svg(c) : render_text(c), out);
  }
  return 0;
}

// Ranks never increase from one page to the next.
std::vector<std::string> monotonicity_failures(const RunReport& rep) {
  std::vector<std::string> bad;
  for (std::size_t i = 1; i < rep.groups.size(); ++i)
    for (const auto& [d, g] : rep.groups[i]) {
      auto it = rep.groups[i - 1].find(d);
      const std::size_t before = it == rep.groups[i - 1].end() ? 0 : it->second.free_rank;
      if (g.free_rank > before)
        bad.push_back("E" + std::to_string(rep.pages[i]) + degree_str(d) + " rank " + std::to_string(g.free_rank) +
                      " exceeds " + std::to_string(before));
    }
  return bad;
}

int cmd_ss(const std::string& config, const std::string& window, const std::string& fmt, bool check,
           const std::string& out) {
  check_format(fmt, {"csv", "json", "svg", "txt"});
  const SSScenario s = load_ss_scenario(config);
  const RunReport rep = run_scenario(s, window);
  if (fmt == "csv")
    emit(rep.csv(), out);
  else if (fmt == "json")
    emit(rep.json(), out);
  else
    emit(fmt == "svg" ? render_svg(chart_from_report(rep)) : render_text(chart_from_report(rep)), out);
  for (const auto& n : rep.notes) std::cerr << "note: " << n << "\n";
  if (!check) return 0;
  const auto bad = monotonicity_failures(rep);
  for (const auto& b : bad) std::cerr << "check: " << b << "\n";
  return bad.empty() ? 0 : 1;
}

int cmd_rank(const std::string& file, const std::vector<int>& lo, const std::vector<int>& hi,
             const std::string& invert, const std::string& fmt, const std::string& out) {
  check_format(fmt, {"csv", "json"});
  const RingPresentation r = load_ring(file);
  const MultiDegree l = degree_arg(lo, r.arity(), "--lo"), h = degree_arg(hi, r.arity(), "--hi");
  std::vector<HilbertRow> rows;
  if (invert.empty()) {
    rows = hilbert_table(r, l, h);
  } else {
    PieceEngine eng(r);
    const Poly g = r.parse(invert);
    const auto degs = degrees_in_box(r, l, h);
    rows.resize(degs.size());
    parallel_for(degs.size(), [&](std::size_t i) { rows[i] = {degs[i], localize_rank(eng, g, degs[i]).stable}; });
  }
  if (fmt == "csv") {
    emit(hilbert_csv(rows, r.arity()), out);
  } else {
    ordered_json j;
    j["ring"] = r.name;
    j["columns"] = degree_column_names(r.arity());
    if (!invert.empty()) j["inverted"] = invert;
    j["pieces"] = ordered_json::array();
    for (const auto& row : rows) j["pieces"].push_back(group_json(row.degree, row.group));
    emit(j.dump(2) + "\n", out);
  }
  return 0;
}

int cmd_chart(const std::string& in, const std::string& fmt, const std::string& out) {
  check_format(fmt, {"svg", "txt"});
  const ChartData c = chart_from_report_json(read_text(in));
  emit(fmt == "svg" ? render_svg(c) : render_text(c), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact workbench for Jacobi forms, Hopf algebroid Ext and spectral-sequence replay"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (overrides WORKBENCH_THREADS)");

  std::string qprec = "6", fmt, out, name, file, window, ring, form, invert;
  int lambda = 1, bound = 12, smax = 2, dimension = 0, doubled_index = 0;
  std::vector<int> tmax{12}, lo{0}, hi{12};
  bool check = false;

  auto* expand = app.add_subcommand("expand", "q,zeta-expansion of a named form as JSON");
  expand->add_option("name", name, "eta, delta, c4, c6, a, b or c")->required();
  expand->add_option("--qprec", qprec, "q-precision, a multiple of 1/24");
  expand->add_option("--format", fmt, "json or txt")->default_str("json");
  expand->add_option("--out", out, "output file");

  auto* verify = app.add_subcommand("verify", "run a named check");
  verify->require_subcommand(1);
  auto* v_cubic = verify->add_subcommand("cubic", "432c^2 = b^3 - 3c4a^4b + 2c6a^6");
  v_cubic->add_option("--qprec", qprec);
  auto* v_map = verify->add_subcommand("discriminant-map", "mf maps into a presentation with Delta to its discriminant");
  v_map->add_option("--ring", ring, "key in discriminant_maps.json")->required();
  auto* v_ell = verify->add_subcommand("elliptic", "elliptic transformation law on the coefficients");
  v_ell->add_option("--form", form, "a, b, c, products such as a^2 or a*c")->required();
  v_ell->add_option("--lambda", lambda);
  v_ell->add_option("--qprec", qprec);
  auto* v_val = verify->add_subcommand("validate", "Hopf algebroid axioms through a degree bound");
  v_val->add_option("--algebroid", file)->required();
  v_val->add_option("--bound", bound);

  auto* basis = app.add_subcommand("basis", "monomial basis of weak Jacobi forms of a bidegree and its rank");
  basis->add_option("--dimension", dimension)->required();
  basis->add_option("--doubled-index", doubled_index, "2m")->required();
  basis->add_option("--qprec", qprec);
  basis->add_option("--format", fmt)->default_str("txt");
  basis->add_option("--out", out);

  auto* ext = app.add_subcommand("ext", "cobar Ext table");
  ext->add_option("--algebroid", file)->required();
  ext->add_option("--smax", smax);
  ext->add_option("--tmax", tmax, "internal degree bound, one value or one per component")->delimiter(',');
  ext->add_option("--format", fmt, "csv, json, svg or txt")->default_str("csv");
  ext->add_option("--out", out);

  auto* ss = app.add_subcommand("ss", "spectral-sequence replay of a scenario");
  ss->add_option("--config", file)->required();
  ss->add_option("--window", window, "window key from the scenario");
  ss->add_option("--format", fmt, "csv, json, svg or txt")->default_str("csv");
  ss->add_flag("--check", check, "fail when a rank grows from one page to the next");
  ss->add_option("--out", out);

  auto* rank = app.add_subcommand("rank", "degreewise groups of a presentation");
  rank->add_option("--ring", file)->required();
  rank->add_option("--lo", lo)->delimiter(',');
  rank->add_option("--hi", hi)->delimiter(',');
  rank->add_option("--invert", invert, "report the stable group along multiplication by this element");
  rank->add_option("--format", fmt, "csv or json")->default_str("csv");
  rank->add_option("--out", out);

  auto* chart = app.add_subcommand("chart", "chart of a saved ss JSON run");
  chart->add_option("--in", file)->required();
  chart->add_option("--format", fmt, "svg or txt")->default_str("svg");
  chart->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (threads > 0) set_thread_override(threads);
  auto fmt_or = [&](const char* d) { return fmt.empty() ? std::string(d) : fmt; };

  try {
    if (*expand) return cmd_expand(name, qprec, fmt_or("json"), out);
    if (*v_cubic) return cmd_verify_cubic(qprec);
    if (*v_map) return cmd_verify_map(ring);
    if (*v_ell) return cmd_verify_elliptic(form, lambda, qprec);
    if (*v_val) return cmd_verify_validate(file, bound);
    if (*basis) return cmd_basis(dimension, doubled_index, qprec, fmt_or("txt"), out);
    if (*ext) return cmd_ext(file, smax, tmax, fmt_or("csv"), out);
    if (*ss) return cmd_ss(file, window, fmt_or("csv"), check, out);
    if (*rank) return cmd_rank(file, lo, hi, invert, fmt_or("csv"), out);
    if (*chart) return cmd_chart(file, fmt_or("svg"), out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
