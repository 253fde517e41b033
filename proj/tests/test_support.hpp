// Seeded case generator shared by the property tests. The seed comes from WORKBENCH_TEST_SEED when set.
#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

namespace wbtest {

inline std::uint64_t test_seed() {
  if (const char* s = std::getenv("WORKBENCH_TEST_SEED")) return std::strtoull(s, nullptr, 10);
  return 20261016;
}

class Gen {
 public:
  explicit Gen(std::uint64_t salt) : rng_(test_seed() ^ (salt * 0x9e3779b97f4a7c15ULL)) {}
  long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

 private:
  std::mt19937_64 rng_;
};

inline std::string seed_note() { return "seed " + std::to_string(test_seed()); }

}  // namespace wbtest
