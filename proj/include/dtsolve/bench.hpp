#ifndef DTSOLVE_BENCH_HPP
#define DTSOLVE_BENCH_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dtsolve/model.hpp"
#include "dtsolve/solvers.hpp"

namespace dtsolve {

// SplitMix64 (Steele, Lea & Flood). Fixed here so generated benchmark
// problems are reproducible across platforms and languages.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

struct BenchConfig {
  int chance_vars = 1;   // m >= 1
  int decision_vars = 0;  // n >= 0
  // Chance variable indices observed by each decision (size decision_vars).
  std::vector<std::vector<int>> observed;
  std::uint64_t seed = 1;
  int trials = 1;
};

// Every decision observes the causally last chance variable, mirroring the
// bundled medical-diagnosis problem's information pattern.
std::vector<std::vector<int>> observe_last_pattern(int m, int n);

// Deterministic in cfg.seed: binary chance variables in a random causal
// chain with probabilities uniform in [0.05, 0.95], binary decisions with the
// configured observation pattern, utilities uniform in [0, 10] over the full
// variable scope.
ValidatedProblem generate_problem(const BenchConfig& cfg);

struct ScalingRow {
  Method method = Method::Matrix;
  int m = 0;
  int n = 0;
  int trial = 0;
  std::int64_t measured_total = 0;
  double formula_total = 0.0;
  double ratio = 0.0;
  // The closed forms are approximations; measured totals are expected to
  // stay within a factor of two of them.
  bool within_band = false;
};

// Closed-form approximate operation totals for a symmetric binary problem
// with m chance variables, n decision variables and k information sets.
double formula_total(Method method, int m, int n, int k);

// Runs every (cell, trial, method), returning measured totals against the
// closed-form approximations. Rows ordered by (method, m, n, trial) following
// the order of `methods`.
std::vector<ScalingRow> verify_scaling(std::span<const BenchConfig> cells,
                                       std::span<const Method> methods);

}  // namespace dtsolve

#endif  // DTSOLVE_BENCH_HPP
