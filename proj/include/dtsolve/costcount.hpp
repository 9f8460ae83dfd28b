#ifndef DTSOLVE_COSTCOUNT_HPP
#define DTSOLVE_COSTCOUNT_HPP

#include <cstdint>

namespace dtsolve {

// Every counted arithmetic step belongs to one of two phases. Work done while
// a representation is constructed (joints, conditionals, path probabilities of
// a scenario tree) is Representation; work done by a solver is Solution.
enum class Phase { Representation, Solution };

enum class OpKind { Add, Mul, Div, Cmp };

struct PhaseCounts {
  std::int64_t add = 0;
  std::int64_t mul = 0;
  std::int64_t div = 0;
  std::int64_t cmp = 0;

  std::int64_t total() const { return add + mul + div + cmp; }

  friend bool operator==(const PhaseCounts&, const PhaseCounts&) = default;
};

struct CostReport {
  PhaseCounts representation;
  PhaseCounts solution;

  std::int64_t total() const { return representation.total() + solution.total(); }

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

// Accounting context. One instance per solver invocation; never shared
// between concurrent runs. Arithmetic is recorded explicitly at the site
// where it happens so that phase attribution is exact and the numeric code
// path is unaffected.
class OpCounter {
 public:
  void record(OpKind kind, Phase phase, std::int64_t count = 1) {
    PhaseCounts& c =
        phase == Phase::Representation ? counts_.representation : counts_.solution;
    switch (kind) {
      case OpKind::Add: c.add += count; break;
      case OpKind::Mul: c.mul += count; break;
      case OpKind::Div: c.div += count; break;
      case OpKind::Cmp: c.cmp += count; break;
    }
  }

  // Snapshot of all counters; idempotent.
  CostReport report() const { return counts_; }

 private:
  CostReport counts_;
};

}  // namespace dtsolve

#endif  // DTSOLVE_COSTCOUNT_HPP
