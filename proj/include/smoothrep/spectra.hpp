#ifndef SMOOTHREP_SPECTRA_HPP
#define SMOOTHREP_SPECTRA_HPP

#include <vector>

#include "smoothrep/arith.hpp"

namespace smoothrep {

// ---------------------------------------------------------------------------
// M(p): the largest minimal squarefree p-smooth representative over all
// residue classes.
// ---------------------------------------------------------------------------

struct CoverageEntry {
  bool covered = false;
  u64 min_value = 0;
  std::vector<u64> primes;
};

struct CoverageTable {
  u64 p = 2;
  std::vector<CoverageEntry> entries;  // indexed by class a in [0, p)

  bool complete() const {
    for (const auto& e : entries)
      if (!e.covered) return false;
    return true;
  }
  u64 max_min_value() const {
    u64 m = 0;
    for (const auto& e : entries)
      if (e.covered && e.min_value > m) m = e.min_value;
    return m;
  }
};

struct HeapBudget {
  u64 max_pops = 200'000'000;
  u64 max_value = u64{1} << 62;
};

// First-hit table per residue class from the increasing enumeration of
// squarefree p-smooth numbers (min-heap over an extend-or-bump tree in which
// each number appears exactly once). The enumeration is finite; classes
// still uncovered when it drains are provably unrepresentable (only p = 5
// and 7).
CoverageTable smooth_coverage(u64 p, const Sieve& sieve, const HeapBudget& budget = {});

// M(p); throws NotRepresentableError for p in {5, 7}, SearchExhaustedError
// when the heap budget runs out first.
u64 compute_M(u64 p, const Sieve& sieve, const HeapBudget& budget = {});

// ---------------------------------------------------------------------------
// y(p): least y such that every nonzero class mod p has a squarefree
// y-smooth representative. May exceed p (y(5) = 7).
// ---------------------------------------------------------------------------

struct YOptions {
  u64 primes_beyond_p = 100;  // cap before SearchExhausted
};

u64 compute_y(u64 p, const Sieve& sieve, const YOptions& opts = {});

// ---------------------------------------------------------------------------
// Numerical sanity checks of the analytic ingredients.
// ---------------------------------------------------------------------------

struct DensityViolation {
  u64 p = 0;
  u64 squarefree_count = 0;
};

struct DensityReport {
  u64 limit = 0;
  u64 primes_checked = 0;
  std::vector<DensityViolation> violations;  // expected empty
};

// For every prime p <= limit: #squarefree j < p satisfies
// 88 * count >= 53 * (p - 1), compared in exact integers.
DensityReport squarefree_density_check(u64 limit, const Sieve& sieve);

struct OmegaReport {
  u64 limit = 0;
  std::vector<u64> violations;   // n > 6 with omega(n) >= log n; expected empty
  bool six_is_witness = false;   // omega(6) = 2 > log 6 marks the sharp threshold
};

OmegaReport omega_bound_check(u64 limit, const Sieve& sieve);

// ---------------------------------------------------------------------------
// Characters mod p and partial-sum bounds.
// ---------------------------------------------------------------------------

// Order-d character chi mod p realized exactly: chi(g^t) = e^(2 pi i t / d)
// for the least primitive root g. chi_class reports the exponent of the
// d-th root of unity; absolute values are the only floating-point step.
class CharacterContext {
 public:
  CharacterContext(u64 p, u64 d);

  u64 p() const { return p_; }
  u64 d() const { return d_; }
  u64 g() const { return g_; }

  // w with chi^i(j) = e^(2 pi i w / d), for j not divisible by p.
  u64 chi_class(u64 j, u64 i = 1) const {
    return (i % d_) * index_[j % p_] % d_;
  }
  u32 index(u64 j) const { return index_[j % p_]; }

 private:
  u64 p_, d_, g_;
  std::vector<u32> index_;  // discrete logs of 1..p-1 to base g
};

struct PvCharacterReport {
  u64 i = 1;  // power of the base order-d character
  double max_partial_sum = 0;
  double bound = 0;  // sqrt(p) * (log(p) / (2 pi) + 1)
  bool pass = false;
  bool even_character = false;
  bool halved_bound_holds = false;  // recorded for even characters, not asserted
};

struct PvReport {
  u64 p = 0, d = 0;
  std::vector<PvCharacterReport> characters;
  bool cosets_covered = false;  // every coset of H_{d,p} has a squarefree j < p
  // d < log p + 1: the domain on which the coset-representative statement is
  // actually claimed. Outside it small counterexamples exist, e.g. the coset
  // of 4 mod 5 at d = 4 is {4} = {2^2}.
  bool within_hypothesis = false;
  bool bound_pass = false;  // all nonprincipal powers meet the partial-sum bound
  // bound everywhere; coset coverage wherever the claim applies
  bool pass = false;
};

struct PvOptions {
  u64 p_cap = 10'000;
};

// Checks max_x |sum_{j<=x} chi^i(j)| against the explicit partial-sum bound
// for every nonprincipal power of the order-d character, and that every
// coset of H_{d,p} contains a squarefree j < p.
PvReport pv_partial_sum_check(u64 p, u64 d, const Sieve& sieve,
                              const PvOptions& opts = {});

}  // namespace smoothrep

#endif  // SMOOTHREP_SPECTRA_HPP
