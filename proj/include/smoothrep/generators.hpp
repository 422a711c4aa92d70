#ifndef SMOOTHREP_GENERATORS_HPP
#define SMOOTHREP_GENERATORS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smoothrep/arith.hpp"

namespace smoothrep {

enum class Rule { mullin, d_plus_one, d_plus_n_over_d };

// Certificate for one Mullin step: what is known of the factorization of
// 1 + n. When the smallest factor came from ascending trial division the
// cofactor may stay composite; minimality is still certified.
struct MullinCert {
  mpz_class value;  // 1 + n
  std::vector<FactorEntry> factors;
  mpz_class cofactor = 1;
};

// Certificate for one d+1 step: a divisor d of n (as a subset of the prefix
// primes) with chosen | d+1. The first four steps additionally assert that
// chosen is the literal minimum over all divisors.
struct DPlusOneCert {
  bool literal_scan = false;
  std::vector<u32> subset;  // indices into the prefix primes
  mpz_class d;
};

// Certificate for one d+n/d step.
struct DndCert {
  enum class Branch { bootstrap, sqrt_residue, nonresidue };
  Branch branch = Branch::bootstrap;
  u64 target = 0;  // least prime absent from the prefix (0 for bootstrap)
  u64 a = 0;       // residue class the divisor was searched in
  std::vector<u32> subset;
  mpz_class d;
  mpz_class value;  // d + n/d
};

struct StepRecord {
  Rule rule = Rule::mullin;
  mpz_class prime;  // the prime appended by this step
  std::variant<MullinCert, DPlusOneCert, DndCert> certificate;
};

// Ordered primes generated so far, their product, and the replayable step
// log. Appending keeps the product in sync.
class GeneratorState {
 public:
  const std::vector<mpz_class>& primes() const { return primes_; }
  const mpz_class& product() const { return product_; }
  const std::vector<StepRecord>& steps() const { return steps_; }

  bool contains(const mpz_class& p) const;
  void append(StepRecord step);

 private:
  std::vector<mpz_class> primes_;
  mpz_class product_ = 1;
  std::vector<StepRecord> steps_;
};

struct RunResult {
  GeneratorState state;
  bool completed = true;     // false: stopped before reaching k steps
  std::string stop_reason;   // why, when completed is false
};

struct SubsetOptions {
  std::size_t cap = 40;  // 2^(cap/2) half-products for meet-in-the-middle
};

// Subset of `primes` (as indices) whose product is target mod p, by
// meet-in-the-middle over the two halves. nullopt when no subset exists.
// Throws CapExceededError above the cap, UsageError for target = 0.
std::optional<std::vector<u32>> subset_product_search(
    const std::vector<mpz_class>& primes, u64 target, u64 p,
    const SubsetOptions& opts = {});

// ---------------------------------------------------------------------------
// The three generators.
// ---------------------------------------------------------------------------

// Single-step forms: append one more step to `state`, or return false with
// `reason` set when a budget or cap stops the rule. Used by the run_* loops
// and by checkpoint resumption.
bool step_mullin(GeneratorState& state, const FactorBudget& budget,
                 std::string* reason);
bool step_d_plus_one(GeneratorState& state, const Sieve& sieve,
                     const SubsetOptions& subset_opts, std::string* reason);
struct DndPolicy;
bool step_d_plus_n_over_d(GeneratorState& state, const Sieve& sieve,
                          const DndPolicy& policy, const FactorBudget& budget,
                          const SubsetOptions& subset_opts, std::string* reason);

// Mullin: the next prime is the smallest prime factor of 1 + n.
RunResult run_mullin(unsigned k, const FactorBudget& budget = {});

// First k Mullin terms; throws FactorBudgetError when a step cannot certify
// its smallest prime factor within budget.
std::vector<mpz_class> mullin_sequence(unsigned k, const FactorBudget& budget = {});

// d+1: next prime is the least prime q with q ∤ n and q | d+1 for some d | n.
// Literal divisor scan for the first four steps; afterwards the sequence
// provably emits the least absent prime, so each step just exhibits a
// checkable divisor d = -1 (mod p).
RunResult run_d_plus_one(unsigned k, const Sieve& sieve,
                         const SubsetOptions& subset_opts = {});

// Choice hook for the d+n/d generator: invoked on each prime factor of
// d + n/d discovered (in deterministic order) during the nonresidue branch;
// return true to take it. The default accepts the first factor q with
// (q/p) = -1, exactly as the constructive completeness argument does.
struct DndPolicy {
  std::function<bool(const mpz_class& q, u64 p)> accept_factor;
};

// d+n/d: bootstrap prefix [2, 3, 5, 13, 7] via fixed divisor choices, then
// steer by the Legendre symbol of -n so the least absent prime is always
// reached. Budget exhaustion while factoring d + n/d ends the run early
// (completed = false) with the certified steps kept.
RunResult run_d_plus_n_over_d(unsigned k, const Sieve& sieve,
                              const DndPolicy& policy = {},
                              const FactorBudget& budget = {},
                              const SubsetOptions& subset_opts = {});

// ---------------------------------------------------------------------------
// Replay validation.
// ---------------------------------------------------------------------------

struct ReplayResult {
  bool ok = true;
  std::size_t failed_step = static_cast<std::size_t>(-1);
  std::string why;
};

// Re-executes every step certificate arithmetically against the
// reconstructed prefix: divisibility, congruences, primality, minimality,
// Legendre branches.
ReplayResult replay_validate(const GeneratorState& state, const Sieve& sieve);

}  // namespace smoothrep

#endif  // SMOOTHREP_GENERATORS_HPP
