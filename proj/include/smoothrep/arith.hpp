#ifndef SMOOTHREP_ARITH_HPP
#define SMOOTHREP_ARITH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "smoothrep/errors.hpp"

namespace smoothrep {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// ---------------------------------------------------------------------------
// Residues and basic modular arithmetic.  All 64-bit modular products go
// through 128-bit intermediates so any 64-bit modulus is safe.
// ---------------------------------------------------------------------------

struct Residue {
  u64 value = 0;
  u64 modulus = 2;
};

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 pow_mod(u64 base, u64 exp, u64 m);

// base^exp mod m. Throws UsageError for m < 2.
Residue mod_pow(u64 base, u64 exp, u64 m);

// Inverse of a mod m. Throws NotInvertibleError when gcd(a, m) > 1.
Residue mod_inv(u64 a, u64 m);

// Jacobi symbol (a/n) for odd n >= 1; equals the Legendre symbol for prime n.
// Throws UsageError for even or nonpositive n.
int jacobi(i64 a, u64 n);

// Square root of a mod an odd prime p, canonicalized to the smaller of the
// two roots. Throws NonResidueError when (a/p) = -1.
u64 sqrt_mod(u64 a, u64 p);

// ---------------------------------------------------------------------------
// Sieve: ordered primes <= limit plus a smallest-prime-factor table.
// Built once, shared read-only.
// ---------------------------------------------------------------------------

class Sieve {
 public:
  explicit Sieve(u64 limit);

  u64 limit() const { return limit_; }
  const std::vector<u64>& primes() const { return primes_; }

  // Smallest prime factor for 2 <= n <= limit.
  u32 spf(u64 n) const { return spf_[n]; }

  bool is_prime(u64 n) const { return n >= 2 && n <= limit_ && spf_[n] == n; }

  // Exact squarefreeness for n <= limit via the SPF table.
  bool squarefree(u64 n) const;

  // Number of distinct prime factors for 2 <= n <= limit.
  unsigned omega(u64 n) const;

  // Least prime not present in `used` (used must be sorted ascending).
  // Only valid while the answer stays <= limit.
  u64 next_prime_not_in(const std::vector<u64>& used) const;

 private:
  u64 limit_;
  std::vector<u32> spf_;
  std::vector<u64> primes_;
};

Sieve prime_sieve(u64 limit);

// Visits every prime in [lo, hi] in increasing order without materializing an
// SPF table for the whole range (segmented over base primes <= sqrt(hi)).
void for_primes_in_range(u64 lo, u64 hi, const std::function<void(u64)>& fn);

// ---------------------------------------------------------------------------
// Factorization: the universal currency of the toolkit.
// ---------------------------------------------------------------------------

struct FactorEntry {
  mpz_class prime;
  unsigned exponent = 1;
};

// Complete factorization: primes strictly increasing, product reproduces
// value (for value >= 1). Zero is an empty list with the zero flag set.
struct Factorization {
  mpz_class value;
  bool is_zero = false;
  std::vector<FactorEntry> factors;

  mpz_class product() const;
  bool squarefree() const;
};

// A factoring attempt that may have stopped early: `factors` are certified
// prime, `cofactor` is the uncertified remainder (1 when complete).
struct PartialFactorization {
  mpz_class value;
  std::vector<FactorEntry> factors;
  mpz_class cofactor = 1;

  bool complete() const { return cofactor == 1; }
};

struct FactorBudget {
  u64 trial_limit = 1'000'000;     // trial division bound
  u64 rho_iterations = 10'000'000; // total Pollard-rho/Brent evaluations
  unsigned prp_rounds = 40;        // probable-prime rounds above 2^64
  u64 prp_seed = 0;
};

// Thrown when a composite cofactor resists the budget; carries the partial
// factorization gathered so far.
class FactorBudgetError : public Error {
 public:
  FactorBudgetError(const std::string& what, PartialFactorization partial)
      : Error(ErrorKind::factor_budget, what), partial_(std::move(partial)) {}
  const PartialFactorization& partial() const { return partial_; }

 private:
  PartialFactorization partial_;
};

// Complete factorization of n >= 1 by trial division then Pollard-rho/Brent,
// each factor certified prime. Throws FactorBudgetError when the budget runs
// out on a composite cofactor.
Factorization factorize(const mpz_class& n, const FactorBudget& budget = {});
Factorization factorize(u64 n, const FactorBudget& budget = {});

// Best-effort variant of factorize that reports instead of throwing.
PartialFactorization try_factorize(const mpz_class& n, const FactorBudget& budget = {});

// Early-exit mode: the smallest prime factor of n >= 2 without completing the
// full factorization when trial division already answers it.
mpz_class smallest_prime_factor(const mpz_class& n, const FactorBudget& budget = {});

// Streams prime factors of n in deterministic order until `accept` returns
// true; nullopt when n is fully factored with no accepted prime.
std::optional<mpz_class> find_prime_factor(
    const mpz_class& n, const std::function<bool(const mpz_class&)>& accept,
    const FactorBudget& budget = {});

// Squarefreeness of n >= 1; answered from the SPF table when n is within the
// sieve, by factoring otherwise.
bool is_squarefree(u64 n, const Sieve* sieve = nullptr);

// ---------------------------------------------------------------------------
// Multiplicative structure mod p.
// ---------------------------------------------------------------------------

// Least primitive root mod prime p, certified against the factorization of
// p-1. Returns 1 for p = 2.
u64 primitive_root(u64 p, const FactorBudget& budget = {});

// Baby-step/giant-step table for a fixed (g, p); O(sqrt p) memory, reusable
// across many lookups.
class DiscreteLogTable {
 public:
  DiscreteLogTable(u64 g, u64 p);
  // The unique k in [0, p-1) with g^k = a (mod p). Throws UsageError for
  // a = 0, VerificationFailureError if g does not generate a's class.
  u64 log(u64 a) const;

  u64 g() const { return g_; }
  u64 p() const { return p_; }

 private:
  u64 g_, p_, step_, giant_factor_;
  std::vector<std::pair<u64, u32>> baby_;  // sorted (value, exponent)
};

u64 discrete_log(u64 g, u64 a, u64 p);

}  // namespace smoothrep

#endif  // SMOOTHREP_ARITH_HPP
