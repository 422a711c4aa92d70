#ifndef SMOOTHREP_REPRESENT_HPP
#define SMOOTHREP_REPRESENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "smoothrep/arith.hpp"

namespace smoothrep {

// A residue class a mod p together with a witness: distinct primes <= p whose
// product is congruent to a. The zero class is witnessed by p itself.
struct SmoothRepresentation {
  u64 p = 2;
  u64 a = 0;
  std::vector<u64> primes;  // distinct, ascending, each <= p

  mpz_class value() const {
    mpz_class acc = 1;
    for (u64 q : primes) acc *= q;
    return acc;
  }
};

// Certificate that every nonzero class mod p has a squarefree p-smooth
// representative: pairwise-coprime semiprimes q_i * r_i = g^(2^i) (mod p).
// Any class is then reached through the binary expansion of its index.
struct RepresentationChain {
  u64 p = 2;
  u64 g = 1;
  std::vector<std::pair<u64, u64>> pairs;
};

struct BruteOptions {
  u64 scan_cap = 10'000'000;  // candidates per class before SearchExhausted
};

// Minimal-witness search for one prime, reusing the primorial of the primes
// below p across classes.
class BruteForceSearcher {
 public:
  BruteForceSearcher(u64 p, const Sieve& sieve, BruteOptions opts = {});

  // Least squarefree p-smooth witness for class a. Throws
  // NotRepresentableError (p in {5,7}, a = 4) or SearchExhaustedError.
  SmoothRepresentation find(u64 a) const;

  // Existence-only form of find (no witness materialization).
  bool covered(u64 a) const;

  bool squarefree_p_smooth(u64 v) const;

  u64 p() const { return p_; }

 private:
  std::optional<u64> scan(u64 a) const;  // least witness value, nullopt on miss

  u64 p_;
  const Sieve& sieve_;
  BruteOptions opts_;
  bool exceptional_;             // p in {5, 7}: finite divisor enumeration
  mpz_class primorial_;          // product of primes < p
  std::vector<u64> tiny_divisor_by_class_;  // minimal divisor per class (exceptional p)
};

SmoothRepresentation brute_force_representative(u64 p, u64 a, const Sieve& sieve,
                                                BruteOptions opts = {});

struct ChainOptions {
  u64 q_scan_count = 10'000;  // sieve primes tried per link
};

// Carries the pairs built before the q-scan dead-ended.
class ChainExhaustedError : public SearchExhaustedError {
 public:
  ChainExhaustedError(const std::string& what, RepresentationChain partial)
      : SearchExhaustedError(what), partial_(std::move(partial)) {}
  const RepresentationChain& partial() const { return partial_; }

 private:
  RepresentationChain partial_;
};

// Greedy forward-only construction of the chain for prime p (intended regime
// p > 1e4). Throws ChainExhaustedError when some link finds no semiprime.
RepresentationChain build_chain(u64 p, const Sieve& sieve, ChainOptions opts = {});

// Independent re-validation of every chain invariant: primality of p and all
// pair members, primitivity of g, per-link congruence, pairwise coprimality.
bool validate_chain(const RepresentationChain& chain, std::string* why = nullptr);

// Witness for a nonzero class from a valid chain: union of the pairs selected
// by the binary expansion of the discrete log of a.
SmoothRepresentation represent_with_chain(const RepresentationChain& chain, u64 a);
SmoothRepresentation represent_with_chain(const RepresentationChain& chain, u64 a,
                                          const DiscreteLogTable& table);

// ---------------------------------------------------------------------------
// Range verification driver.
// ---------------------------------------------------------------------------

enum class VerifyMethod { auto_select, brute, chain };
enum class VerifyOutcome { pass, exception, failure };

struct PrimeVerifyResult {
  u64 p = 2;
  VerifyMethod method = VerifyMethod::brute;
  VerifyOutcome outcome = VerifyOutcome::pass;
  std::vector<u64> unrepresentable;  // exceptional classes (only p = 5, 7)
  std::string detail;                // failure reason, empty otherwise
  std::optional<RepresentationChain> certificate;
};

struct VerifyReport {
  std::vector<PrimeVerifyResult> entries;  // ascending by p
  bool all_ok() const {
    for (const auto& e : entries)
      if (e.outcome == VerifyOutcome::failure) return false;
    return true;
  }
};

struct VerifyOptions {
  u64 brute_threshold = 10'000;  // below: every class checked individually
  bool keep_certificates = false;
  BruteOptions brute;
  ChainOptions chain;
};

// Verifies the representability statement for every prime in [lo, hi]
// (5 and 7 report their exceptional class). Work is split into contiguous
// prime blocks over `workers` threads; the merged report is ordered by p
// regardless of scheduling.
VerifyReport verify_theorem_range(u64 lo, u64 hi, VerifyMethod method,
                                  unsigned workers, const Sieve& sieve,
                                  const VerifyOptions& opts = {});

}  // namespace smoothrep

#endif  // SMOOTHREP_REPRESENT_HPP
