#ifndef SMOOTHREP_PRIMALITY_HPP
#define SMOOTHREP_PRIMALITY_HPP

#include <gmpxx.h>

#include "smoothrep/arith.hpp"

namespace smoothrep {

// Exact primality for any 64-bit n: strong probable-prime tests against a
// fixed witness set known to be deterministic below 2^64.
bool is_prime_64(u64 n);

// Strong probable-prime test with `rounds` seeded random bases; delegates to
// is_prime_64 (exact) when n fits 64 bits.
bool is_probable_prime_big(const mpz_class& n, unsigned rounds = 40, u64 seed = 0);

}  // namespace smoothrep

#endif  // SMOOTHREP_PRIMALITY_HPP
