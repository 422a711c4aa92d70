#include "smoothrep/primality.hpp"

#include <array>

namespace smoothrep {

namespace {

// Strong probable-prime test to base a for odd n > 2 with n-1 = d * 2^s.
bool strong_prp(u64 n, u64 a, u64 d, int s) {
  a %= n;
  if (a == 0) return true;
  u64 x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

constexpr std::array<u32, 12> kSmallPrimes = {2,  3,  5,  7,  11, 13,
                                              17, 19, 23, 29, 31, 37};

}  // namespace

bool is_prime_64(u64 n) {
  if (n < 2) return false;
  for (u32 p : kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 41 * 41) return true;

  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }

  if (n < 4759123141ULL) {
    for (u64 a : {2ULL, 7ULL, 61ULL})
      if (!strong_prp(n, a, d, s)) return false;
    return true;
  }
  // Sinclair's witness set, deterministic for all n < 2^64.
  for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL,
                1795265022ULL})
    if (!strong_prp(n, a, d, s)) return false;
  return true;
}

bool is_probable_prime_big(const mpz_class& n, unsigned rounds, u64 seed) {
  if (mpz_fits_ulong_p(n.get_mpz_t())) return is_prime_64(n.get_ui());
  if (n < 0) return false;
  if (mpz_even_p(n.get_mpz_t())) return false;
  for (u32 p : kSmallPrimes)
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;

  mpz_class d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

  gmp_randclass rng(gmp_randinit_default);
  rng.seed(static_cast<unsigned long>(seed));
  mpz_class nm1 = n - 1, nm3 = n - 3;

  auto witness_passes = [&](const mpz_class& a) {
    mpz_class x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == nm1) return true;
    for (unsigned long i = 1; i < s; ++i) {
      x = x * x % n;
      if (x == nm1) return true;
    }
    return false;
  };

  if (!witness_passes(mpz_class(2))) return false;
  for (unsigned r = 1; r < rounds; ++r) {
    mpz_class a = rng.get_z_range(nm3) + 2;  // uniform in [2, n-2]
    if (!witness_passes(a)) return false;
  }
  return true;
}

}  // namespace smoothrep
