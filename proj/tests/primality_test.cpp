#include "smoothrep/primality.hpp"

#include "doctest.h"
#include "oracles.hpp"
#include "smoothrep/arith.hpp"

using namespace smoothrep;

TEST_CASE("is_prime_64 examples") {
  CHECK(!is_prime_64(2047));  // 23 * 89, base-2 strong pseudoprime
  CHECK(is_prime_64(10007));
  CHECK(!is_prime_64(0));
  CHECK(!is_prime_64(1));
  CHECK(is_prime_64(2));
  CHECK(is_prime_64(6221671));
  CHECK(is_prime_64(38709183810571ULL));
  CHECK(!is_prime_64(4));
}

TEST_CASE("is_prime_64 handles large 64-bit inputs") {
  CHECK(is_prime_64(18446744073709551557ULL));   // largest 64-bit prime
  CHECK(!is_prime_64(18446744073709551555ULL));
  CHECK(is_prime_64(2305843009213693951ULL));    // 2^61 - 1
  CHECK(!is_prime_64(2305843009213693953ULL));
}

TEST_CASE("is_prime_64 agrees with the sieve below 1e6") {
  Sieve sieve(1000000);
  for (u64 n = 0; n <= 1000000; ++n) CHECK(is_prime_64(n) == sieve.is_prime(n));
}

TEST_CASE("base-2 strong pseudoprimes are all rejected") {
  auto pseudos = oracles::base2_strong_pseudoprimes(100000);
  REQUIRE(pseudos.size() >= 3);
  CHECK(pseudos[0] == 2047);
  CHECK(pseudos[1] == 3277);
  CHECK(pseudos[2] == 4033);
  for (u64 n : pseudos) CHECK(!is_prime_64(n));
}

TEST_CASE("is_probable_prime_big delegates below 2^64") {
  CHECK(is_probable_prime_big(mpz_class("38709183810571")));
  CHECK(is_probable_prime_big(mpz_class(6221671)));
  CHECK(!is_probable_prime_big(mpz_class(4)));
}

TEST_CASE("is_probable_prime_big on big integers") {
  mpz_class m89 = (mpz_class(1) << 89) - 1;    // Mersenne prime
  mpz_class m107 = (mpz_class(1) << 107) - 1;  // Mersenne prime
  mpz_class m127 = (mpz_class(1) << 127) - 1;  // Mersenne prime
  CHECK(is_probable_prime_big(m89));
  CHECK(is_probable_prime_big(m107));
  CHECK(is_probable_prime_big(m127));
  CHECK(!is_probable_prime_big(m89 * m107));
  // reproducible across seeds
  CHECK(is_probable_prime_big(m127, 40, 1));
  CHECK(is_probable_prime_big(m127, 40, 99));
  CHECK(!is_probable_prime_big(m89 * m89, 40, 7));
}
