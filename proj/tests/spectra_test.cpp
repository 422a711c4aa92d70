#include "smoothrep/spectra.hpp"

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "smoothrep/primality.hpp"

using namespace smoothrep;

namespace {
Sieve& shared_sieve() {
  static Sieve sieve(2'000'000);
  return sieve;
}

// Independent M(p) oracle: scan each class a, a+p, a+2p, ... testing
// squarefree-and-p-smooth by plain trial division.
u64 class_scan_M(u64 p) {
  u64 max_min = p;  // class 0 is first hit by p itself
  for (u64 a = 1; a < p; ++a) {
    u64 v = a;
    while (!(oracles::squarefree_by_trial(v) && oracles::smooth_by_trial(v, p)))
      v += p;
    max_min = std::max(max_min, v);
  }
  return max_min;
}

// Reachable nonzero classes using subsets of the primes <= bound.
std::vector<bool> reachable_with(u64 p, u64 bound, const Sieve& sieve) {
  std::vector<bool> reach(p, false);
  reach[1 % p] = true;
  for (u64 q : sieve.primes()) {
    if (q > bound) break;
    if (q == p) continue;
    std::vector<bool> snapshot = reach;
    for (u64 v = 1; v < p; ++v) {
      if (!snapshot[v]) continue;
      u64 nv = mul_mod(v, q % p, p);
      if (nv != 0) reach[nv] = true;
    }
  }
  return reach;
}
}  // namespace

TEST_CASE("compute_M examples") {
  const Sieve& sieve = shared_sieve();
  CHECK(compute_M(11, sieve) == 42);
  CHECK(compute_M(2, sieve) == 2);
  CHECK_THROWS_AS(compute_M(5, sieve), NotRepresentableError);
  CHECK_THROWS_AS(compute_M(7, sieve), NotRepresentableError);
}

TEST_CASE("coverage table for p = 11 lists the minimal witnesses") {
  const Sieve& sieve = shared_sieve();
  CoverageTable table = smooth_coverage(11, sieve);
  REQUIRE(table.complete());
  const std::vector<u64> expect{11, 1, 2, 3, 15, 5, 6, 7, 30, 42, 10};
  for (u64 a = 0; a < 11; ++a) {
    CHECK(table.entries[a].min_value == expect[a]);
    mpz_class prod = 1;
    for (u64 q : table.entries[a].primes) {
      CHECK(q <= 11);
      prod *= q;
    }
    CHECK(prod == expect[a]);
    CHECK(prod % 11 == a);
  }
}

TEST_CASE("exceptional primes leave exactly class 4 uncovered") {
  const Sieve& sieve = shared_sieve();
  for (u64 p : {5ULL, 7ULL}) {
    CoverageTable table = smooth_coverage(p, sieve);
    CHECK(!table.complete());
    for (u64 a = 0; a < p; ++a) CHECK(table.entries[a].covered == (a != 4));
  }
}

TEST_CASE("compute_M matches the class-scanning oracle up to 500") {
  const Sieve& sieve = shared_sieve();
  for (u64 p : sieve.primes()) {
    if (p <= 7) continue;
    if (p > 500) break;
    u64 m = compute_M(p, sieve);
    CHECK(m == class_scan_M(p));
    CHECK(m >= p);  // class 0 forces a witness >= p
  }
}

TEST_CASE("budget exhaustion paths") {
  const Sieve& sieve = shared_sieve();
  HeapBudget tiny;
  tiny.max_pops = 3;
  CHECK_THROWS_AS(compute_M(101, sieve, tiny), SearchExhaustedError);
  YOptions capped;
  capped.primes_beyond_p = 0;  // y(5) = 7 > 5 needs a prime beyond p
  CHECK_THROWS_AS(compute_y(5, sieve, capped), SearchExhaustedError);
}

TEST_CASE("compute_y examples") {
  const Sieve& sieve = shared_sieve();
  CHECK(compute_y(11, sieve) == 7);
  CHECK(compute_y(5, sieve) == 7);
  CHECK(compute_y(3, sieve) == 2);
  CHECK(compute_y(2, sieve) == 1);
}

TEST_CASE("compute_y is monotone-correct") {
  const Sieve& sieve = shared_sieve();
  for (u64 p : sieve.primes()) {
    if (p > 100) break;
    if (p < 3) continue;
    u64 y = compute_y(p, sieve);
    auto at_y = reachable_with(p, y, sieve);
    for (u64 a = 1; a < p; ++a) CHECK(at_y[a]);
    // coverage strictly below y is incomplete
    if (y > 2) {
      auto below = reachable_with(p, y - 1, sieve);
      bool full = true;
      for (u64 a = 1; a < p; ++a)
        if (!below[a]) full = false;
      CHECK(!full);
    }
  }
}

TEST_CASE("squarefree density bound") {
  const Sieve& sieve = shared_sieve();
  // the p = 11 data point: 7 squarefree values below 11
  u64 count = 0;
  for (u64 j = 1; j < 11; ++j)
    if (sieve.squarefree(j)) ++count;
  CHECK(count == 7);
  CHECK(88 * count >= 53 * 10);

  DensityReport report = squarefree_density_check(100000, sieve);
  CHECK(report.violations.empty());
  CHECK(report.primes_checked == 9592);
  CHECK_THROWS_AS(squarefree_density_check(10, sieve), UsageError);
}

TEST_CASE("omega bound and its sharp threshold") {
  const Sieve& sieve = shared_sieve();
  OmegaReport report = omega_bound_check(100000, sieve);
  CHECK(report.violations.empty());
  CHECK(report.six_is_witness);
  CHECK(sieve.omega(7) < std::log(7.0));
}

TEST_CASE("character context is exact on the subgroup structure") {
  CharacterContext chi(13, 3);
  // H_{3,13}: h with h^4 = 1, i.e. index divisible by 3
  std::vector<u64> kernel;
  for (u64 h = 1; h < 13; ++h)
    if (chi.chi_class(h) == 0) kernel.push_back(h);
  CHECK(kernel == std::vector<u64>{1, 5, 8, 12});
  for (u64 h = 1; h < 13; ++h)
    CHECK((chi.chi_class(h) == 0) == (pow_mod(h, (13 - 1) / 3, 13) == 1));

  // complete multiplicativity on a sample
  for (u64 x = 1; x < 13; ++x)
    for (u64 y = 1; y < 13; ++y)
      CHECK(chi.chi_class(mul_mod(x, y, 13)) ==
            (chi.chi_class(x) + chi.chi_class(y)) % 3);
}

TEST_CASE("nonprincipal characters sum to zero exactly") {
  for (auto [p, d] : std::vector<std::pair<u64, u64>>{{13, 3}, {101, 4}, {31, 6}}) {
    CharacterContext chi(p, d);
    for (u64 i = 1; i < d; ++i) {
      // counts per d-th root over all of [1, p) must balance exactly
      std::vector<u64> counts(d, 0);
      for (u64 j = 1; j < p; ++j) ++counts[chi.chi_class(j, i)];
      u64 order = d / std::gcd(i, d);
      (void)order;
      u64 total = 0;
      for (u64 w = 0; w < d; ++w) total += counts[w];
      CHECK(total == p - 1);
      // orthogonality: classes hit equally among the realized roots
      std::vector<u64> realized;
      for (u64 w = 0; w < d; ++w)
        if (counts[w]) realized.push_back(counts[w]);
      for (std::size_t w = 1; w < realized.size(); ++w)
        CHECK(realized[w] == realized[0]);
    }
  }
}

TEST_CASE("pv_partial_sum_check examples") {
  const Sieve& sieve = shared_sieve();

  PvReport r101 = pv_partial_sum_check(101, 4, sieve);
  CHECK(r101.pass);
  CHECK(r101.cosets_covered);
  REQUIRE(r101.characters.size() == 3);
  for (const auto& cr : r101.characters) {
    CHECK(cr.pass);
    CHECK(cr.max_partial_sum > 0);
    CHECK(cr.bound == doctest::Approx(std::sqrt(101.0) *
                                      (std::log(101.0) / (2 * 3.14159265358979) + 1))
                          .epsilon(1e-9));
  }

  PvReport r13 = pv_partial_sum_check(13, 3, sieve);
  CHECK(r13.pass);
  CHECK(r13.cosets_covered);

  CHECK_THROWS_AS(pv_partial_sum_check(13, 1, sieve), UsageError);
  CHECK_THROWS_AS(pv_partial_sum_check(13, 5, sieve), UsageError);  // 5 does not divide 12
}

TEST_CASE("pv bound holds across small primes and orders") {
  const Sieve& sieve = shared_sieve();
  std::vector<std::pair<u64, u64>> coset_misses;
  for (u64 p : sieve.primes()) {
    if (p > 200) break;
    if (p < 3) continue;
    for (u64 d = 2; d <= 10; ++d) {
      if ((p - 1) % d != 0) continue;
      PvReport r = pv_partial_sum_check(p, d, sieve);
      CHECK_MESSAGE(r.bound_pass, "p=", p, " d=", d);
      CHECK_MESSAGE(r.pass, "p=", p, " d=", d);
      if (r.within_hypothesis) CHECK_MESSAGE(r.cosets_covered, "p=", p, " d=", d);
      if (!r.cosets_covered) coset_misses.emplace_back(p, d);
    }
  }
  // outside d < log p + 1 the coset statement genuinely fails at a handful of
  // small pairs; pin them so any behavioral drift is caught
  CHECK(coset_misses == std::vector<std::pair<u64, u64>>{
                            {5, 4}, {7, 6}, {11, 10}, {13, 6}, {17, 8}, {19, 6}, {31, 10}});
}
