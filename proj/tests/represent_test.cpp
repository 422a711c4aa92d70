#include "smoothrep/represent.hpp"

#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "smoothrep/primality.hpp"

using namespace smoothrep;

namespace {
Sieve& shared_sieve() {
  static Sieve sieve(2'000'000);
  return sieve;
}
}  // namespace

TEST_CASE("brute_force_representative examples") {
  const Sieve& sieve = shared_sieve();

  SmoothRepresentation r = brute_force_representative(11, 4, sieve);
  CHECK(r.value() == 15);
  CHECK(r.primes == std::vector<u64>{3, 5});

  CHECK_THROWS_AS(brute_force_representative(5, 4, sieve), NotRepresentableError);
  CHECK_THROWS_AS(brute_force_representative(7, 4, sieve), NotRepresentableError);

  SmoothRepresentation one = brute_force_representative(11, 1, sieve);
  CHECK(one.primes.empty());
  CHECK(one.value() == 1);

  SmoothRepresentation zero = brute_force_representative(11, 0, sieve);
  CHECK(zero.primes == std::vector<u64>{11});

  // representable classes of the exceptional primes still get minimal witnesses
  CHECK(brute_force_representative(5, 1, sieve).value() == 1);
  CHECK(brute_force_representative(5, 2, sieve).value() == 2);
  CHECK(brute_force_representative(5, 3, sieve).value() == 3);
  CHECK(brute_force_representative(7, 6, sieve).value() == 6);
}

TEST_CASE("brute witnesses match subset-product enumeration for p <= 1000") {
  const Sieve& sieve = shared_sieve();
  for (u64 p : sieve.primes()) {
    if (p <= 7) continue;
    if (p > 1000) break;
    std::vector<u64> primes_upto;
    for (u64 q : sieve.primes()) {
      if (q > p) break;
      primes_upto.push_back(q);
    }
    // first-hit table per class from the independent increasing enumeration
    std::vector<u64> first_hit(p, 0);
    u64 covered = 0;
    oracles::SmoothEnumerator en(p, primes_upto);
    while (covered < p) {
      auto v = en.next();
      REQUIRE(v.has_value());
      u64 cls = *v % p;
      if (first_hit[cls] == 0) {
        first_hit[cls] = *v;
        ++covered;
      }
    }
    BruteForceSearcher searcher(p, sieve);
    for (u64 a = 1; a < p; ++a) {
      SmoothRepresentation rep = searcher.find(a);
      CHECK(rep.value() == first_hit[a]);
      // witness structure: distinct primes <= p multiplying to a mod p
      mpz_class prod = 1;
      for (std::size_t i = 0; i < rep.primes.size(); ++i) {
        CHECK(rep.primes[i] <= p);
        if (i) CHECK(rep.primes[i] > rep.primes[i - 1]);
        prod *= rep.primes[i];
      }
      CHECK(prod % p == a);
    }
  }
}

TEST_CASE("build_chain on 10007 yields 14 machine-checked links") {
  const Sieve& sieve = shared_sieve();
  RepresentationChain chain = build_chain(10007, sieve);
  CHECK(chain.p == 10007);
  REQUIRE(chain.pairs.size() == 14);

  std::string why;
  CHECK_MESSAGE(validate_chain(chain, &why), why);

  // independent re-check of the congruences and pairwise coprimality
  u64 t = chain.g;
  std::vector<u64> all;
  for (auto [q, r] : chain.pairs) {
    CHECK(oracles::trial_division_prime(q));
    CHECK(oracles::trial_division_prime(r));
    CHECK(q != r);
    CHECK(mpz_class(q) * r % 10007 == t);
    all.push_back(q);
    all.push_back(r);
    t = mul_mod(t, t, 10007);
  }
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
}

TEST_CASE("build_chain dead-ends on p = 11") {
  const Sieve& sieve = shared_sieve();
  try {
    build_chain(11, sieve);
    FAIL("expected ChainExhaustedError");
  } catch (const ChainExhaustedError& e) {
    // the only semiprime for m_0 = g^1 = 2 consumes {5, 7}; m_1 = 4 then has
    // no admissible pair among the remaining primes {2, 3}
    REQUIRE(e.partial().pairs.size() == 1);
    CHECK(e.partial().pairs[0] == std::pair<u64, u64>{5, 7});
  }
}

TEST_CASE("validate_chain rejects tampering") {
  const Sieve& sieve = shared_sieve();
  RepresentationChain chain = build_chain(10007, sieve);
  RepresentationChain bad = chain;
  bad.pairs[3].first = 9973;  // prime, but breaks the congruence
  CHECK(!validate_chain(bad));
  bad = chain;
  bad.pairs.pop_back();
  CHECK(!validate_chain(bad));
  bad = chain;
  bad.g = 4;  // quadratic residue cannot generate
  CHECK(!validate_chain(bad));
}

TEST_CASE("represent_with_chain reaches requested classes") {
  const Sieve& sieve = shared_sieve();
  RepresentationChain chain = build_chain(10007, sieve);
  DiscreteLogTable table(chain.g, chain.p);

  // a = 1 has discrete log 0: empty witness
  SmoothRepresentation one = represent_with_chain(chain, 1, table);
  CHECK(one.primes.empty());

  // single-bit logs give exactly one pair
  u64 t = chain.g;
  for (std::size_t i = 0; i < 5; ++i) {
    SmoothRepresentation rep = represent_with_chain(chain, t, table);
    std::vector<u64> expect{chain.pairs[i].first, chain.pairs[i].second};
    std::sort(expect.begin(), expect.end());
    CHECK(rep.primes == expect);
    t = mul_mod(t, t, chain.p);
  }

  SmoothRepresentation four = represent_with_chain(chain, 4, table);
  mpz_class prod = 1;
  for (u64 q : four.primes) prod *= q;
  CHECK(prod % 10007 == 4);
  std::sort(four.primes.begin(), four.primes.end());
  CHECK(std::adjacent_find(four.primes.begin(), four.primes.end()) ==
        four.primes.end());

  CHECK_THROWS_AS(represent_with_chain(chain, 0, table), UsageError);
}

TEST_CASE("chain round-trip for random residues across the regime") {
  const Sieve& sieve = shared_sieve();
  std::mt19937_64 rng(4242);
  for (u64 p : {10007ULL, 10009ULL, 10037ULL, 100003ULL, 999983ULL}) {
    RepresentationChain chain = build_chain(p, sieve);
    REQUIRE(validate_chain(chain));
    DiscreteLogTable table(chain.g, p);
    for (int it = 0; it < 100; ++it) {
      u64 a = 1 + rng() % (p - 1);
      SmoothRepresentation rep = represent_with_chain(chain, a, table);
      mpz_class prod = 1;
      for (u64 q : rep.primes) {
        CHECK(q <= p);
        prod *= q;
      }
      CHECK(prod % p == a);
    }
  }
}

TEST_CASE("every prime in (1e4, 1e5] chains and round-trips 100 residues") {
  const Sieve& sieve = shared_sieve();
  std::mt19937_64 rng(20107);
  for (u64 p : sieve.primes()) {
    if (p <= 10000) continue;
    if (p > 100000) break;
    RepresentationChain chain = build_chain(p, sieve);
    std::string why;
    REQUIRE_MESSAGE(validate_chain(chain, &why), "p=", p, ": ", why);
    DiscreteLogTable table(chain.g, p);
    for (int it = 0; it < 100; ++it) {
      u64 a = 1 + rng() % (p - 1);
      SmoothRepresentation rep = represent_with_chain(chain, a, table);
      u64 prod = 1;
      for (u64 q : rep.primes) prod = mul_mod(prod, q % p, p);
      REQUIRE(prod == a);
    }
  }
}

TEST_CASE("verify_theorem_range on the first few primes") {
  const Sieve& sieve = shared_sieve();
  VerifyReport report =
      verify_theorem_range(2, 10, VerifyMethod::auto_select, 1, sieve);
  REQUIRE(report.entries.size() == 4);
  CHECK(report.entries[0].p == 2);
  CHECK(report.entries[0].outcome == VerifyOutcome::pass);
  CHECK(report.entries[1].p == 3);
  CHECK(report.entries[1].outcome == VerifyOutcome::pass);
  CHECK(report.entries[2].p == 5);
  CHECK(report.entries[2].outcome == VerifyOutcome::exception);
  CHECK(report.entries[2].unrepresentable == std::vector<u64>{4});
  CHECK(report.entries[3].p == 7);
  CHECK(report.entries[3].outcome == VerifyOutcome::exception);
  CHECK(report.entries[3].unrepresentable == std::vector<u64>{4});
  CHECK(report.all_ok());
}

TEST_CASE("verify_theorem_range brute regime sample") {
  const Sieve& sieve = shared_sieve();
  VerifyReport report = verify_theorem_range(8, 2000, VerifyMethod::brute, 1, sieve);
  CHECK(report.all_ok());
  for (const auto& e : report.entries) CHECK(e.outcome == VerifyOutcome::pass);
}

TEST_CASE("verify_theorem_range merge is independent of worker count") {
  const Sieve& sieve = shared_sieve();
  VerifyReport seq = verify_theorem_range(2, 3000, VerifyMethod::auto_select, 1, sieve);
  VerifyReport par = verify_theorem_range(2, 3000, VerifyMethod::auto_select, 4, sieve);
  REQUIRE(seq.entries.size() == par.entries.size());
  for (std::size_t i = 0; i < seq.entries.size(); ++i) {
    CHECK(seq.entries[i].p == par.entries[i].p);
    CHECK(seq.entries[i].outcome == par.entries[i].outcome);
    CHECK(seq.entries[i].unrepresentable == par.entries[i].unrepresentable);
  }
}

TEST_CASE("chain and brute agree just above the regime boundary") {
  const Sieve& sieve = shared_sieve();
  int done = 0;
  for (u64 p : sieve.primes()) {
    if (p <= 10000) continue;
    if (++done > 3) break;
    // brute: every class covered
    BruteForceSearcher searcher(p, sieve);
    for (u64 a = 1; a < p; ++a) CHECK(searcher.covered(a));
    // chain: valid certificate exists
    RepresentationChain chain = build_chain(p, sieve);
    CHECK(validate_chain(chain));
  }
}

TEST_CASE("chain certificates kept on request") {
  const Sieve& sieve = shared_sieve();
  VerifyOptions opts;
  opts.keep_certificates = true;
  VerifyReport report =
      verify_theorem_range(10007, 10070, VerifyMethod::chain, 1, sieve, opts);
  REQUIRE(!report.entries.empty());
  for (const auto& e : report.entries) {
    REQUIRE(e.certificate.has_value());
    CHECK(e.certificate->p == e.p);
    CHECK(validate_chain(*e.certificate));
  }
}
