#include "smoothrep/represent.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <numeric>
#include <thread>

#include "smoothrep/primality.hpp"

namespace smoothrep {

namespace {

std::vector<u64> primes_below(u64 p, const Sieve& sieve) {
  std::vector<u64> out;
  for (u64 q : sieve.primes()) {
    if (q >= p) break;
    out.push_back(q);
  }
  return out;
}

}  // namespace

BruteForceSearcher::BruteForceSearcher(u64 p, const Sieve& sieve, BruteOptions opts)
    : p_(p), sieve_(sieve), opts_(opts), exceptional_(p == 5 || p == 7) {
  if (!is_prime_64(p)) throw UsageError("brute_force: p must be prime");
  if (p > sieve.limit() + 1)
    throw UsageError("brute_force: sieve limit too small for p");
  auto below = primes_below(p, sieve);
  primorial_ = 1;
  for (u64 q : below) primorial_ *= q;
  if (exceptional_) {
    // All squarefree p-smooth witnesses of nonzero classes divide the
    // primorial; enumerating every divisor settles each class exactly.
    tiny_divisor_by_class_.assign(p, 0);
    const std::size_t k = below.size();
    for (u64 mask = 0; mask < (u64{1} << k); ++mask) {
      u64 prod = 1;
      for (std::size_t i = 0; i < k; ++i)
        if (mask >> i & 1) prod *= below[i];
      u64 cls = prod % p;
      if (tiny_divisor_by_class_[cls] == 0 || prod < tiny_divisor_by_class_[cls])
        tiny_divisor_by_class_[cls] = prod;
    }
  }
}

bool BruteForceSearcher::squarefree_p_smooth(u64 v) const {
  if (v == 0) return false;
  if (v <= sieve_.limit()) {
    while (v > 1) {
      u64 q = sieve_.spf(v);
      if (q > p_) return false;
      v /= q;
      if (v % q == 0) return false;
    }
    return true;
  }
  // witnesses of nonzero classes are exactly the divisors of the primorial
  return mpz_divisible_ui_p(primorial_.get_mpz_t(), v) != 0;
}

std::optional<u64> BruteForceSearcher::scan(u64 a) const {
  u64 v = a;
  for (u64 step = 0; step < opts_.scan_cap; ++step) {
    if (squarefree_p_smooth(v)) return v;
    v += p_;
  }
  return std::nullopt;
}

bool BruteForceSearcher::covered(u64 a) const {
  a %= p_;
  if (a == 0) return true;
  if (exceptional_) return tiny_divisor_by_class_[a] != 0;
  return scan(a).has_value();
}

SmoothRepresentation BruteForceSearcher::find(u64 a) const {
  a %= p_;
  SmoothRepresentation rep;
  rep.p = p_;
  rep.a = a;
  if (a == 0) {
    rep.primes = {p_};
    return rep;
  }
  u64 v;
  if (exceptional_) {
    v = tiny_divisor_by_class_[a];
    if (v == 0)
      throw NotRepresentableError("class " + std::to_string(a) + " mod " +
                                  std::to_string(p_) +
                                  " has no squarefree smooth representative");
  } else {
    auto found = scan(a);
    if (!found)
      throw SearchExhaustedError("brute_force: scan cap reached for a=" +
                                 std::to_string(a) + " mod " + std::to_string(p_));
    v = *found;
  }
  // decompose the witness into its (distinct) prime factors
  if (v <= sieve_.limit()) {
    while (v > 1) {
      u64 q = sieve_.spf(v);
      rep.primes.push_back(q);
      v /= q;
    }
  } else {
    for (const auto& e : factorize(v).factors)
      rep.primes.push_back(e.prime.get_ui());
  }
  std::sort(rep.primes.begin(), rep.primes.end());
  return rep;
}

SmoothRepresentation brute_force_representative(u64 p, u64 a, const Sieve& sieve,
                                                BruteOptions opts) {
  return BruteForceSearcher(p, sieve, opts).find(a);
}

// ---------------------------------------------------------------------------
// Chain construction (regime p > 1e4).
// ---------------------------------------------------------------------------

RepresentationChain build_chain(u64 p, const Sieve& sieve, ChainOptions opts) {
  if (!is_prime_64(p)) throw UsageError("build_chain: p must be prime");
  if (p < 5) throw UsageError("build_chain: p too small");
  RepresentationChain chain;
  chain.p = p;
  chain.g = primitive_root(p);

  const unsigned links = std::bit_width(p - 2);  // i = 0 .. floor(log2(p-2))
  const auto& sieve_primes = sieve.primes();
  const u64 q_count = std::min<u64>(opts.q_scan_count, sieve_primes.size());

  std::vector<u64> used;  // primes consumed by earlier pairs, kept sorted
  auto in_use = [&](u64 x) {
    return std::binary_search(used.begin(), used.end(), x);
  };

  u64 t = chain.g;  // g^(2^i)
  for (unsigned i = 0; i < links; ++i) {
    bool placed = false;
    for (u64 qi = 0; qi < q_count; ++qi) {
      u64 q = sieve_primes[qi];
      if (q >= p) break;
      if (in_use(q)) continue;
      u64 r = mul_mod(mod_inv(q, p).value, t, p);
      if (r == 1 || r == q || in_use(r) || !is_prime_64(r)) continue;
      chain.pairs.emplace_back(q, r);
      used.insert(std::upper_bound(used.begin(), used.end(), q), q);
      used.insert(std::upper_bound(used.begin(), used.end(), r), r);
      placed = true;
      break;
    }
    if (!placed)
      throw ChainExhaustedError("build_chain: no semiprime for link " +
                                    std::to_string(i) + " of p=" + std::to_string(p),
                                chain);
    t = mul_mod(t, t, p);
  }
  return chain;
}

bool validate_chain(const RepresentationChain& chain, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const u64 p = chain.p;
  if (!is_prime_64(p)) return fail("p is not prime");
  if (chain.g < 1 || chain.g >= p) return fail("g out of range");
  Factorization f = factorize(p - 1);
  for (const auto& e : f.factors)
    if (pow_mod(chain.g, (p - 1) / e.prime.get_ui(), p) == 1)
      return fail("g is not a primitive root");
  if (chain.pairs.size() != std::bit_width(p - 2))
    return fail("wrong number of links");

  std::vector<u64> all;
  u64 t = chain.g;
  for (std::size_t i = 0; i < chain.pairs.size(); ++i) {
    auto [q, r] = chain.pairs[i];
    if (q == r) return fail("q = r in link " + std::to_string(i));
    if (q >= p || r >= p) return fail("pair member >= p in link " + std::to_string(i));
    if (!is_prime_64(q) || !is_prime_64(r))
      return fail("composite pair member in link " + std::to_string(i));
    if (mul_mod(q % p, r % p, p) != t)
      return fail("congruence fails in link " + std::to_string(i));
    all.push_back(q);
    all.push_back(r);
    t = mul_mod(t, t, p);
  }
  for (std::size_t i = 0; i < chain.pairs.size(); ++i)
    for (std::size_t j = i + 1; j < chain.pairs.size(); ++j) {
      u64 mi = chain.pairs[i].first * chain.pairs[i].second;
      u64 mj = chain.pairs[j].first * chain.pairs[j].second;
      if (std::gcd(mi, mj) != 1)
        return fail("links " + std::to_string(i) + "," + std::to_string(j) +
                    " share a factor");
    }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    return fail("duplicate prime across links");
  return true;
}

SmoothRepresentation represent_with_chain(const RepresentationChain& chain, u64 a,
                                          const DiscreteLogTable& table) {
  const u64 p = chain.p;
  a %= p;
  if (a == 0)
    throw UsageError("represent_with_chain: a = 0 is witnessed by p itself");
  u64 k = table.log(a);
  SmoothRepresentation rep;
  rep.p = p;
  rep.a = a;
  u64 check = 1;
  for (std::size_t i = 0; k >> i; ++i) {
    if ((k >> i) & 1) {
      auto [q, r] = chain.pairs.at(i);
      rep.primes.push_back(q);
      rep.primes.push_back(r);
      check = mul_mod(check, mul_mod(q, r, p), p);
    }
  }
  if (check != a)
    throw VerificationFailureError("represent_with_chain: product mismatch for a=" +
                                   std::to_string(a));
  std::sort(rep.primes.begin(), rep.primes.end());
  return rep;
}

SmoothRepresentation represent_with_chain(const RepresentationChain& chain, u64 a) {
  DiscreteLogTable table(chain.g, chain.p);
  return represent_with_chain(chain, a, table);
}

// ---------------------------------------------------------------------------
// Range driver.
// ---------------------------------------------------------------------------

namespace {

PrimeVerifyResult verify_exceptional(u64 p, const Sieve& sieve,
                                     const VerifyOptions& opts) {
  PrimeVerifyResult res;
  res.p = p;
  res.method = VerifyMethod::brute;
  BruteForceSearcher searcher(p, sieve, opts.brute);
  for (u64 a = 0; a < p; ++a)
    if (!searcher.covered(a)) res.unrepresentable.push_back(a);
  res.outcome = res.unrepresentable.empty() ? VerifyOutcome::pass
                                            : VerifyOutcome::exception;
  return res;
}

PrimeVerifyResult verify_one(u64 p, VerifyMethod method, const Sieve& sieve,
                             const VerifyOptions& opts) {
  if (p == 5 || p == 7) return verify_exceptional(p, sieve, opts);

  PrimeVerifyResult res;
  res.p = p;
  VerifyMethod chosen = method;
  if (method == VerifyMethod::auto_select)
    chosen = p < opts.brute_threshold ? VerifyMethod::brute : VerifyMethod::chain;

  if (chosen == VerifyMethod::chain) {
    res.method = VerifyMethod::chain;
    try {
      RepresentationChain chain = build_chain(p, sieve, opts.chain);
      std::string why;
      if (!validate_chain(chain, &why)) {
        res.outcome = VerifyOutcome::failure;
        res.detail = "chain validation failed: " + why;
        return res;
      }
      res.outcome = VerifyOutcome::pass;
      if (opts.keep_certificates) res.certificate = std::move(chain);
      return res;
    } catch (const SearchExhaustedError& e) {
      if (method == VerifyMethod::chain) {
        res.outcome = VerifyOutcome::failure;
        res.detail = e.what();
        return res;
      }
      // auto mode falls back to brute force below
    } catch (const Error& e) {
      res.outcome = VerifyOutcome::failure;
      res.detail = e.what();
      return res;
    }
  }

  res.method = VerifyMethod::brute;
  try {
    BruteForceSearcher searcher(p, sieve, opts.brute);
    for (u64 a = 1; a < p; ++a) {
      if (!searcher.covered(a)) {
        res.outcome = VerifyOutcome::failure;
        res.detail = "class " + std::to_string(a) + " not covered";
        return res;
      }
    }
    res.outcome = VerifyOutcome::pass;
  } catch (const Error& e) {
    res.outcome = VerifyOutcome::failure;
    res.detail = e.what();
  }
  return res;
}

}  // namespace

VerifyReport verify_theorem_range(u64 lo, u64 hi, VerifyMethod method,
                                  unsigned workers, const Sieve& sieve,
                                  const VerifyOptions& opts) {
  if (lo < 2) lo = 2;
  if (lo > hi) throw UsageError("verify_theorem_range: lo > hi");

  std::vector<u64> primes;
  for_primes_in_range(lo, hi, [&](u64 p) { primes.push_back(p); });

  VerifyReport report;
  report.entries.resize(primes.size());
  if (primes.empty()) return report;

  if (workers <= 1 || primes.size() == 1) {
    for (std::size_t i = 0; i < primes.size(); ++i)
      report.entries[i] = verify_one(primes[i], method, sieve, opts);
    return report;
  }

  // contiguous blocks handed out through a shared cursor; slot-indexed
  // results keep the merged order independent of scheduling
  const std::size_t block = 16;
  const std::size_t nblocks = (primes.size() + block - 1) / block;
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t b = cursor.fetch_add(1);
      if (b >= nblocks) return;
      std::size_t begin = b * block, end = std::min(primes.size(), begin + block);
      for (std::size_t i = begin; i < end; ++i)
        report.entries[i] = verify_one(primes[i], method, sieve, opts);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return report;
}

}  // namespace smoothrep
