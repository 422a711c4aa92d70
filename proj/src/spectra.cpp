#include "smoothrep/spectra.hpp"

#include <cmath>
#include <numbers>
#include <queue>

#include "smoothrep/primality.hpp"

namespace smoothrep {

namespace {

struct HeapNode {
  u64 value;
  i64 max_index;  // position in the prime list of the largest factor, -1 for 1
  bool operator>(const HeapNode& o) const { return value > o.value; }
};

}  // namespace

CoverageTable smooth_coverage(u64 p, const Sieve& sieve, const HeapBudget& budget) {
  if (!is_prime_64(p)) throw UsageError("smooth_coverage: p must be prime");
  if (p > sieve.limit())
    throw UsageError("smooth_coverage: sieve limit below p");

  std::vector<u64> primes;  // primes <= p
  for (u64 q : sieve.primes()) {
    if (q > p) break;
    primes.push_back(q);
  }

  CoverageTable table;
  table.p = p;
  table.entries.resize(p);
  u64 covered = 0;

  // Tree enumeration: a node either extends with the next prime or bumps its
  // largest prime to the next one. Both successors exceed the parent, every
  // squarefree p-smooth number is reached exactly once, and the heap stays
  // proportional to the number of pops.
  std::priority_queue<HeapNode, std::vector<HeapNode>, std::greater<>> heap;
  heap.push({1, -1});
  u64 pops = 0;
  while (!heap.empty() && covered < p) {
    if (++pops > budget.max_pops)
      throw SearchExhaustedError("smooth_coverage: heap budget exceeded for p=" +
                                 std::to_string(p));
    auto [v, idx] = heap.top();
    heap.pop();
    u64 cls = v % p;
    if (!table.entries[cls].covered) {
      auto& e = table.entries[cls];
      e.covered = true;
      e.min_value = v;
      u64 rest = v;
      if (rest <= sieve.limit()) {
        while (rest > 1) {
          u64 q = sieve.spf(rest);
          e.primes.push_back(q);
          rest /= q;
        }
      } else {
        for (const auto& f : factorize(rest).factors)
          e.primes.push_back(f.prime.get_ui());
      }
      ++covered;
    }
    std::size_t next = static_cast<std::size_t>(idx + 1);
    if (next < primes.size()) {
      u64 q = primes[next];
      if (v <= budget.max_value / q)
        heap.push({v * q, static_cast<i64>(next)});
      if (idx >= 0) {
        u64 bumped = v / primes[idx];
        if (bumped <= budget.max_value / q)
          heap.push({bumped * q, static_cast<i64>(next)});
      }
    }
  }
  return table;
}

u64 compute_M(u64 p, const Sieve& sieve, const HeapBudget& budget) {
  CoverageTable table = smooth_coverage(p, sieve, budget);
  if (!table.complete()) {
    std::string missing;
    for (u64 a = 0; a < p; ++a)
      if (!table.entries[a].covered) missing += (missing.empty() ? "" : ",") + std::to_string(a);
    throw NotRepresentableError("M(" + std::to_string(p) +
                                "): class(es) " + missing + " unrepresentable");
  }
  return table.max_min_value();
}

u64 compute_y(u64 p, const Sieve& sieve, const YOptions& opts) {
  if (!is_prime_64(p)) throw UsageError("compute_y: p must be prime");
  std::vector<bool> reach(p, false);
  reach[1 % p] = true;
  u64 covered = 1;
  const u64 want = p - 1;  // nonzero classes
  if (covered >= want) return 1;  // p = 2: the class of 1 is the empty product

  u64 beyond = 0;
  for (u64 q : sieve.primes()) {
    if (q == p) continue;
    if (q > p && ++beyond > opts.primes_beyond_p)
      throw SearchExhaustedError("compute_y: cap reached for p=" + std::to_string(p));
    u64 rq = q % p;
    // fold q into the frontier: each prime multiplies the old frontier once
    std::vector<u64> additions;
    for (u64 v = 1; v < p; ++v) {
      if (!reach[v]) continue;
      u64 nv = mul_mod(v, rq, p);
      if (nv != 0 && !reach[nv]) additions.push_back(nv);
    }
    for (u64 nv : additions)
      if (!reach[nv]) {
        reach[nv] = true;
        ++covered;
      }
    if (covered >= want) return q;
  }
  throw SearchExhaustedError("compute_y: sieve exhausted for p=" + std::to_string(p));
}

DensityReport squarefree_density_check(u64 limit, const Sieve& sieve) {
  if (limit < 11) throw UsageError("squarefree_density_check: limit must be >= 11");
  if (limit > sieve.limit()) throw UsageError("squarefree_density_check: sieve too small");
  DensityReport report;
  report.limit = limit;
  u64 count = 0;  // squarefree j < n
  for (u64 n = 1; n <= limit; ++n) {
    if (n >= 2 && sieve.is_prime(n)) {
      ++report.primes_checked;
      if (88 * count < 53 * (n - 1)) report.violations.push_back({n, count});
    }
    if (sieve.squarefree(n)) ++count;
  }
  return report;
}

OmegaReport omega_bound_check(u64 limit, const Sieve& sieve) {
  if (limit < 7) throw UsageError("omega_bound_check: limit must be >= 7");
  if (limit > sieve.limit()) throw UsageError("omega_bound_check: sieve too small");
  OmegaReport report;
  report.limit = limit;
  report.six_is_witness = sieve.omega(6) > std::log(6.0);
  for (u64 n = 7; n <= limit; ++n)
    if (static_cast<double>(sieve.omega(n)) >= std::log(static_cast<double>(n)))
      report.violations.push_back(n);
  return report;
}

CharacterContext::CharacterContext(u64 p, u64 d) : p_(p), d_(d) {
  if (!is_prime_64(p)) throw UsageError("CharacterContext: p must be prime");
  if (d < 1 || (p - 1) % d != 0)
    throw UsageError("CharacterContext: d must divide p - 1");
  g_ = primitive_root(p);
  index_.assign(p, 0);
  u64 power = 1;
  for (u64 t = 0; t + 1 < p; ++t) {
    index_[power] = static_cast<u32>(t);
    power = mul_mod(power, g_, p);
  }
}

PvReport pv_partial_sum_check(u64 p, u64 d, const Sieve& sieve, const PvOptions& opts) {
  if (d < 2) throw UsageError("pv_partial_sum_check: d must exceed 1");
  if (p > opts.p_cap)
    throw UsageError("pv_partial_sum_check: p exceeds the small-p cap");
  CharacterContext chi(p, d);

  PvReport report;
  report.p = p;
  report.d = d;

  const double root = std::sqrt(static_cast<double>(p));
  const double logp = std::log(static_cast<double>(p));
  const double bound = root * (logp / (2 * std::numbers::pi) + 1.0);

  std::vector<double> re(d), im(d);
  for (u64 w = 0; w < d; ++w) {
    re[w] = std::cos(2 * std::numbers::pi * static_cast<double>(w) / static_cast<double>(d));
    im[w] = std::sin(2 * std::numbers::pi * static_cast<double>(w) / static_cast<double>(d));
  }

  const u64 ind_neg1 = chi.index(p - 1);  // (p-1)/2: chi^i even iff i*ind(-1) = 0 mod d
  for (u64 i = 1; i < d; ++i) {
    PvCharacterReport cr;
    cr.i = i;
    cr.bound = bound;
    cr.even_character = (i * ind_neg1) % d == 0;
    std::vector<u64> counts(d, 0);  // exact root-of-unity bookkeeping
    double max_abs = 0;
    for (u64 x = 1; x < p; ++x) {
      counts[chi.chi_class(x, i)] += 1;
      double sr = 0, si = 0;
      for (u64 w = 0; w < d; ++w) {
        if (counts[w] == 0) continue;
        sr += static_cast<double>(counts[w]) * re[w];
        si += static_cast<double>(counts[w]) * im[w];
      }
      max_abs = std::max(max_abs, std::hypot(sr, si));
    }
    cr.max_partial_sum = max_abs;
    cr.pass = max_abs <= bound + 1e-6;
    cr.halved_bound_holds = max_abs <= bound / 2 + 1e-6;
    report.characters.push_back(cr);
  }

  // Coset representatives: a squarefree j < p in every coset of H_{d,p}.
  std::vector<bool> coset_hit(d, false);
  for (u64 j = 1; j < p; ++j)
    if (sieve.squarefree(j)) coset_hit[chi.index(j) % d] = true;
  report.cosets_covered = true;
  for (u64 w = 0; w < d; ++w)
    if (!coset_hit[w]) report.cosets_covered = false;

  report.within_hypothesis = static_cast<double>(d) < logp + 1.0;
  report.bound_pass = true;
  for (const auto& cr : report.characters)
    if (!cr.pass) report.bound_pass = false;
  report.pass = report.bound_pass && (report.cosets_covered || !report.within_hypothesis);
  return report;
}

}  // namespace smoothrep
