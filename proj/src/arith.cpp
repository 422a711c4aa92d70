#include "smoothrep/arith.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "smoothrep/primality.hpp"

namespace smoothrep {

u64 pow_mod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

Residue mod_pow(u64 base, u64 exp, u64 m) {
  if (m < 2) throw UsageError("mod_pow: modulus must be >= 2");
  return Residue{pow_mod(base, exp, m), m};
}

Residue mod_inv(u64 a, u64 m) {
  if (m < 2) throw UsageError("mod_inv: modulus must be >= 2");
  a %= m;
  // extended Euclid tracking only the coefficient of a
  __int128 t = 0, new_t = 1;
  u64 r = m, new_r = a;
  while (new_r != 0) {
    u64 q = r / new_r;
    __int128 tmp_t = t - static_cast<__int128>(q) * new_t;
    t = new_t;
    new_t = tmp_t;
    u64 tmp_r = r - q * new_r;
    r = new_r;
    new_r = tmp_r;
  }
  if (r != 1)
    throw NotInvertibleError("mod_inv: gcd(" + std::to_string(a) + ", " +
                             std::to_string(m) + ") > 1");
  __int128 res = t % static_cast<__int128>(m);
  if (res < 0) res += m;
  return Residue{static_cast<u64>(res), m};
}

int jacobi(i64 a, u64 n) {
  if (n == 0 || n % 2 == 0)
    throw UsageError("jacobi: n must be odd and positive");
  __int128 v = a % static_cast<__int128>(n);
  if (v < 0) v += n;
  u64 x = static_cast<u64>(v);
  int t = 1;
  while (x != 0) {
    while (x % 2 == 0) {
      x /= 2;
      u64 r = n % 8;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(x, n);
    if (x % 4 == 3 && n % 4 == 3) t = -t;
    x %= n;
  }
  return n == 1 ? t : 0;
}

u64 sqrt_mod(u64 a, u64 p) {
  if (p < 3 || p % 2 == 0) throw UsageError("sqrt_mod: p must be an odd prime");
  a %= p;
  if (a == 0) return 0;
  if (jacobi(static_cast<i64>(a), p) == -1)
    throw NonResidueError("sqrt_mod: " + std::to_string(a) +
                          " is a non-residue mod " + std::to_string(p));
  u64 x;
  if (p % 4 == 3) {
    x = pow_mod(a, (p + 1) / 4, p);
  } else {
    // Tonelli-Shanks
    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
      q >>= 1;
      ++s;
    }
    u64 z = 2;
    while (jacobi(static_cast<i64>(z), p) != -1) ++z;
    u64 m = s;
    u64 c = pow_mod(z, q, p);
    u64 t = pow_mod(a, q, p);
    x = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
      u64 i = 0, t2 = t;
      while (t2 != 1) {
        t2 = mul_mod(t2, t2, p);
        ++i;
      }
      u64 b = c;
      for (u64 j = 0; j + i + 1 < m; ++j) b = mul_mod(b, b, p);
      m = i;
      c = mul_mod(b, b, p);
      t = mul_mod(t, c, p);
      x = mul_mod(x, b, p);
    }
  }
  return std::min(x, p - x);
}

// ---------------------------------------------------------------------------
// Sieve
// ---------------------------------------------------------------------------

Sieve::Sieve(u64 limit) : limit_(limit) {
  if (limit > 0xFFFFFFFFULL)
    throw UsageError("Sieve: limit above 2^32 not supported; use for_primes_in_range");
  spf_.assign(limit_ + 1 < 2 ? 2 : limit_ + 1, 0);
  for (u64 i = 2; i <= limit_; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<u32>(i);
      primes_.push_back(i);
    }
    for (u64 p : primes_) {
      if (p > spf_[i] || i * p > limit_) break;
      spf_[i * p] = static_cast<u32>(p);
    }
  }
}

bool Sieve::squarefree(u64 n) const {
  while (n > 1) {
    u64 p = spf_[n];
    n /= p;
    if (n % p == 0) return false;
  }
  return true;
}

unsigned Sieve::omega(u64 n) const {
  unsigned count = 0;
  while (n > 1) {
    u64 p = spf_[n];
    ++count;
    while (n % p == 0) n /= p;
  }
  return count;
}

u64 Sieve::next_prime_not_in(const std::vector<u64>& used) const {
  for (u64 p : primes_)
    if (!std::binary_search(used.begin(), used.end(), p)) return p;
  throw SearchExhaustedError("next_prime_not_in: sieve limit too small");
}

Sieve prime_sieve(u64 limit) { return Sieve(limit); }

void for_primes_in_range(u64 lo, u64 hi, const std::function<void(u64)>& fn) {
  if (hi < 2 || lo > hi) return;
  if (lo < 2) lo = 2;
  u64 root = static_cast<u64>(std::sqrt(static_cast<double>(hi))) + 2;
  Sieve base(root);
  const u64 block = 1u << 20;
  std::vector<bool> composite;
  for (u64 start = lo; start <= hi; start += block) {
    u64 end = std::min(hi, start + block - 1);
    composite.assign(end - start + 1, false);
    for (u64 p : base.primes()) {
      if (p * p > end) break;
      u64 first = std::max(p * p, (start + p - 1) / p * p);
      for (u64 v = first; v <= end; v += p) composite[v - start] = true;
    }
    for (u64 v = start; v <= end; ++v)
      if (!composite[v - start] && v >= 2) fn(v);
    if (end == hi) break;
  }
}

// ---------------------------------------------------------------------------
// Factoring engine: wheel trial division, then Pollard-rho (Brent) over a
// min-heap of pending cofactors. Deterministic given the budget.
// ---------------------------------------------------------------------------

namespace {

constexpr u64 kWheelDeltas[8] = {4, 2, 4, 2, 4, 6, 2, 6};

// Advances d over 2, 3, 5, 7, 11, 13, ... (mod-30 wheel; composites included
// past 7, which is harmless after smaller primes are stripped).
struct WheelIter {
  u64 d = 2;
  int phase = -3;  // -3,-2,-1 cover 2,3,5
  u64 next() {
    u64 cur = d;
    if (phase == -3) d = 3;
    else if (phase == -2) d = 5;
    else if (phase == -1) d = 7;
    else d += kWheelDeltas[phase & 7];
    ++phase;
    return cur;
  }
};

u64 rho_f(u64 x, u64 c, u64 n) {
  return (mul_mod(x, x, n) + c) % n;
}

// Brent's cycle variant; returns a nontrivial (possibly composite) factor of
// odd composite n, or nullopt when the shared budget runs out.
std::optional<u64> pollard_brent_u64(u64 n, u64& budget) {
  for (u64 c = 1;; c += 2) {
    if (budget == 0) return std::nullopt;
    u64 y = 2, g = 1, q = 1, x = 0, xs = 0;
    u64 r = 1;
    const u64 m = 128;
    while (g == 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) {
        if (budget == 0) return std::nullopt;
        --budget;
        y = rho_f(y, c, n);
      }
      u64 k = 0;
      while (k < r && g == 1) {
        xs = y;
        for (u64 i = 0; i < m && i < r - k; ++i) {
          if (budget == 0) return std::nullopt;
          --budget;
          y = rho_f(y, c, n);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      }
      r *= 2;
    }
    if (g == n) {
      do {
        if (budget == 0) return std::nullopt;
        --budget;
        xs = rho_f(xs, c, n);
        g = std::gcd(x > xs ? x - xs : xs - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

mpz_class rho_f_big(const mpz_class& x, u64 c, const mpz_class& n) {
  mpz_class y = x * x + c;
  return y % n;
}

std::optional<mpz_class> pollard_brent_big(const mpz_class& n, u64& budget) {
  mpz_class g, q, x, y, xs, diff;
  for (u64 c = 1;; c += 2) {
    if (budget == 0) return std::nullopt;
    y = 2;
    g = 1;
    q = 1;
    u64 r = 1;
    const u64 m = 128;
    while (g == 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) {
        if (budget == 0) return std::nullopt;
        --budget;
        y = rho_f_big(y, c, n);
      }
      u64 k = 0;
      while (k < r && g == 1) {
        xs = y;
        for (u64 i = 0; i < m && i < r - k; ++i) {
          if (budget == 0) return std::nullopt;
          --budget;
          y = rho_f_big(y, c, n);
          diff = x > y ? x - y : y - x;
          q = q * diff % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      }
      r *= 2;
    }
    if (g == n) {
      do {
        if (budget == 0) return std::nullopt;
        --budget;
        xs = rho_f_big(xs, c, n);
        diff = x > xs ? x - xs : xs - x;
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

bool fits_u64(const mpz_class& v) { return mpz_fits_ulong_p(v.get_mpz_t()); }

bool piece_is_prime(const mpz_class& v, const FactorBudget& cfg) {
  if (fits_u64(v)) return is_prime_64(v.get_ui());
  return is_probable_prime_big(v, cfg.prp_rounds, cfg.prp_seed);
}

// Core engine shared by factorize / smallest_prime_factor / find_prime_factor.
// Streams each certified prime factor (with multiplicity collapsed) through
// `accept` if given, stopping at the first acceptance. Returns the accepted
// prime; `out` always holds a coherent partial factorization on return.
std::optional<mpz_class> run_engine(const mpz_class& n, const FactorBudget& cfg,
                                    const std::function<bool(const mpz_class&)>* accept,
                                    PartialFactorization& out) {
  out.value = n;
  out.factors.clear();
  out.cofactor = 1;
  if (n <= 1) return std::nullopt;

  std::map<mpz_class, unsigned> found;
  auto flush = [&]() {
    out.factors.clear();
    for (auto& [p, e] : found) out.factors.push_back({p, e});
  };
  auto offer = [&](const mpz_class& p, unsigned e) -> bool {
    bool fresh = found.find(p) == found.end();
    found[p] += e;
    return accept && fresh && (*accept)(p);
  };

  mpz_class m = n;
  WheelIter wheel;
  const u64 trial_cap = std::min(cfg.trial_limit, u64{0xFFFFFFFF});
  u64 d = wheel.next();
  bool remainder_prime = false;
  while (m > 1 && d <= trial_cap) {
    if (mpz_cmp_ui(m.get_mpz_t(), d * d) < 0) {  // d^2 > m: remainder is prime
      remainder_prime = true;
      break;
    }
    if (mpz_divisible_ui_p(m.get_mpz_t(), d)) {
      unsigned e = 0;
      do {
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), d);
        ++e;
      } while (mpz_divisible_ui_p(m.get_mpz_t(), d));
      if (offer(mpz_class(d), e)) {
        flush();
        out.cofactor = m;
        return mpz_class(d);
      }
    }
    d = wheel.next();
  }

  if (m > 1 && remainder_prime) {
    if (offer(m, 1)) {
      flush();
      out.cofactor = 1;
      return m;
    }
    m = 1;
  }

  if (m > 1) {
    u64 budget = cfg.rho_iterations;
    // min-heap of pending cofactors (all composite or unexamined, > trial_limit^2 possible)
    std::vector<mpz_class> pending{m};
    auto heap_cmp = [](const mpz_class& a, const mpz_class& b) { return a > b; };
    while (!pending.empty()) {
      std::pop_heap(pending.begin(), pending.end(), heap_cmp);
      mpz_class c = pending.back();
      pending.pop_back();
      if (piece_is_prime(c, cfg)) {
        if (offer(c, 1)) {
          flush();
          for (auto& rest : pending) out.cofactor *= rest;
          return c;
        }
        continue;
      }
      std::optional<mpz_class> f;
      if (fits_u64(c)) {
        auto r = pollard_brent_u64(c.get_ui(), budget);
        if (r) f = mpz_class(*r);
      } else {
        f = pollard_brent_big(c, budget);
      }
      if (!f) {
        out.cofactor = c;
        for (auto& rest : pending) out.cofactor *= rest;
        flush();
        return std::nullopt;
      }
      mpz_class other = c / *f;
      pending.push_back(*f);
      std::push_heap(pending.begin(), pending.end(), heap_cmp);
      pending.push_back(other);
      std::push_heap(pending.begin(), pending.end(), heap_cmp);
    }
  }

  flush();
  return std::nullopt;
}

}  // namespace

mpz_class Factorization::product() const {
  if (is_zero) return 0;
  mpz_class acc = 1;
  for (const auto& f : factors)
    for (unsigned i = 0; i < f.exponent; ++i) acc *= f.prime;
  return acc;
}

bool Factorization::squarefree() const {
  for (const auto& f : factors)
    if (f.exponent > 1) return false;
  return true;
}

Factorization factorize(const mpz_class& n, const FactorBudget& budget) {
  if (n < 1) throw UsageError("factorize: n must be >= 1");
  PartialFactorization partial;
  run_engine(n, budget, nullptr, partial);
  if (!partial.complete())
    throw FactorBudgetError("factorize: budget exhausted on composite cofactor " +
                                partial.cofactor.get_str(),
                            partial);
  Factorization out;
  out.value = n;
  out.factors = std::move(partial.factors);
  return out;
}

Factorization factorize(u64 n, const FactorBudget& budget) {
  return factorize(mpz_class(static_cast<unsigned long>(n)), budget);
}

PartialFactorization try_factorize(const mpz_class& n, const FactorBudget& budget) {
  PartialFactorization partial;
  run_engine(n, budget, nullptr, partial);
  return partial;
}

mpz_class smallest_prime_factor(const mpz_class& n, const FactorBudget& budget) {
  if (n < 2) throw UsageError("smallest_prime_factor: n must be >= 2");
  // Fast path: the first trial-division hit is the answer.
  WheelIter wheel;
  const u64 trial_cap = std::min(budget.trial_limit, u64{0xFFFFFFFF});
  u64 d = wheel.next();
  while (d <= trial_cap) {
    if (mpz_cmp_ui(n.get_mpz_t(), d * d) < 0) return n;  // no divisor below sqrt(n)
    if (mpz_divisible_ui_p(n.get_mpz_t(), d)) return mpz_class(d);
    d = wheel.next();
  }
  if (piece_is_prime(n, budget)) return n;
  // No factor below the trial bound: the full factorization of the remainder
  // is needed to certify the minimum.
  PartialFactorization partial;
  run_engine(n, budget, nullptr, partial);
  if (!partial.complete())
    throw FactorBudgetError(
        "smallest_prime_factor: budget exhausted on " + partial.cofactor.get_str(),
        partial);
  return partial.factors.front().prime;
}

std::optional<mpz_class> find_prime_factor(
    const mpz_class& n, const std::function<bool(const mpz_class&)>& accept,
    const FactorBudget& budget) {
  if (n < 2) throw UsageError("find_prime_factor: n must be >= 2");
  PartialFactorization partial;
  auto got = run_engine(n, budget, &accept, partial);
  if (got) return got;
  if (!partial.complete())
    throw FactorBudgetError(
        "find_prime_factor: budget exhausted on " + partial.cofactor.get_str(),
        partial);
  return std::nullopt;
}

bool is_squarefree(u64 n, const Sieve* sieve) {
  if (n == 0) throw UsageError("is_squarefree: n must be >= 1");
  if (n == 1) return true;
  if (sieve && n <= sieve->limit()) return sieve->squarefree(n);
  return factorize(n).squarefree();
}

u64 primitive_root(u64 p, const FactorBudget& budget) {
  if (p == 2) return 1;
  Factorization f = factorize(p - 1, budget);
  std::vector<u64> qs;
  for (const auto& e : f.factors) qs.push_back(e.prime.get_ui());
  for (u64 g = 2; g < p; ++g) {
    // a primitive root is never a quadratic residue
    if (jacobi(static_cast<i64>(g), p) != -1) continue;
    bool ok = true;
    for (u64 q : qs) {
      if (pow_mod(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw VerificationFailureError("primitive_root: none found for " +
                                 std::to_string(p));
}

DiscreteLogTable::DiscreteLogTable(u64 g, u64 p) : g_(g % p), p_(p) {
  if (p < 2 || g_ == 0) throw UsageError("DiscreteLogTable: bad (g, p)");
  u64 order = p - 1;
  step_ = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(order))));
  if (step_ == 0) step_ = 1;
  baby_.reserve(step_);
  u64 val = 1;
  for (u64 j = 0; j < step_; ++j) {
    baby_.emplace_back(val, static_cast<u32>(j));
    val = mul_mod(val, g_, p_);
  }
  std::sort(baby_.begin(), baby_.end());
  giant_factor_ = pow_mod(mod_inv(g_, p_).value, step_, p_);
}

u64 DiscreteLogTable::log(u64 a) const {
  a %= p_;
  if (a == 0) throw UsageError("discrete_log: a must be nonzero mod p");
  u64 cur = a;
  u64 giants = (p_ - 1) / step_ + 1;
  for (u64 i = 0; i <= giants; ++i) {
    auto it = std::lower_bound(baby_.begin(), baby_.end(),
                               std::make_pair(cur, static_cast<u32>(0)));
    if (it != baby_.end() && it->first == cur) return i * step_ + it->second;
    cur = mul_mod(cur, giant_factor_, p_);
  }
  throw VerificationFailureError("discrete_log: " + std::to_string(a) +
                                 " not generated by " + std::to_string(g_) +
                                 " mod " + std::to_string(p_));
}

u64 discrete_log(u64 g, u64 a, u64 p) { return DiscreteLogTable(g, p).log(a); }

}  // namespace smoothrep
