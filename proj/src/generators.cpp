#include "smoothrep/generators.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <unordered_map>

#include "smoothrep/primality.hpp"

namespace smoothrep {

bool GeneratorState::contains(const mpz_class& p) const {
  return std::find(primes_.begin(), primes_.end(), p) != primes_.end();
}

void GeneratorState::append(StepRecord step) {
  primes_.push_back(step.prime);
  product_ *= step.prime;
  steps_.push_back(std::move(step));
}

// ---------------------------------------------------------------------------
// Meet-in-the-middle subset products.
// ---------------------------------------------------------------------------

std::optional<std::vector<u32>> subset_product_search(
    const std::vector<mpz_class>& primes, u64 target, u64 p,
    const SubsetOptions& opts) {
  if (p < 2) throw UsageError("subset_product_search: p must be >= 2");
  if (target == 0 || target >= p)
    throw UsageError("subset_product_search: target must lie in [1, p)");
  const std::size_t k = primes.size();
  if (k > opts.cap)
    throw CapExceededError("subset_product_search: " + std::to_string(k) +
                           " primes exceed cap " + std::to_string(opts.cap));

  std::vector<u64> res(k);
  for (std::size_t i = 0; i < k; ++i)
    res[i] = mpz_fdiv_ui(primes[i].get_mpz_t(), p);

  const std::size_t h = k / 2;  // left half [0, h), right half [h, k)
  std::vector<u64> left(std::size_t{1} << h);
  left[0] = 1 % p;
  for (u64 mask = 1; mask < left.size(); ++mask) {
    u64 low = mask & (~mask + 1);
    unsigned idx = std::countr_zero(low);
    left[mask] = mul_mod(left[mask ^ low], res[idx], p);
  }
  std::unordered_map<u64, u32> first_left;
  first_left.reserve(left.size() * 2);
  for (u64 mask = 0; mask < left.size(); ++mask)
    first_left.emplace(left[mask], static_cast<u32>(mask));  // smallest mask wins

  const std::size_t rbits = k - h;
  std::vector<u64> right(std::size_t{1} << rbits);
  right[0] = 1 % p;
  for (u64 mask = 1; mask < right.size(); ++mask) {
    u64 low = mask & (~mask + 1);
    unsigned idx = std::countr_zero(low);
    right[mask] = mul_mod(right[mask ^ low], res[h + idx], p);
  }
  for (u64 mask = 0; mask < right.size(); ++mask) {
    u64 pr = right[mask];
    if (pr == 0) continue;  // a prime equal to p can never help a nonzero target
    u64 need = mul_mod(target, mod_inv(pr, p).value, p);
    auto it = first_left.find(need);
    if (it == first_left.end()) continue;
    std::vector<u32> subset;
    for (unsigned i = 0; i < h; ++i)
      if (it->second >> i & 1) subset.push_back(i);
    for (unsigned j = 0; j < rbits; ++j)
      if (mask >> j & 1) subset.push_back(static_cast<u32>(h + j));
    return subset;
  }
  return std::nullopt;
}

namespace {

mpz_class subset_product(const std::vector<mpz_class>& primes,
                         const std::vector<u32>& subset) {
  mpz_class d = 1;
  for (u32 i : subset) d *= primes.at(i);
  return d;
}

bool prime_check(const mpz_class& v, const FactorBudget& budget = {}) {
  if (mpz_fits_ulong_p(v.get_mpz_t())) return is_prime_64(v.get_ui());
  return is_probable_prime_big(v, budget.prp_rounds, budget.prp_seed);
}

u64 least_absent_prime(const GeneratorState& state, const Sieve& sieve) {
  std::vector<u64> small;
  for (const auto& q : state.primes())
    if (mpz_fits_ulong_p(q.get_mpz_t())) small.push_back(q.get_ui());
  std::sort(small.begin(), small.end());
  return sieve.next_prime_not_in(small);
}

// ---------------------------------------------------------------------------
// Mullin stepping.
// ---------------------------------------------------------------------------

// Smallest prime factor of v by ascending scan, with just enough extra
// information to make the choice independently checkable.
std::optional<std::pair<mpz_class, MullinCert>> mullin_step(
    const mpz_class& v, const FactorBudget& budget, std::string* stop_reason) {
  MullinCert cert;
  cert.value = v;
  const u64 cap = std::min(budget.trial_limit, u64{0xFFFFFFFF});
  bool remainder_prime = false;
  u64 hit = 0;
  for (u64 d = 2; d <= cap; d = (d == 2 ? 3 : d + 2)) {
    if (mpz_cmp_ui(v.get_mpz_t(), d * d) < 0) {
      remainder_prime = true;
      break;
    }
    if (mpz_divisible_ui_p(v.get_mpz_t(), d)) {
      hit = d;
      break;
    }
  }
  if (hit != 0) {
    mpz_class m = v;
    unsigned e = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), hit)) {
      mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), hit);
      ++e;
    }
    cert.factors = {{mpz_class(hit), e}};
    cert.cofactor = m;
    return std::make_pair(mpz_class(hit), cert);
  }
  if (remainder_prime || prime_check(v, budget)) {
    cert.factors = {{v, 1}};
    cert.cofactor = 1;
    return std::make_pair(v, cert);
  }
  // No factor below the trial bound: only a complete factorization can
  // certify the minimum.
  PartialFactorization pf = try_factorize(v, budget);
  if (!pf.complete()) {
    if (stop_reason)
      *stop_reason = "factor budget exhausted on composite " + pf.cofactor.get_str();
    return std::nullopt;
  }
  cert.factors = pf.factors;
  cert.cofactor = 1;
  return std::make_pair(pf.factors.front().prime, cert);
}

}  // namespace

bool step_mullin(GeneratorState& state, const FactorBudget& budget,
                 std::string* reason) {
  mpz_class v = state.product() + 1;
  auto got = mullin_step(v, budget, reason);
  if (!got) return false;
  state.append({Rule::mullin, got->first, got->second});
  return true;
}

RunResult run_mullin(unsigned k, const FactorBudget& budget) {
  RunResult run;
  for (unsigned step = 0; step < k; ++step) {
    std::string reason;
    if (!step_mullin(run.state, budget, &reason)) {
      run.completed = false;
      run.stop_reason = reason;
      return run;
    }
  }
  return run;
}

std::vector<mpz_class> mullin_sequence(unsigned k, const FactorBudget& budget) {
  RunResult run = run_mullin(k, budget);
  if (!run.completed)
    throw FactorBudgetError("mullin_sequence: " + run.stop_reason,
                            PartialFactorization{});
  return run.state.primes();
}

// ---------------------------------------------------------------------------
// The d+1 generator.
// ---------------------------------------------------------------------------

namespace {

struct LiteralChoice {
  mpz_class q;
  mpz_class d;
  std::vector<u32> subset;
};

// The literal rule: minimum prime q with q ∤ n and q | d+1 over all d | n.
// Feasible only while the state is tiny; n is squarefree, so divisors are
// exactly the subset products.
LiteralChoice literal_d_plus_one(const GeneratorState& state) {
  const auto& primes = state.primes();
  LiteralChoice best;
  for (u64 mask = 0; mask < (u64{1} << primes.size()); ++mask) {
    std::vector<u32> subset;
    for (std::size_t i = 0; i < primes.size(); ++i)
      if (mask >> i & 1) subset.push_back(static_cast<u32>(i));
    mpz_class d = subset_product(primes, subset);
    for (const auto& e : factorize(d + 1).factors) {
      if (state.contains(e.prime)) continue;
      if (best.q == 0 || e.prime < best.q || (e.prime == best.q && d < best.d)) {
        best = {e.prime, d, subset};
      }
    }
  }
  return best;
}

constexpr unsigned kDPlusOneLiteralSteps = 4;

}  // namespace

bool step_d_plus_one(GeneratorState& state, const Sieve& sieve,
                     const SubsetOptions& subset_opts, std::string* reason) {
  if (state.steps().size() < kDPlusOneLiteralSteps) {
    LiteralChoice choice = literal_d_plus_one(state);
    DPlusOneCert cert{true, std::move(choice.subset), std::move(choice.d)};
    state.append({Rule::d_plus_one, choice.q, std::move(cert)});
    return true;
  }
  // From here the sequence provably emits the least absent prime; the step
  // certificate is a divisor d = -1 (mod p).
  u64 p = least_absent_prime(state, sieve);
  std::optional<std::vector<u32>> subset;
  try {
    subset = subset_product_search(state.primes(), p - 1, p, subset_opts);
  } catch (const CapExceededError& e) {
    if (reason) *reason = e.what();
    return false;
  }
  if (!subset)
    throw VerificationFailureError("d_plus_one: no divisor of n is -1 mod " +
                                   std::to_string(p));
  mpz_class d = subset_product(state.primes(), *subset);
  DPlusOneCert cert{false, std::move(*subset), std::move(d)};
  state.append({Rule::d_plus_one, mpz_class(static_cast<unsigned long>(p)),
                std::move(cert)});
  return true;
}

RunResult run_d_plus_one(unsigned k, const Sieve& sieve,
                         const SubsetOptions& subset_opts) {
  RunResult run;
  while (run.state.steps().size() < k) {
    std::string reason;
    if (!step_d_plus_one(run.state, sieve, subset_opts, &reason)) {
      run.completed = false;
      run.stop_reason = reason;
      return run;
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// The d+n/d generator.
// ---------------------------------------------------------------------------

namespace {

struct BootstrapChoice {
  std::vector<u32> subset;
  unsigned long chosen;
};

// Fixed divisor choices producing the prefix 2, 3, 5, 13, 7; stored as data
// and replay-validated like every other step.
const std::array<BootstrapChoice, 5> kDndBootstrap = {{
    {{}, 2},   // n = 1:   d = 1, 1 + 1 = 2
    {{}, 3},   // n = 2:   d = 1, 1 + 2 = 3
    {{0}, 5},  // n = 6:   d = 2, 2 + 3 = 5
    {{1}, 13}, // n = 30:  d = 3, 3 + 10 = 13
    {{1}, 7},  // n = 390: d = 3, 3 + 130 = 133 = 7 * 19
}};

}  // namespace

bool step_d_plus_n_over_d(GeneratorState& state, const Sieve& sieve,
                          const DndPolicy& policy, const FactorBudget& budget,
                          const SubsetOptions& subset_opts, std::string* reason) {
  const std::size_t step = state.steps().size();
  if (step < kDndBootstrap.size()) {
    const auto& boot = kDndBootstrap[step];
    DndCert cert;
    cert.branch = DndCert::Branch::bootstrap;
    cert.subset = boot.subset;
    cert.d = subset_product(state.primes(), boot.subset);
    mpz_class quotient = state.product() / cert.d;
    cert.value = cert.d + quotient;
    state.append({Rule::d_plus_n_over_d, mpz_class(boot.chosen), std::move(cert)});
    return true;
  }

  const u64 p = least_absent_prime(state, sieve);
  const mpz_class& n = state.product();
  const u64 nm = mpz_fdiv_ui(n.get_mpz_t(), p);
  const u64 neg = (p - nm) % p;

  DndCert cert;
  cert.target = p;
  mpz_class chosen;
  try {
    if (jacobi(static_cast<i64>(neg), p) == 1) {
      // a + n/a = 0 has a solution: any divisor in the class of a hands us p
      cert.branch = DndCert::Branch::sqrt_residue;
      cert.a = sqrt_mod(neg, p);
      auto subset = subset_product_search(state.primes(), cert.a, p, subset_opts);
      if (!subset)
        throw VerificationFailureError(
            "d_plus_n_over_d: no divisor in class " + std::to_string(cert.a) +
            " mod " + std::to_string(p));
      cert.subset = std::move(*subset);
      cert.d = subset_product(state.primes(), cert.subset);
      cert.value = cert.d + n / cert.d;
      if (!mpz_divisible_ui_p(cert.value.get_mpz_t(), p))
        throw VerificationFailureError("d_plus_n_over_d: p does not divide d + n/d");
      chosen = static_cast<unsigned long>(p);
    } else {
      // pull in an intermediate prime q with (q/p) = -1; p follows next step
      cert.branch = DndCert::Branch::nonresidue;
      u64 a = 0;
      for (u64 cand = 1; cand < p; ++cand) {
        u64 w = (cand + mul_mod(nm, mod_inv(cand, p).value, p)) % p;
        if (w != 0 && jacobi(static_cast<i64>(w), p) == -1) {
          a = cand;
          break;
        }
      }
      if (a == 0)
        throw VerificationFailureError(
            "d_plus_n_over_d: no class a with ((a + n/a)/p) = -1 for p = " +
            std::to_string(p));
      cert.a = a;
      auto subset = subset_product_search(state.primes(), a, p, subset_opts);
      if (!subset)
        throw VerificationFailureError(
            "d_plus_n_over_d: no divisor in class " + std::to_string(a) +
            " mod " + std::to_string(p));
      cert.subset = std::move(*subset);
      cert.d = subset_product(state.primes(), cert.subset);
      cert.value = cert.d + n / cert.d;
      auto accept = [&](const mpz_class& f) {
        if (jacobi(static_cast<i64>(mpz_fdiv_ui(f.get_mpz_t(), p)), p) != -1)
          return false;
        return policy.accept_factor ? policy.accept_factor(f, p) : true;
      };
      auto q = find_prime_factor(cert.value, accept, budget);
      if (!q)
        throw VerificationFailureError(
            "d_plus_n_over_d: no prime factor of d + n/d has (q/p) = -1");
      if (state.contains(*q))
        throw VerificationFailureError("d_plus_n_over_d: factor already generated");
      chosen = *q;
    }
  } catch (const FactorBudgetError& e) {
    if (reason) *reason = e.what();
    return false;
  } catch (const CapExceededError& e) {
    if (reason) *reason = e.what();
    return false;
  }
  state.append({Rule::d_plus_n_over_d, std::move(chosen), std::move(cert)});
  return true;
}

RunResult run_d_plus_n_over_d(unsigned k, const Sieve& sieve,
                              const DndPolicy& policy, const FactorBudget& budget,
                              const SubsetOptions& subset_opts) {
  RunResult run;
  while (run.state.steps().size() < k) {
    std::string reason;
    if (!step_d_plus_n_over_d(run.state, sieve, policy, budget, subset_opts,
                              &reason)) {
      run.completed = false;
      run.stop_reason = reason;
      return run;
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Replay validation.
// ---------------------------------------------------------------------------

namespace {

struct ReplayContext {
  const Sieve& sieve;
  const GeneratorState& prefix;
  std::string why;

  bool fail(const std::string& msg) {
    why = msg;
    return false;
  }
};

bool replay_mullin(ReplayContext& ctx, const StepRecord& step) {
  const auto* cert = std::get_if<MullinCert>(&step.certificate);
  if (!cert) return ctx.fail("wrong certificate type");
  mpz_class v = ctx.prefix.product() + 1;
  if (cert->value != v) return ctx.fail("certificate value is not 1 + n");
  mpz_class acc = cert->cofactor;
  for (const auto& e : cert->factors) {
    if (!prime_check(e.prime)) return ctx.fail("listed factor is not prime");
    for (unsigned i = 0; i < e.exponent; ++i) acc *= e.prime;
  }
  if (acc != v) return ctx.fail("factors do not reproduce 1 + n");
  if (cert->factors.empty() || step.prime != cert->factors.front().prime)
    return ctx.fail("chosen prime is not the least listed factor");
  for (const auto& e : cert->factors)
    if (e.prime < step.prime) return ctx.fail("smaller listed factor exists");
  // minimality: with an incomplete cofactor the choice must be justified by
  // ascending trial division
  if (cert->cofactor != 1) {
    if (!mpz_fits_ulong_p(step.prime.get_mpz_t()))
      return ctx.fail("incomplete factorization with oversized smallest factor");
    u64 s = step.prime.get_ui();
    for (u64 d = 2; d < s; d = (d == 2 ? 3 : d + 2))
      if (mpz_divisible_ui_p(v.get_mpz_t(), d))
        return ctx.fail("trial division finds a smaller factor");
  }
  return true;
}

bool replay_d_plus_one(ReplayContext& ctx, const StepRecord& step) {
  const auto* cert = std::get_if<DPlusOneCert>(&step.certificate);
  if (!cert) return ctx.fail("wrong certificate type");
  const auto& primes = ctx.prefix.primes();
  for (std::size_t i = 0; i < cert->subset.size(); ++i) {
    if (cert->subset[i] >= primes.size()) return ctx.fail("subset index out of range");
    if (i && cert->subset[i] <= cert->subset[i - 1])
      return ctx.fail("subset indices not strictly increasing");
  }
  if (subset_product(primes, cert->subset) != cert->d)
    return ctx.fail("subset does not multiply to d");
  if (!mpz_divisible_p(mpz_class(cert->d + 1).get_mpz_t(), step.prime.get_mpz_t()))
    return ctx.fail("chosen prime does not divide d + 1");
  if (!prime_check(step.prime)) return ctx.fail("chosen value is not prime");
  if (ctx.prefix.contains(step.prime)) return ctx.fail("prime already generated");

  if (cert->literal_scan) {
    LiteralChoice expect = literal_d_plus_one(ctx.prefix);
    if (expect.q != step.prime)
      return ctx.fail("literal divisor scan disagrees with chosen prime");
  } else {
    u64 p = least_absent_prime(ctx.prefix, ctx.sieve);
    if (mpz_cmp_ui(step.prime.get_mpz_t(), p) != 0)
      return ctx.fail("chosen prime is not the least absent prime");
  }
  return true;
}

bool replay_dnd(ReplayContext& ctx, const StepRecord& step) {
  const auto* cert = std::get_if<DndCert>(&step.certificate);
  if (!cert) return ctx.fail("wrong certificate type");
  const auto& primes = ctx.prefix.primes();
  const mpz_class& n = ctx.prefix.product();
  for (std::size_t i = 0; i < cert->subset.size(); ++i) {
    if (cert->subset[i] >= primes.size()) return ctx.fail("subset index out of range");
    if (i && cert->subset[i] <= cert->subset[i - 1])
      return ctx.fail("subset indices not strictly increasing");
  }
  if (subset_product(primes, cert->subset) != cert->d)
    return ctx.fail("subset does not multiply to d");
  if (!mpz_divisible_p(n.get_mpz_t(), cert->d.get_mpz_t()))
    return ctx.fail("d does not divide n");
  if (cert->value != cert->d + n / cert->d) return ctx.fail("value is not d + n/d");
  if (!mpz_divisible_p(cert->value.get_mpz_t(), step.prime.get_mpz_t()))
    return ctx.fail("chosen prime does not divide d + n/d");
  if (!prime_check(step.prime)) return ctx.fail("chosen value is not prime");
  if (ctx.prefix.contains(step.prime)) return ctx.fail("prime already generated");

  if (cert->branch == DndCert::Branch::bootstrap) return true;

  u64 p = least_absent_prime(ctx.prefix, ctx.sieve);
  if (cert->target != p) return ctx.fail("target is not the least absent prime");
  u64 nm = mpz_fdiv_ui(n.get_mpz_t(), p);
  u64 neg = (p - nm) % p;
  if (cert->a == 0 || cert->a >= p) return ctx.fail("class a out of range");
  if (mpz_fdiv_ui(cert->d.get_mpz_t(), p) != cert->a)
    return ctx.fail("d is not in class a");

  if (cert->branch == DndCert::Branch::sqrt_residue) {
    if (jacobi(static_cast<i64>(neg), p) != 1)
      return ctx.fail("sqrt branch taken but -n is a nonresidue");
    if (mul_mod(cert->a, cert->a, p) != neg)
      return ctx.fail("a^2 is not -n mod p");
    if (mpz_cmp_ui(step.prime.get_mpz_t(), p) != 0)
      return ctx.fail("sqrt branch must take the target prime");
  } else {
    if (jacobi(static_cast<i64>(neg), p) != -1)
      return ctx.fail("nonresidue branch taken but -n is a residue");
    u64 w = (cert->a + mul_mod(nm, mod_inv(cert->a, p).value, p)) % p;
    if (w == 0 || jacobi(static_cast<i64>(w), p) != -1)
      return ctx.fail("((a + n/a)/p) is not -1");
    u64 qr = mpz_fdiv_ui(step.prime.get_mpz_t(), p);
    if (jacobi(static_cast<i64>(qr), p) != -1)
      return ctx.fail("chosen factor is not a nonresidue mod the target");
  }
  return true;
}

}  // namespace

ReplayResult replay_validate(const GeneratorState& state, const Sieve& sieve) {
  GeneratorState prefix;
  for (std::size_t i = 0; i < state.steps().size(); ++i) {
    const StepRecord& step = state.steps()[i];
    ReplayContext ctx{sieve, prefix, {}};
    bool ok = false;
    switch (step.rule) {
      case Rule::mullin: ok = replay_mullin(ctx, step); break;
      case Rule::d_plus_one: ok = replay_d_plus_one(ctx, step); break;
      case Rule::d_plus_n_over_d: ok = replay_dnd(ctx, step); break;
    }
    if (ok && prefix.contains(step.prime)) {
      ok = false;
      ctx.why = "prime already generated";
    }
    if (!ok) return {false, i, ctx.why};
    prefix.append(step);
  }
  // the state must be exactly the replayed prefix
  if (prefix.primes() != state.primes())
    return {false, state.steps().size(), "primes do not match the step log"};
  if (prefix.product() != state.product())
    return {false, state.steps().size(), "product does not match the step log"};
  return {};
}

}  // namespace smoothrep
