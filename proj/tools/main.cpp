// Command-line front end: every capability behind one binary with
// machine-readable output (JSON lines; CSV where tabular).
//
// Exit codes: 0 success, 1 mathematical failure, 2 usage error,
// 3 budget/search exhaustion.
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "smoothrep/generators.hpp"
#include "smoothrep/primality.hpp"
#include "smoothrep/represent.hpp"
#include "smoothrep/serialize.hpp"
#include "smoothrep/spectra.hpp"

using namespace smoothrep;

namespace {

u64 env_u64(const char* name, u64 fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  return std::strtoull(v, nullptr, 10);
}

FactorBudget budget_from_env(u64 seed) {
  FactorBudget b;
  b.trial_limit = env_u64("SMOOTHREP_TRIAL_LIMIT", b.trial_limit);
  b.rho_iterations = env_u64("SMOOTHREP_RHO_ITERS", b.rho_iterations);
  b.prp_rounds = static_cast<unsigned>(env_u64("SMOOTHREP_PRP_ROUNDS", b.prp_rounds));
  b.prp_seed = seed;
  return b;
}

SubsetOptions subset_from_env() {
  SubsetOptions s;
  s.cap = env_u64("SMOOTHREP_SUBSET_CAP", s.cap);
  return s;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::usage: return 2;
    case ErrorKind::search_exhausted:
    case ErrorKind::factor_budget:
    case ErrorKind::cap_exceeded: return 3;
    default: return 1;
  }
}

const char* error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "UsageError";
    case ErrorKind::not_invertible: return "NotInvertible";
    case ErrorKind::non_residue: return "NonResidue";
    case ErrorKind::not_representable: return "NotRepresentable";
    case ErrorKind::not_found: return "NotFound";
    case ErrorKind::verification_failure: return "VerificationFailure";
    case ErrorKind::search_exhausted: return "SearchExhausted";
    case ErrorKind::factor_budget: return "FactorBudgetExceeded";
    case ErrorKind::cap_exceeded: return "CapExceeded";
  }
  return "Error";
}

json error_json(const Error& e) {
  json j;
  j["error"] = error_name(e.kind());
  j["message"] = e.what();
  return j;
}

unsigned default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n ? n : 1;
}

struct VerifyArgs {
  u64 from = 2, to = 10000;
  std::string method = "auto";
  unsigned threads = default_threads();
  bool certs = false;
};

int run_verify(const VerifyArgs& args) {
  VerifyMethod method = VerifyMethod::auto_select;
  if (args.method == "brute") method = VerifyMethod::brute;
  else if (args.method == "chain") method = VerifyMethod::chain;

  u64 sieve_limit = 2'000'000;
  if (method == VerifyMethod::brute || (method == VerifyMethod::auto_select && args.to < 10'000))
    sieve_limit = std::max(sieve_limit, args.to + 1);
  Sieve sieve(sieve_limit);

  VerifyOptions opts;
  opts.keep_certificates = args.certs;
  opts.brute.scan_cap = env_u64("SMOOTHREP_SCAN_CAP", opts.brute.scan_cap);
  opts.chain.q_scan_count = env_u64("SMOOTHREP_QSCAN_COUNT", opts.chain.q_scan_count);

  // chunked so opt-in runs over very large ranges stream with bounded memory
  const u64 chunk = 1'000'000;
  bool all_ok = true;
  u64 lo = args.from;
  for (;;) {
    u64 hi = (args.to - lo >= chunk) ? lo + chunk - 1 : args.to;
    VerifyReport report = verify_theorem_range(lo, hi, method, args.threads, sieve, opts);
    for (const auto& entry : report.entries)
      std::cout << to_json(entry, args.certs).dump() << '\n';
    if (!report.all_ok()) all_ok = false;
    if (hi == args.to) break;
    lo = hi + 1;
  }
  return all_ok ? 0 : 1;
}

struct RepresentArgs {
  u64 p = 11, a = 1;
  std::string method = "auto";
};

int run_represent(const RepresentArgs& args) {
  if (!is_prime_64(args.p)) throw UsageError("p must be prime");
  const u64 a = args.a % args.p;
  SmoothRepresentation rep;
  if (a == 0) {
    rep.p = args.p;
    rep.a = 0;
    rep.primes = {args.p};
  } else {
    bool brute = args.method == "brute" ||
                 (args.method == "auto" && args.p < 10'000);
    if (brute) {
      Sieve sieve(std::max<u64>(2'000'000, args.p + 1));
      BruteOptions opts;
      opts.scan_cap = env_u64("SMOOTHREP_SCAN_CAP", opts.scan_cap);
      rep = brute_force_representative(args.p, a, sieve, opts);
    } else {
      Sieve sieve(2'000'000);
      ChainOptions opts;
      opts.q_scan_count = env_u64("SMOOTHREP_QSCAN_COUNT", opts.q_scan_count);
      RepresentationChain chain = build_chain(args.p, sieve, opts);
      rep = represent_with_chain(chain, a);
    }
  }
  std::cout << to_json(rep).dump() << '\n';
  return 0;
}

struct ChainArgs {
  u64 p = 10007;
};

int run_chain(const ChainArgs& args) {
  if (!is_prime_64(args.p)) throw UsageError("p must be prime");
  Sieve sieve(2'000'000);
  ChainOptions opts;
  opts.q_scan_count = env_u64("SMOOTHREP_QSCAN_COUNT", opts.q_scan_count);
  RepresentationChain chain = build_chain(args.p, sieve, opts);
  std::string why;
  if (!validate_chain(chain, &why))
    throw VerificationFailureError("chain validation failed: " + why);
  std::cout << to_json(chain).dump() << '\n';
  return 0;
}

struct StatArgs {
  u64 p = 0;       // single-prime mode when nonzero
  u64 from = 0, to = 0;
  bool csv = false;
  unsigned threads = default_threads();
};

template <typename Fn>
int run_stat_batch(const StatArgs& args, u64 sieve_slack, const char* csv_header,
                   Fn&& row_for) {
  std::vector<u64> ps;
  if (args.p) {
    if (!is_prime_64(args.p)) throw UsageError("p must be prime");
    ps.push_back(args.p);
  } else {
    if (args.to < args.from) throw UsageError("--to must be >= --from");
    for_primes_in_range(args.from, args.to, [&](u64 p) { ps.push_back(p); });
  }
  u64 maxp = 0;
  for (u64 p : ps) maxp = std::max(maxp, p);
  Sieve sieve(std::max<u64>(2'000'000, maxp + sieve_slack));

  std::vector<std::pair<std::string, std::string>> rows(ps.size());  // json, csv
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= ps.size()) return;
      rows[i] = row_for(ps[i], sieve);
    }
  };
  unsigned workers = std::min<std::size_t>(args.threads, ps.size());
  if (workers > 1) {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  } else {
    worker();
  }

  if (args.csv) std::cout << csv_header << '\n';
  int rc = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [j, c] = rows[i];
    if (args.csv) {
      if (!c.empty()) std::cout << c << '\n';
    } else {
      std::cout << j << '\n';
    }
    if (args.p && c.empty()) rc = 1;  // single-prime mode surfaces the error
  }
  return rc;
}

int run_mp(const StatArgs& args) {
  HeapBudget budget;
  budget.max_pops = env_u64("SMOOTHREP_HEAP_POPS", budget.max_pops);
  return run_stat_batch(args, 1, "p,M,ratio", [&](u64 p, const Sieve& sieve) {
    json j;
    j["p"] = std::to_string(p);
    try {
      u64 m = compute_M(p, sieve, budget);
      j["M"] = std::to_string(m);
      double ratio = static_cast<double>(m) / static_cast<double>(p);
      j["ratio"] = format_ratio(ratio);
      return std::make_pair(j.dump(), std::to_string(p) + "," + std::to_string(m) +
                                          "," + format_ratio(ratio));
    } catch (const Error& e) {
      j["error"] = error_name(e.kind());
      return std::make_pair(j.dump(), std::string{});
    }
  });
}

int run_yp(const StatArgs& args) {
  YOptions opts;
  opts.primes_beyond_p = env_u64("SMOOTHREP_Y_BEYOND", opts.primes_beyond_p);
  return run_stat_batch(args, 100'000, "p,y", [&](u64 p, const Sieve& sieve) {
    json j;
    j["p"] = std::to_string(p);
    try {
      u64 y = compute_y(p, sieve, opts);
      j["y"] = std::to_string(y);
      return std::make_pair(j.dump(), std::to_string(p) + "," + std::to_string(y));
    } catch (const Error& e) {
      j["error"] = error_name(e.kind());
      return std::make_pair(j.dump(), std::string{});
    }
  });
}

struct GenArgs {
  std::string kind;
  unsigned steps = 10;
  std::string checkpoint;
  u64 seed = 0;
};

int run_gen(const GenArgs& args) {
  Sieve sieve(2'000'000);
  FactorBudget budget = budget_from_env(args.seed);
  SubsetOptions subset = subset_from_env();
  DndPolicy policy;

  Rule rule;
  if (args.kind == "mullin") rule = Rule::mullin;
  else if (args.kind == "d1") rule = Rule::d_plus_one;
  else if (args.kind == "dnd") rule = Rule::d_plus_n_over_d;
  else throw UsageError("gen expects one of: mullin, d1, dnd");

  GeneratorState state;
  const bool use_checkpoint = !args.checkpoint.empty();
  if (use_checkpoint && std::filesystem::exists(args.checkpoint)) {
    state = load_checkpoint(args.checkpoint);
    for (const auto& step : state.steps())
      if (step.rule != rule)
        throw UsageError("checkpoint was produced by a different generator");
    ReplayResult replay = replay_validate(state, sieve);
    if (!replay.ok)
      throw VerificationFailureError("checkpoint fails replay at step " +
                                     std::to_string(replay.failed_step) + ": " +
                                     replay.why);
  } else if (use_checkpoint) {
    std::ofstream touch(args.checkpoint);  // start a fresh log
    if (!touch) throw UsageError("cannot create checkpoint file " + args.checkpoint);
  }

  for (const auto& step : state.steps())
    std::cout << to_json(step).dump() << '\n';

  while (state.steps().size() < args.steps) {
    std::string reason;
    bool ok = false;
    switch (rule) {
      case Rule::mullin: ok = step_mullin(state, budget, &reason); break;
      case Rule::d_plus_one: ok = step_d_plus_one(state, sieve, subset, &reason); break;
      case Rule::d_plus_n_over_d:
        ok = step_d_plus_n_over_d(state, sieve, policy, budget, subset, &reason);
        break;
    }
    if (!ok) {
      json j;
      j["status"] = "stopped";
      j["reason"] = reason;
      j["steps"] = std::to_string(state.steps().size());
      std::cout << j.dump() << '\n';
      return 3;
    }
    std::cout << to_json(state.steps().back()).dump() << '\n';
    if (use_checkpoint) append_checkpoint_line(state.steps().back(), args.checkpoint);
  }
  return 0;
}

struct CheckArgs {
  std::string kind;
  u64 limit = 1'000'000;
  u64 p = 0, d = 0;
  u64 sweep_to = 0, dmax = 10;
};

int run_check(const CheckArgs& args) {
  if (args.kind == "density") {
    Sieve sieve(std::max<u64>(args.limit, 2'000'000));
    DensityReport report = squarefree_density_check(args.limit, sieve);
    std::cout << to_json(report).dump() << '\n';
    return report.violations.empty() ? 0 : 1;
  }
  if (args.kind == "omega") {
    Sieve sieve(std::max<u64>(args.limit, 2'000'000));
    OmegaReport report = omega_bound_check(args.limit, sieve);
    std::cout << to_json(report).dump() << '\n';
    return report.violations.empty() ? 0 : 1;
  }
  if (args.kind == "pv") {
    Sieve sieve(2'000'000);
    PvOptions opts;
    bool all_pass = true;
    if (args.sweep_to) {
      std::vector<u64> ps;
      for_primes_in_range(3, args.sweep_to, [&](u64 p) { ps.push_back(p); });
      for (u64 p : ps)
        for (u64 d = 2; d <= args.dmax; ++d) {
          if ((p - 1) % d != 0) continue;
          PvReport report = pv_partial_sum_check(p, d, sieve, opts);
          std::cout << to_json(report).dump() << '\n';
          if (!report.pass) all_pass = false;
        }
      return all_pass ? 0 : 1;
    }
    if (!args.p || !args.d) throw UsageError("check pv needs -p and -d (or --to)");
    PvReport report = pv_partial_sum_check(args.p, args.d, sieve, opts);
    std::cout << to_json(report).dump() << '\n';
    return report.pass ? 0 : 1;
  }
  throw UsageError("check expects one of: density, omega, pv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "smoothrep: squarefree smooth residue representations and Euclidean "
      "prime generators"};
  app.require_subcommand(1);
  app.footer(
      "Budget environment overrides: SMOOTHREP_TRIAL_LIMIT, SMOOTHREP_RHO_ITERS,\n"
      "SMOOTHREP_PRP_ROUNDS, SMOOTHREP_SCAN_CAP, SMOOTHREP_QSCAN_COUNT,\n"
      "SMOOTHREP_SUBSET_CAP, SMOOTHREP_HEAP_POPS, SMOOTHREP_Y_BEYOND");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand(
      "verify", "verify the representability of every class for primes in a range");
  verify->add_option("--from", verify_args.from, "lower end of the prime range");
  verify->add_option("--to", verify_args.to, "upper end of the prime range")->required();
  verify->add_option("--method", verify_args.method, "auto | brute | chain")
      ->check(CLI::IsMember({"auto", "brute", "chain"}));
  verify->add_option("--threads", verify_args.threads, "worker threads");
  verify->add_flag("--certs", verify_args.certs, "embed certificates in the report");

  RepresentArgs rep_args;
  auto* represent = app.add_subcommand(
      "represent", "squarefree p-smooth representative of a residue class");
  represent->add_option("-p", rep_args.p, "prime modulus")->required();
  represent->add_option("-a", rep_args.a, "residue class")->required();
  represent->add_option("--method", rep_args.method, "auto | brute | chain")
      ->check(CLI::IsMember({"auto", "brute", "chain"}));

  ChainArgs chain_args;
  auto* chain = app.add_subcommand("chain", "build the semiprime chain certificate");
  chain->add_option("-p", chain_args.p, "prime modulus")->required();

  StatArgs mp_args;
  auto* mp = app.add_subcommand("mp", "largest minimal representative M(p)");
  mp->add_option("-p", mp_args.p, "single prime");
  mp->add_option("--from", mp_args.from, "range start");
  mp->add_option("--to", mp_args.to, "range end");
  mp->add_flag("--csv", mp_args.csv, "CSV output (p,M,ratio)");
  mp->add_option("--threads", mp_args.threads, "worker threads");

  StatArgs yp_args;
  auto* yp = app.add_subcommand("yp", "least smoothness bound y(p) for nonzero classes");
  yp->add_option("-p", yp_args.p, "single prime");
  yp->add_option("--from", yp_args.from, "range start");
  yp->add_option("--to", yp_args.to, "range end");
  yp->add_flag("--csv", yp_args.csv, "CSV output (p,y)");
  yp->add_option("--threads", yp_args.threads, "worker threads");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "run a prime generator");
  gen->add_option("kind", gen_args.kind, "mullin | d1 | dnd")->required();
  gen->add_option("--steps", gen_args.steps, "steps to generate");
  gen->add_option("--checkpoint", gen_args.checkpoint, "resumable JSONL step log");
  gen->add_option("--seed", gen_args.seed, "seed for probabilistic primality rounds");

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "numerical sanity checks");
  check->add_option("kind", check_args.kind, "density | omega | pv")->required();
  check->add_option("--limit", check_args.limit, "scan limit (density, omega)");
  check->add_option("-p", check_args.p, "prime (pv)");
  check->add_option("-d", check_args.d, "character order (pv)");
  check->add_option("--to", check_args.sweep_to, "sweep primes up to this bound (pv)");
  check->add_option("--dmax", check_args.dmax, "largest order in the sweep (pv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return run_verify(verify_args);
    if (represent->parsed()) return run_represent(rep_args);
    if (chain->parsed()) return run_chain(chain_args);
    if (mp->parsed()) return run_mp(mp_args);
    if (yp->parsed()) return run_yp(yp_args);
    if (gen->parsed()) return run_gen(gen_args);
    if (check->parsed()) return run_check(check_args);
  } catch (const Error& e) {
    std::cout << error_json(e).dump() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
