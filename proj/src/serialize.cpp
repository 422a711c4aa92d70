#include "smoothrep/serialize.hpp"

#include <cstdio>
#include <fstream>

namespace smoothrep {

namespace {

std::string dec(u64 v) { return std::to_string(v); }
std::string dec(const mpz_class& v) { return v.get_str(); }

json subset_to_json(const std::vector<u32>& subset) {
  json arr = json::array();
  for (u32 i : subset) arr.push_back(dec(i));
  return arr;
}

std::vector<u32> subset_from_json(const json& arr) {
  std::vector<u32> out;
  for (const auto& v : arr) out.push_back(static_cast<u32>(std::stoul(v.get<std::string>())));
  return out;
}

u64 u64_from(const json& v) { return std::stoull(v.get<std::string>()); }
mpz_class mpz_from(const json& v) { return mpz_class(v.get<std::string>()); }

}  // namespace

std::string format_ratio(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

json to_json(const SmoothRepresentation& rep) {
  json j;
  j["p"] = dec(rep.p);
  j["a"] = dec(rep.a);
  json primes = json::array();
  for (u64 q : rep.primes) primes.push_back(dec(q));
  j["primes"] = primes;
  return j;
}

json to_json(const RepresentationChain& chain) {
  json j;
  j["p"] = dec(chain.p);
  j["g"] = dec(chain.g);
  json pairs = json::array();
  for (auto [q, r] : chain.pairs) pairs.push_back(json::array({dec(q), dec(r)}));
  j["pairs"] = pairs;
  return j;
}

RepresentationChain chain_from_json(const json& j) {
  RepresentationChain chain;
  chain.p = u64_from(j.at("p"));
  chain.g = u64_from(j.at("g"));
  for (const auto& pair : j.at("pairs"))
    chain.pairs.emplace_back(u64_from(pair.at(0)), u64_from(pair.at(1)));
  return chain;
}

json to_json(const PrimeVerifyResult& result, bool include_certificate) {
  json j;
  j["p"] = dec(result.p);
  j["method"] = result.method == VerifyMethod::chain ? "chain" : "brute";
  switch (result.outcome) {
    case VerifyOutcome::pass: j["outcome"] = "pass"; break;
    case VerifyOutcome::exception: j["outcome"] = "exception"; break;
    case VerifyOutcome::failure: j["outcome"] = "failure"; break;
  }
  if (!result.unrepresentable.empty()) {
    json classes = json::array();
    for (u64 a : result.unrepresentable) classes.push_back(dec(a));
    j["unrepresentable"] = classes;
  }
  if (!result.detail.empty()) j["detail"] = result.detail;
  if (include_certificate && result.certificate)
    j["certificate"] = to_json(*result.certificate);
  return j;
}

json to_json(const StepRecord& step) {
  json j;
  switch (step.rule) {
    case Rule::mullin: j["rule"] = "mullin"; break;
    case Rule::d_plus_one: j["rule"] = "d_plus_one"; break;
    case Rule::d_plus_n_over_d: j["rule"] = "d_plus_n_over_d"; break;
  }
  j["prime"] = dec(step.prime);
  json cert;
  if (const auto* m = std::get_if<MullinCert>(&step.certificate)) {
    cert["value"] = dec(m->value);
    json factors = json::array();
    for (const auto& f : m->factors)
      factors.push_back(json::array({dec(f.prime), dec(u64{f.exponent})}));
    cert["factors"] = factors;
    cert["cofactor"] = dec(m->cofactor);
  } else if (const auto* d1 = std::get_if<DPlusOneCert>(&step.certificate)) {
    cert["literal"] = d1->literal_scan;
    cert["subset"] = subset_to_json(d1->subset);
    cert["d"] = dec(d1->d);
  } else if (const auto* dnd = std::get_if<DndCert>(&step.certificate)) {
    switch (dnd->branch) {
      case DndCert::Branch::bootstrap: cert["branch"] = "bootstrap"; break;
      case DndCert::Branch::sqrt_residue: cert["branch"] = "sqrt_residue"; break;
      case DndCert::Branch::nonresidue: cert["branch"] = "nonresidue"; break;
    }
    cert["target"] = dec(dnd->target);
    cert["a"] = dec(dnd->a);
    cert["subset"] = subset_to_json(dnd->subset);
    cert["d"] = dec(dnd->d);
    cert["value"] = dec(dnd->value);
  }
  j["certificate"] = cert;
  return j;
}

StepRecord step_from_json(const json& j) {
  StepRecord step;
  const std::string rule = j.at("rule").get<std::string>();
  step.prime = mpz_from(j.at("prime"));
  const json& cert = j.at("certificate");
  if (rule == "mullin") {
    step.rule = Rule::mullin;
    MullinCert m;
    m.value = mpz_from(cert.at("value"));
    for (const auto& f : cert.at("factors"))
      m.factors.push_back(
          {mpz_from(f.at(0)), static_cast<unsigned>(u64_from(f.at(1)))});
    m.cofactor = mpz_from(cert.at("cofactor"));
    step.certificate = std::move(m);
  } else if (rule == "d_plus_one") {
    step.rule = Rule::d_plus_one;
    DPlusOneCert d1;
    d1.literal_scan = cert.at("literal").get<bool>();
    d1.subset = subset_from_json(cert.at("subset"));
    d1.d = mpz_from(cert.at("d"));
    step.certificate = std::move(d1);
  } else if (rule == "d_plus_n_over_d") {
    step.rule = Rule::d_plus_n_over_d;
    DndCert dnd;
    const std::string branch = cert.at("branch").get<std::string>();
    if (branch == "bootstrap") dnd.branch = DndCert::Branch::bootstrap;
    else if (branch == "sqrt_residue") dnd.branch = DndCert::Branch::sqrt_residue;
    else if (branch == "nonresidue") dnd.branch = DndCert::Branch::nonresidue;
    else throw UsageError("step_from_json: unknown branch " + branch);
    dnd.target = u64_from(cert.at("target"));
    dnd.a = u64_from(cert.at("a"));
    dnd.subset = subset_from_json(cert.at("subset"));
    dnd.d = mpz_from(cert.at("d"));
    dnd.value = mpz_from(cert.at("value"));
    step.certificate = std::move(dnd);
  } else {
    throw UsageError("step_from_json: unknown rule " + rule);
  }
  return step;
}

json to_json(const DensityReport& report) {
  json j;
  j["check"] = "squarefree_density";
  j["limit"] = dec(report.limit);
  j["primes_checked"] = dec(report.primes_checked);
  json viol = json::array();
  for (const auto& v : report.violations) {
    json entry;
    entry["p"] = dec(v.p);
    entry["squarefree_count"] = dec(v.squarefree_count);
    viol.push_back(entry);
  }
  j["violations"] = viol;
  return j;
}

json to_json(const OmegaReport& report) {
  json j;
  j["check"] = "omega_bound";
  j["limit"] = dec(report.limit);
  j["six_is_witness"] = report.six_is_witness;
  json viol = json::array();
  for (u64 n : report.violations) viol.push_back(dec(n));
  j["violations"] = viol;
  return j;
}

json to_json(const PvReport& report) {
  json j;
  j["check"] = "pv_partial_sum";
  j["p"] = dec(report.p);
  j["d"] = dec(report.d);
  json chars = json::array();
  for (const auto& cr : report.characters) {
    json c;
    c["i"] = dec(cr.i);
    c["max_partial_sum"] = format_ratio(cr.max_partial_sum);
    c["bound"] = format_ratio(cr.bound);
    c["pass"] = cr.pass;
    c["even"] = cr.even_character;
    c["halved_bound_holds"] = cr.halved_bound_holds;
    chars.push_back(c);
  }
  j["characters"] = chars;
  j["cosets_covered"] = report.cosets_covered;
  j["within_hypothesis"] = report.within_hypothesis;
  j["pass"] = report.pass;
  return j;
}

void save_checkpoint(const GeneratorState& state, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot write checkpoint file " + path);
  for (const auto& step : state.steps()) out << to_json(step).dump() << '\n';
}

GeneratorState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read checkpoint file " + path);
  GeneratorState state;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    state.append(step_from_json(json::parse(line)));
  }
  return state;
}

void append_checkpoint_line(const StepRecord& step, const std::string& path) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw UsageError("cannot append to checkpoint file " + path);
  out << to_json(step).dump() << '\n';
}

}  // namespace smoothrep
