#include "smoothrep/serialize.hpp"

#include <cstdio>
#include <filesystem>

#include "doctest.h"

using namespace smoothrep;

namespace {
Sieve& shared_sieve() {
  static Sieve sieve(2'000'000);
  return sieve;
}
}  // namespace

TEST_CASE("witness and chain schemas") {
  const Sieve& sieve = shared_sieve();
  SmoothRepresentation rep = brute_force_representative(11, 4, sieve);
  CHECK(to_json(rep).dump() == R"({"p":"11","a":"4","primes":["3","5"]})");
  CHECK(rep.value() == 15);

  RepresentationChain chain = build_chain(10007, sieve);
  json j = to_json(chain);
  CHECK(j["p"] == "10007");
  CHECK(j["pairs"].size() == 14);
  RepresentationChain back = chain_from_json(j);
  CHECK(back.p == chain.p);
  CHECK(back.g == chain.g);
  CHECK(back.pairs == chain.pairs);
  CHECK(validate_chain(back));
}

TEST_CASE("step records round-trip through JSON for every rule") {
  const Sieve& sieve = shared_sieve();
  for (const GeneratorState& state :
       {run_mullin(8).state, run_d_plus_one(9, sieve).state,
        run_d_plus_n_over_d(9, sieve).state}) {
    GeneratorState rebuilt;
    for (const auto& step : state.steps()) {
      json j = to_json(step);
      StepRecord back = step_from_json(json::parse(j.dump()));
      CHECK(to_json(back).dump() == j.dump());
      rebuilt.append(std::move(back));
    }
    CHECK(rebuilt.primes() == state.primes());
    CHECK(rebuilt.product() == state.product());
    ReplayResult replay = replay_validate(rebuilt, sieve);
    CHECK_MESSAGE(replay.ok, replay.why);
  }
}

TEST_CASE("checkpoint files reload into a replay-valid state") {
  namespace fs = std::filesystem;
  const Sieve& sieve = shared_sieve();
  std::string path = (fs::temp_directory_path() / "smoothrep_serialize_test.jsonl").string();

  GeneratorState state = run_d_plus_n_over_d(10, sieve).state;
  save_checkpoint(state, path);
  GeneratorState loaded = load_checkpoint(path);
  CHECK(loaded.primes() == state.primes());
  CHECK(replay_validate(loaded, sieve).ok);
  std::remove(path.c_str());
}
