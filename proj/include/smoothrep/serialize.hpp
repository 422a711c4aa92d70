#ifndef SMOOTHREP_SERIALIZE_HPP
#define SMOOTHREP_SERIALIZE_HPP

#include <string>

#include "json.hpp"
#include "smoothrep/generators.hpp"
#include "smoothrep/represent.hpp"
#include "smoothrep/spectra.hpp"

namespace smoothrep {

// All numeric payloads are decimal strings: the big integers in certificates
// and step records exceed what JSON consumers reliably parse as numbers.
using json = nlohmann::ordered_json;

json to_json(const SmoothRepresentation& rep);
json to_json(const RepresentationChain& chain);
RepresentationChain chain_from_json(const json& j);

json to_json(const PrimeVerifyResult& result, bool include_certificate = false);

json to_json(const StepRecord& step);
StepRecord step_from_json(const json& j);

json to_json(const DensityReport& report);
json to_json(const OmegaReport& report);
json to_json(const PvReport& report);

std::string format_ratio(double value);  // fixed six decimal places

// Checkpoints: one step record per line. Loading rebuilds the state; callers
// replay-validate before trusting it.
void save_checkpoint(const GeneratorState& state, const std::string& path);
GeneratorState load_checkpoint(const std::string& path);
void append_checkpoint_line(const StepRecord& step, const std::string& path);

}  // namespace smoothrep

#endif  // SMOOTHREP_SERIALIZE_HPP
