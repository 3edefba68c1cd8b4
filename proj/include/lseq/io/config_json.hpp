#pragma once

#include "lseq/model/config.hpp"
#include "lseq/synth/generator.hpp"

#include <json.hpp>

namespace lseq::io {

using Json = nlohmann::json;

Json model_config_to_json(const model::ModelConfig& c);
// Missing keys keep the defaults of `base`; unknown keys are errors.
model::ModelConfig model_config_from_json(const Json& j, const model::ModelConfig& base = {});

// Scalar fields of the synthetic generator (the transition matrix, cycle
// schedule, and band table are included as nested arrays).
Json synth_config_to_json(const synth::SynthConfig& c);
synth::SynthConfig synth_config_from_json(const Json& j, const synth::SynthConfig& base = {});

}  // namespace lseq::io
