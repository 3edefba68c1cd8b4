#pragma once

#include "lseq/io/config_json.hpp"
#include "lseq/model/config.hpp"
#include "lseq/train/trainer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace lseq::io {

struct DataConfig {
  std::string features;          // directory of feature archives or a manifest CSV
  Index validation_subjects = 1;  // held out of training for model selection
  Index test_subjects = 0;        // held out of training and validation entirely
  std::uint64_t split_seed = 1;
  bool zscore = false;

  void validate() const;
};

struct EvalConfig {
  std::string protocol = "holdout";  // holdout | loso | split
  Index repetitions = 1;
  double test_fraction = 0.3;
  Index stride = 0;  // 0: L
  Index batch_size = 8;

  void validate() const;
};

struct RunConfig {
  model::ModelConfig model;
  train::TrainConfig train;
  DataConfig data;
  EvalConfig eval;

  void validate() const;
};

// Named starting points for the model section: "full" (default widths),
// "desk" (narrow widths for single-core runs), "miniature" (test scale).
model::ModelConfig model_preset(const std::string& name);

Json run_config_to_json(const RunConfig& c);
// Strict: unknown keys anywhere are errors naming the dotted key.
RunConfig run_config_from_json(const Json& j, const RunConfig& base = {});

// Applies "section.key=value"; the value is parsed as JSON when possible and
// taken as a string otherwise. The key must exist in `doc`.
void apply_override(Json& doc, const std::string& assignment);

// Recursively merges `layer` into `doc`; keys absent from `doc` are errors.
void merge_layer(Json& doc, const Json& layer, const std::string& prefix = "");

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

// Resolution order: base, then each config file, then each override.
RunConfig resolve_run_config(const RunConfig& base, const std::vector<std::filesystem::path>& files,
                             const std::vector<std::string>& overrides);

}  // namespace lseq::io
