#include "lseq/io/run_config.hpp"

#include "lseq/core/error.hpp"

#include <fstream>

namespace lseq::io {

void DataConfig::validate() const {
  if (validation_subjects < 1) throw Error("data.validation_subjects must be at least 1");
  if (test_subjects < 0) throw Error("data.test_subjects must be non-negative");
}

void EvalConfig::validate() const {
  if (protocol != "holdout" && protocol != "loso" && protocol != "split") {
    throw Error("eval.protocol must be holdout, loso, or split (got '" + protocol + "')");
  }
  if (repetitions < 1) throw Error("eval.repetitions must be at least 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("eval.test_fraction must be in (0, 1)");
  if (stride < 0) throw Error("eval.stride must be non-negative");
  if (batch_size < 1) throw Error("eval.batch_size must be positive");
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  data.validate();
  eval.validate();
}

model::ModelConfig model_preset(const std::string& name) {
  model::ModelConfig c;
  if (name == "full") return c;
  if (name == "desk") {
    c.filters = 16;
    c.attention = 16;
    c.epoch_width = 32;
    c.intra_width = 32;
    c.inter_width = 32;
    c.fc_width = 64;
    return c;
  }
  if (name == "miniature") {
    c.filters = 8;
    c.attention = 8;
    c.epoch_width = 8;
    c.intra_width = 8;
    c.inter_width = 8;
    c.fc_width = 16;
    return c;
  }
  throw Error("unknown model preset '" + name + "' (expected full, desk, or miniature)");
}

Json run_config_to_json(const RunConfig& c) {
  const auto& t = c.train;
  return Json{{"model", model_config_to_json(c.model)},
              {"train",
               {{"learning_rate", t.adam.learning_rate},
                {"beta1", t.adam.beta1},
                {"beta2", t.adam.beta2},
                {"epsilon", t.adam.epsilon},
                {"batch_size", t.batch_size},
                {"max_train_epochs", t.max_train_epochs},
                {"max_steps", t.max_steps},
                {"validate_every", t.validate_every},
                {"patience", t.patience},
                {"early_stopping", t.early_stopping},
                {"max_validations", t.max_validations},
                {"clip_norm", t.clip_norm},
                {"seed", t.seed},
                {"workers", t.workers},
                {"validation_stride", t.validation_stride}}},
              {"data",
               {{"features", c.data.features},
                {"validation_subjects", c.data.validation_subjects},
                {"test_subjects", c.data.test_subjects},
                {"split_seed", c.data.split_seed},
                {"zscore", c.data.zscore}}},
              {"eval",
               {{"protocol", c.eval.protocol},
                {"repetitions", c.eval.repetitions},
                {"test_fraction", c.eval.test_fraction},
                {"stride", c.eval.stride},
                {"batch_size", c.eval.batch_size}}}};
}

void merge_layer(Json& doc, const Json& layer, const std::string& prefix) {
  if (!layer.is_object()) throw Error("config layer '" + (prefix.empty() ? "<root>" : prefix) + "' must be an object");
  for (const auto& [key, value] : layer.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!doc.contains(key)) throw Error("unknown config key '" + path + "'");
    if (doc[key].is_object()) {
      merge_layer(doc[key], value, path);
    } else {
      if (value.is_object()) throw Error("config key '" + path + "' expects a value, not an object");
      doc[key] = value;
    }
  }
}

RunConfig run_config_from_json(const Json& j, const RunConfig& base) {
  Json doc = run_config_to_json(base);
  merge_layer(doc, j);
  RunConfig c = base;
  try {
    c.model = model_config_from_json(doc.at("model"), base.model);
    const auto& t = doc.at("train");
    c.train.adam.learning_rate = t.at("learning_rate").get<double>();
    c.train.adam.beta1 = t.at("beta1").get<double>();
    c.train.adam.beta2 = t.at("beta2").get<double>();
    c.train.adam.epsilon = t.at("epsilon").get<double>();
    c.train.batch_size = t.at("batch_size").get<Index>();
    c.train.max_train_epochs = t.at("max_train_epochs").get<Index>();
    c.train.max_steps = t.at("max_steps").get<Index>();
    c.train.validate_every = t.at("validate_every").get<Index>();
    c.train.patience = t.at("patience").get<int>();
    c.train.early_stopping = t.at("early_stopping").get<bool>();
    c.train.max_validations = t.at("max_validations").get<Index>();
    c.train.clip_norm = t.at("clip_norm").get<double>();
    c.train.seed = t.at("seed").get<std::uint64_t>();
    c.train.workers = t.at("workers").get<Index>();
    c.train.validation_stride = t.at("validation_stride").get<Index>();
    const auto& d = doc.at("data");
    c.data.features = d.at("features").get<std::string>();
    c.data.validation_subjects = d.at("validation_subjects").get<Index>();
    c.data.test_subjects = d.at("test_subjects").get<Index>();
    c.data.split_seed = d.at("split_seed").get<std::uint64_t>();
    c.data.zscore = d.at("zscore").get<bool>();
    const auto& e = doc.at("eval");
    c.eval.protocol = e.at("protocol").get<std::string>();
    c.eval.repetitions = e.at("repetitions").get<Index>();
    c.eval.test_fraction = e.at("test_fraction").get<double>();
    c.eval.stride = e.at("stride").get<Index>();
    c.eval.batch_size = e.at("batch_size").get<Index>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("config: wrong value type: ") + ex.what());
  }
  return c;
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) throw Error("unknown config key '" + key + "'");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) throw Error("config key '" + key + "' names a section, not a value");
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  *node = value;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  Json doc = Json::parse(is, nullptr, false);
  if (doc.is_discarded()) throw FormatError(path.string() + ": invalid JSON");
  return doc;
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << doc.dump(2) << '\n';
  if (!os) throw Error("failed writing " + path.string());
}

RunConfig resolve_run_config(const RunConfig& base, const std::vector<std::filesystem::path>& files,
                             const std::vector<std::string>& overrides) {
  Json doc = run_config_to_json(base);
  for (const auto& f : files) merge_layer(doc, read_json_file(f));
  for (const auto& o : overrides) apply_override(doc, o);
  RunConfig c = run_config_from_json(doc, base);
  c.validate();
  return c;
}

}  // namespace lseq::io
