#include "lseq/io/config_json.hpp"

#include "lseq/core/error.hpp"

#include <set>
#include <vector>

namespace lseq::io {

Json model_config_to_json(const model::ModelConfig& c) {
  return Json{{"variant", model::variant_name(c.variant)},
              {"L", c.fold.L},
              {"B", c.fold.B},
              {"K", c.fold.K},
              {"frames", c.frames},
              {"bins", c.bins},
              {"filters", c.filters},
              {"attention", c.attention},
              {"epoch_width", c.epoch_width},
              {"intra_width", c.intra_width},
              {"inter_width", c.inter_width},
              {"fc_width", c.fc_width},
              {"classes", c.classes},
              {"dropout", c.dropout},
              {"context_dropout", c.context_dropout},
              {"l2", c.l2}};
}

model::ModelConfig model_config_from_json(const Json& j, const model::ModelConfig& base) {
  if (!j.is_object()) throw Error("model config must be a JSON object");
  static const std::set<std::string> known{"variant",     "L",           "B",           "K",        "frames",
                                           "bins",        "filters",     "attention",   "epoch_width",
                                           "intra_width", "inter_width", "fc_width",    "classes",  "dropout",
                                           "context_dropout", "l2"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error("unknown model config key 'model." + key + "'");
  }
  model::ModelConfig c = base;
  try {
    if (j.contains("variant")) c.variant = model::parse_variant(j.at("variant").get<std::string>());
    auto take = [&](const char* key, Index& field) {
      if (j.contains(key)) field = j.at(key).get<Index>();
    };
    take("L", c.fold.L);
    take("B", c.fold.B);
    take("K", c.fold.K);
    take("frames", c.frames);
    take("bins", c.bins);
    take("filters", c.filters);
    take("attention", c.attention);
    take("epoch_width", c.epoch_width);
    take("intra_width", c.intra_width);
    take("inter_width", c.inter_width);
    take("fc_width", c.fc_width);
    take("classes", c.classes);
    if (j.contains("dropout")) c.dropout = j.at("dropout").get<double>();
    if (j.contains("context_dropout")) c.context_dropout = j.at("context_dropout").get<bool>();
    if (j.contains("l2")) c.l2 = j.at("l2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model config: ") + e.what());
  }
  if (c.variant == model::Variant::Flat) c.fold = {c.fold.L, 1, c.fold.L};
  return c;
}

Json synth_config_to_json(const synth::SynthConfig& c) {
  Json transitions = Json::array();
  for (const auto& row : c.transitions) transitions.push_back(Json(std::vector<double>(row.begin(), row.end())));
  Json schedule = Json::array();
  for (const auto& seg : c.schedule) {
    schedule.push_back({{"stage", std::string(frontend::stage_name(static_cast<int>(seg.target)))},
                        {"epochs", seg.epochs}});
  }
  Json bands = Json::object();
  for (int s = 0; s < 5; ++s) {
    Json list = Json::array();
    for (const auto& b : c.bands[s]) {
      list.push_back({{"center_hz", b.center_hz}, {"amplitude", b.amplitude}, {"jitter_hz", b.jitter_hz}});
    }
    bands[std::string(frontend::stage_name(s))] = list;
  }
  return Json{{"n_subjects", c.n_subjects},
              {"recordings_per_subject", c.recordings_per_subject},
              {"epochs_per_recording", c.epochs_per_recording},
              {"cycle_period", c.cycle_period},
              {"period_jitter", c.period_jitter},
              {"cycle_modulation_depth", c.cycle_modulation_depth},
              {"modulation_gain", c.modulation_gain},
              {"amplitude_scale", c.amplitude_scale},
              {"amplitude_jitter", c.amplitude_jitter},
              {"noise_level", c.noise_level},
              {"sample_rate", c.sample_rate},
              {"seed", c.seed},
              {"transitions", transitions},
              {"schedule", schedule},
              {"bands", bands}};
}

namespace {

int stage_index(const std::string& name) {
  for (int s = 0; s < 5; ++s) {
    if (frontend::stage_name(s) == name) return s;
  }
  throw Error("unknown stage name '" + name + "'");
}

}  // namespace

synth::SynthConfig synth_config_from_json(const Json& j, const synth::SynthConfig& base) {
  if (!j.is_object()) throw Error("synth config must be a JSON object");
  const Json defaults = synth_config_to_json(base);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw Error("unknown synth config key 'synth." + key + "'");
  }
  synth::SynthConfig c = base;
  try {
    auto take = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("n_subjects", c.n_subjects);
    take("recordings_per_subject", c.recordings_per_subject);
    take("epochs_per_recording", c.epochs_per_recording);
    take("cycle_period", c.cycle_period);
    take("period_jitter", c.period_jitter);
    take("cycle_modulation_depth", c.cycle_modulation_depth);
    take("modulation_gain", c.modulation_gain);
    take("amplitude_scale", c.amplitude_scale);
    take("amplitude_jitter", c.amplitude_jitter);
    take("noise_level", c.noise_level);
    take("sample_rate", c.sample_rate);
    take("seed", c.seed);
    if (j.contains("transitions")) {
      const auto rows = j.at("transitions").get<std::vector<std::vector<double>>>();
      if (rows.size() != 5) throw Error("synth.transitions must have 5 rows");
      for (std::size_t i = 0; i < 5; ++i) {
        if (rows[i].size() != 5) throw Error("synth.transitions rows must have 5 entries");
        for (std::size_t k = 0; k < 5; ++k) c.transitions[i][k] = rows[i][k];
      }
    }
    if (j.contains("schedule")) {
      c.schedule.clear();
      for (const auto& seg : j.at("schedule")) {
        c.schedule.push_back({static_cast<frontend::Stage>(stage_index(seg.at("stage").get<std::string>())),
                              seg.at("epochs").get<double>()});
      }
    }
    if (j.contains("bands")) {
      for (const auto& [name, list] : j.at("bands").items()) {
        auto& target = c.bands[static_cast<std::size_t>(stage_index(name))];
        target.clear();
        for (const auto& b : list) {
          target.push_back({b.at("center_hz").get<double>(), b.at("amplitude").get<double>(),
                            b.value("jitter_hz", 0.5)});
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("synth config: ") + e.what());
  }
  return c;
}

}  // namespace lseq::io
