#include "lseq/io/checkpoint.hpp"

#include "lseq/core/binary_io.hpp"
#include "lseq/core/error.hpp"
#include "lseq/core/rng.hpp"
#include "lseq/io/config_json.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

namespace lseq::io {

namespace {

constexpr char kMagic[9] = "LSEQCKPT";
constexpr Index kMaxElements = Index{1} << 32;

void write_values(std::ostream& os, const std::vector<double>& values, int bytes) {
  if (bytes == 4) {
    for (double v : values) bin::write<float>(os, static_cast<float>(v));
  } else {
    bin::write_array(os, values.data(), values.size());
  }
}

std::vector<double> read_values(std::istream& is, Index count, int bytes) {
  std::vector<double> values(static_cast<std::size_t>(count));
  if (bytes == 4) {
    std::vector<float> raw(static_cast<std::size_t>(count));
    bin::read_array(is, raw.data(), raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) values[i] = raw[i];
  } else {
    bin::read_array(is, values.data(), values.size());
  }
  return values;
}

void read_shape(std::istream& is, int& bytes, Index& rows, Index& cols) {
  bytes = bin::read<std::uint8_t>(is);
  if (bytes != 4 && bytes != 8) throw FormatError("checkpoint: unsupported value width " + std::to_string(bytes));
  rows = static_cast<Index>(bin::read<std::uint64_t>(is));
  cols = static_cast<Index>(bin::read<std::uint64_t>(is));
  if (rows < 0 || cols < 0 || rows * cols > kMaxElements) throw FormatError("checkpoint: implausible tensor shape");
}

template <typename S>
constexpr int bytes_of() {
  return static_cast<int>(sizeof(S));
}

template <typename S>
std::vector<double> flatten(const Mat<S>& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(m.data()[i]);
  return out;
}

template <typename S>
void unflatten(const std::vector<double>& values, Mat<S>& m) {
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<S>(values[static_cast<std::size_t>(i)]);
}

}  // namespace

const TensorRecord* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::uint64_t config_fingerprint(const model::ModelConfig& config) {
  return fnv1a64(config.canonical());
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  std::ostringstream os(std::ios::binary);
  bin::write_magic(os, kMagic);
  bin::write<std::uint16_t>(os, kCheckpointMajor);
  bin::write<std::uint16_t>(os, kCheckpointMinor);
  bin::write<std::uint64_t>(os, ckpt.fingerprint);
  bin::write_string(os, ckpt.model_config);
  bin::write_string(os, ckpt.metadata);
  bin::write<std::int64_t>(os, ckpt.step);
  bin::write<double>(os, ckpt.best_metric);
  bin::write<std::int64_t>(os, ckpt.optimizer_steps);
  bin::write<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    if (static_cast<Index>(t.values.size()) != t.rows * t.cols) throw Error("checkpoint: tensor " + t.name + " is inconsistent");
    bin::write_string(os, t.name);
    bin::write<std::uint8_t>(os, t.trainable ? 0 : 1);
    bin::write<std::uint8_t>(os, static_cast<std::uint8_t>(t.bytes));
    bin::write<std::uint64_t>(os, static_cast<std::uint64_t>(t.rows));
    bin::write<std::uint64_t>(os, static_cast<std::uint64_t>(t.cols));
    write_values(os, t.values, t.bytes);
  }
  bin::write<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.moments.size()));
  for (const auto& m : ckpt.moments) {
    bin::write_string(os, m.name);
    bin::write<std::uint8_t>(os, static_cast<std::uint8_t>(m.bytes));
    bin::write<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows));
    bin::write<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols));
    write_values(os, m.first, m.bytes);
    write_values(os, m.second, m.bytes);
  }
  const std::string payload = os.str();
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  bin::write<std::uint64_t>(out, fnv1a64(payload));
  if (!out) throw Error("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::istringstream is(bytes, std::ios::binary);
  bin::expect_magic(is, kMagic, "checkpoint");
  const auto major = bin::read<std::uint16_t>(is);
  bin::read<std::uint16_t>(is);
  if (major > kCheckpointMajor) {
    throw FormatError("checkpoint: format version " + std::to_string(major) + " is newer than supported version " +
                      std::to_string(kCheckpointMajor));
  }
  if (bytes.size() < 8 + 4 + 8 + 8) throw FormatError("checkpoint: truncated");
  const std::string payload = bytes.substr(0, bytes.size() - 8);
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + payload.size(), 8);
  if (stored != fnv1a64(payload)) throw FormatError("checkpoint: checksum mismatch (file corrupted)");

  Checkpoint ckpt;
  ckpt.fingerprint = bin::read<std::uint64_t>(is);
  ckpt.model_config = bin::read_string(is);
  ckpt.metadata = bin::read_string(is);
  ckpt.step = bin::read<std::int64_t>(is);
  ckpt.best_metric = bin::read<double>(is);
  ckpt.optimizer_steps = bin::read<std::int64_t>(is);
  const auto n_tensors = bin::read<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    TensorRecord t;
    t.name = bin::read_string(is);
    const auto kind = bin::read<std::uint8_t>(is);
    if (kind > 1) throw FormatError("checkpoint: bad tensor kind for " + t.name);
    t.trainable = kind == 0;
    read_shape(is, t.bytes, t.rows, t.cols);
    t.values = read_values(is, t.rows * t.cols, t.bytes);
    ckpt.tensors.push_back(std::move(t));
  }
  const auto n_moments = bin::read<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < n_moments; ++i) {
    MomentRecord m;
    m.name = bin::read_string(is);
    read_shape(is, m.bytes, m.rows, m.cols);
    m.first = read_values(is, m.rows * m.cols, m.bytes);
    m.second = read_values(is, m.rows * m.cols, m.bytes);
    ckpt.moments.push_back(std::move(m));
  }
  if (static_cast<std::size_t>(is.tellg()) != payload.size()) throw FormatError("checkpoint: trailing bytes");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp + " for writing");
    write_checkpoint(os, ckpt);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open checkpoint " + path.string());
  try {
    return read_checkpoint(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

model::ModelConfig checkpoint_model_config(const Checkpoint& ckpt) {
  try {
    return model_config_from_json(Json::parse(ckpt.model_config));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("checkpoint: unreadable model config: ") + e.what());
  }
}

template <typename S>
Checkpoint capture(model::Model<S>& model, const train::Adam<S>* optimizer, std::int64_t step, double best_metric,
                   const std::string& metadata) {
  Checkpoint ckpt;
  ckpt.fingerprint = config_fingerprint(model.config());
  ckpt.model_config = model_config_to_json(model.config()).dump();
  ckpt.metadata = metadata;
  ckpt.step = step;
  ckpt.best_metric = best_metric;
  for (const auto* p : model.params()) {
    ckpt.tensors.push_back({p->name, p->trainable, bytes_of<S>(), p->value.rows(), p->value.cols(), flatten(p->value)});
  }
  if (optimizer) {
    ckpt.optimizer_steps = optimizer->steps();
    const auto& tensors = optimizer->tensors();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      ckpt.moments.push_back({tensors[i]->name, bytes_of<S>(), tensors[i]->value.rows(), tensors[i]->value.cols(),
                              flatten(optimizer->first_moments()[i]), flatten(optimizer->second_moments()[i])});
    }
  }
  return ckpt;
}

template <typename S>
void restore(model::Model<S>& model, const Checkpoint& ckpt, train::Adam<S>* optimizer) {
  if (ckpt.fingerprint != config_fingerprint(model.config())) {
    throw FormatError("checkpoint: model configuration fingerprint does not match (checkpoint " +
                      checkpoint_model_config(ckpt).canonical() + ", model " + model.config().canonical() + ")");
  }
  std::map<std::string, const TensorRecord*> by_name;
  for (const auto& t : ckpt.tensors) by_name[t.name] = &t;
  for (const auto* p : model.params()) {
    const auto it = by_name.find(p->name);
    if (it == by_name.end()) throw FormatError("checkpoint: missing tensor " + p->name);
    if (it->second->rows != p->value.rows() || it->second->cols != p->value.cols()) {
      throw FormatError("checkpoint: shape mismatch for " + p->name);
    }
  }
  std::map<std::string, const MomentRecord*> moments;
  if (optimizer) {
    for (const auto& m : ckpt.moments) moments[m.name] = &m;
    for (const auto* p : optimizer->tensors()) {
      const auto it = moments.find(p->name);
      if (it == moments.end() || it->second->rows != p->value.rows() || it->second->cols != p->value.cols()) {
        throw FormatError("checkpoint: optimizer state missing or misshaped for " + p->name);
      }
    }
  }
  for (auto* p : model.params()) unflatten(by_name.at(p->name)->values, p->value);
  if (optimizer) {
    const auto& tensors = optimizer->tensors();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const auto* m = moments.at(tensors[i]->name);
      unflatten(m->first, optimizer->first_moments()[i]);
      unflatten(m->second, optimizer->second_moments()[i]);
    }
    optimizer->set_steps(ckpt.optimizer_steps);
  }
}

namespace {

std::string layer_of(const std::string& name) {
  const auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

template <typename S>
TransferReport init_from_pretrained(model::Model<S>& model, const Checkpoint& ckpt, Strictness strictness) {
  // A layer is transferred as a unit: one mismatched tensor keeps all of the
  // layer's tensors at their fresh initialization.
  std::vector<std::string> problems;
  std::set<std::string> broken_layers;
  for (const auto* p : model.params()) {
    const TensorRecord* t = ckpt.find(p->name);
    if (t == nullptr) {
      problems.push_back(p->name + " (absent from checkpoint)");
    } else if (t->rows != p->value.rows() || t->cols != p->value.cols()) {
      problems.push_back(p->name + " (checkpoint " + std::to_string(t->rows) + "x" + std::to_string(t->cols) +
                         ", model " + std::to_string(p->value.rows()) + "x" + std::to_string(p->value.cols()) + ")");
    } else {
      continue;
    }
    broken_layers.insert(layer_of(p->name));
  }
  if (strictness == Strictness::All && !problems.empty()) {
    std::string msg = "init_from_pretrained: " + std::to_string(problems.size()) + " mismatched tensor(s):";
    for (const auto& p : problems) msg += "\n  " + p;
    throw FormatError(msg);
  }
  TransferReport report;
  for (auto* p : model.params()) {
    if (broken_layers.count(layer_of(p->name))) {
      report.fresh.push_back(p->name);
      continue;
    }
    unflatten(ckpt.find(p->name)->values, p->value);
    report.copied.push_back(p->name);
  }
  return report;
}

template Checkpoint capture(model::Model<float>&, const train::Adam<float>*, std::int64_t, double, const std::string&);
template Checkpoint capture(model::Model<double>&, const train::Adam<double>*, std::int64_t, double,
                            const std::string&);
template void restore(model::Model<float>&, const Checkpoint&, train::Adam<float>*);
template void restore(model::Model<double>&, const Checkpoint&, train::Adam<double>*);
template TransferReport init_from_pretrained(model::Model<float>&, const Checkpoint&, Strictness);
template TransferReport init_from_pretrained(model::Model<double>&, const Checkpoint&, Strictness);

}  // namespace lseq::io
