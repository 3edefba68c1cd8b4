#pragma once

#include "lseq/model/model.hpp"
#include "lseq/train/adam.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lseq::io {

// Binary checkpoint archive:
//   "LSEQCKPT", u16 major, u16 minor, u64 config fingerprint,
//   string model_config (JSON), string metadata (JSON),
//   i64 step, f64 best_metric, i64 optimizer_steps,
//   u32 n_tensors, tensors, u32 n_moments, moments,
//   u64 FNV-1a checksum of every preceding byte.
// Tensor: string name, u8 kind (0 parameter, 1 buffer), u8 bytes per value
// (4 or 8), u64 rows, u64 cols, values little-endian row-major.
// Moment: string name, u8 bytes per value, u64 rows, u64 cols, first then
// second moment values.
inline constexpr std::uint16_t kCheckpointMajor = 1;
inline constexpr std::uint16_t kCheckpointMinor = 0;

struct TensorRecord {
  std::string name;
  bool trainable = true;
  int bytes = 4;
  Index rows = 0;
  Index cols = 0;
  std::vector<double> values;

  bool operator==(const TensorRecord&) const = default;
};

struct MomentRecord {
  std::string name;
  int bytes = 4;
  Index rows = 0;
  Index cols = 0;
  std::vector<double> first;
  std::vector<double> second;

  bool operator==(const MomentRecord&) const = default;
};

struct Checkpoint {
  std::uint64_t fingerprint = 0;
  std::string model_config;  // JSON document of the model section
  std::string metadata;      // JSON document, free-form
  std::int64_t step = 0;
  double best_metric = 0.0;
  std::int64_t optimizer_steps = 0;
  std::vector<TensorRecord> tensors;
  std::vector<MomentRecord> moments;

  const TensorRecord* find(const std::string& name) const;
  bool operator==(const Checkpoint&) const = default;
};

std::uint64_t config_fingerprint(const model::ModelConfig& config);

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

template <typename S>
Checkpoint capture(model::Model<S>& model, const train::Adam<S>* optimizer, std::int64_t step, double best_metric,
                   const std::string& metadata = "{}");

// Restores parameters (and optimizer state when given). The fingerprint and
// every tensor shape are validated before anything is modified.
template <typename S>
void restore(model::Model<S>& model, const Checkpoint& ckpt, train::Adam<S>* optimizer = nullptr);

model::ModelConfig checkpoint_model_config(const Checkpoint& ckpt);

enum class Strictness { All, Compatible };

struct TransferReport {
  std::vector<std::string> copied;
  std::vector<std::string> fresh;  // kept at the model's own initialization
};

// Copies every layer whose tensors all match the checkpoint by name and
// shape; other layers keep their fresh initialization. In All mode any
// mismatch or missing tensor is an error listing all of them and nothing is
// copied.
template <typename S>
TransferReport init_from_pretrained(model::Model<S>& model, const Checkpoint& ckpt, Strictness strictness);

}  // namespace lseq::io
