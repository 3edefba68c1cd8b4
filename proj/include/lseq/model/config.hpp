#pragma once

#include "lseq/context/fold.hpp"
#include "lseq/core/tensor.hpp"

#include <string>

namespace lseq::model {

enum class Variant { Folded, Flat };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);

struct ModelConfig {
  Variant variant = Variant::Folded;
  context::FoldSpec fold{200, 10, 20};  // for flat only fold.L is used
  Index frames = 29;
  Index bins = 129;
  Index filters = 32;      // M
  Index attention = 64;    // A
  Index epoch_width = 128; // H_e
  Index intra_width = 128; // H_ss
  Index inter_width = 128; // H_ws
  Index fc_width = 512;    // N_fc
  Index classes = 5;       // C
  double dropout = 0.1;
  bool context_dropout = true;
  double l2 = 1e-4;        // lambda

  Index length() const { return fold.L; }
  void validate() const;
  // Canonical one-line description used for checkpoint fingerprints.
  std::string canonical() const;
};

}  // namespace lseq::model
