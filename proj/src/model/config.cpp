#include "lseq/model/config.hpp"

#include "lseq/core/error.hpp"

#include <sstream>

namespace lseq::model {

std::string variant_name(Variant v) {
  return v == Variant::Folded ? "folded" : "flat";
}

Variant parse_variant(const std::string& s) {
  if (s == "folded") return Variant::Folded;
  if (s == "flat") return Variant::Flat;
  throw Error("unknown model variant '" + s + "' (expected folded or flat)");
}

void ModelConfig::validate() const {
  if (classes != 5) throw Error("model: class count must be 5");
  if (l2 < 0.0) throw Error("model: l2 coefficient must be non-negative");
  if (dropout < 0.0 || dropout >= 1.0) throw Error("model: dropout must be in [0, 1)");
  if (fold.L < 1) throw Error("model: sequence length must be positive");
  if (variant == Variant::Folded) fold.validate();
  for (Index w : {frames, bins, filters, attention, epoch_width, intra_width, inter_width, fc_width}) {
    if (w < 1) throw Error("model: all widths must be positive");
  }
  if (epoch_width % 2 || intra_width % 2 || inter_width % 2) throw Error("model: recurrent widths must be even");
  if (filters >= bins) throw Error("model: filter count must be smaller than the bin count");
}

std::string ModelConfig::canonical() const {
  std::ostringstream os;
  os << "variant=" << variant_name(variant) << ";L=" << fold.L;
  if (variant == Variant::Folded) os << ";B=" << fold.B << ";K=" << fold.K;
  os << ";T=" << frames << ";F=" << bins << ";M=" << filters << ";A=" << attention << ";He=" << epoch_width
     << ";Hss=" << intra_width;
  if (variant == Variant::Folded) os << ";Hws=" << inter_width;
  os << ";Nfc=" << fc_width << ";C=" << classes;
  return os.str();
}

}  // namespace lseq::model
