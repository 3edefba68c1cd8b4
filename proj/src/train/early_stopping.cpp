#include "lseq/train/early_stopping.hpp"

#include "lseq/core/error.hpp"

namespace lseq::train {

EarlyStopping::EarlyStopping(int patience, bool enabled) : patience_(patience), enabled_(enabled) {
  if (patience < 1) throw Error("early stopping: patience must be at least 1");
}

EarlyStopping::Decision EarlyStopping::observe(double accuracy) {
  ++checks_;
  Decision d;
  if (accuracy > best_) {
    best_ = accuracy;
    since_improvement_ = 0;
    d.improved = true;
  } else {
    ++since_improvement_;
  }
  d.stop = enabled_ && since_improvement_ >= patience_;
  return d;
}

}  // namespace lseq::train
