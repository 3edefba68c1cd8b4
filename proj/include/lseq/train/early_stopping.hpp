#pragma once

#include <limits>

namespace lseq::train {

// Tracks validation accuracy. A check improves only if it is strictly better
// than the best so far; `patience` consecutive non-improving checks stop the
// run unless early stopping is disabled.
class EarlyStopping {
 public:
  struct Decision {
    bool improved = false;
    bool stop = false;
  };

  EarlyStopping(int patience, bool enabled);

  Decision observe(double accuracy);

  double best() const { return best_; }
  int checks() const { return checks_; }
  int since_improvement() const { return since_improvement_; }

 private:
  int patience_;
  bool enabled_;
  double best_ = -std::numeric_limits<double>::infinity();
  int checks_ = 0;
  int since_improvement_ = 0;
};

}  // namespace lseq::train
