#pragma once

#include "lseq/core/params.hpp"
#include "lseq/core/tensor.hpp"

#include <string>

namespace lseq::nn {

// Batch normalization for recurrent gate pre-activations.
//
// Training normalizes each timestep with the statistics of that timestep's
// batch; a single set of running statistics is shared by all timesteps of
// the layer and is what evaluation uses. Running statistics are refreshed
// once per sequence with the timestep-averaged batch statistics.
template <typename S>
class RecurrentBatchNorm {
 public:
  struct StepCache {
    Mat<S> xhat;
    RowVec<S> inv_std;
  };

  RecurrentBatchNorm() = default;
  RecurrentBatchNorm(const std::string& name, Index width, bool with_shift, double gamma_init);

  Mat<S> forward_step(const Mat<S>& x, Mode mode, StepCache& cache);
  Mat<S> backward_step(const Mat<S>& dy, const StepCache& cache, Mode mode);

  // Sequence bracket for running-statistics accumulation (train mode).
  void begin_sequence();
  void end_sequence();

  void collect(ParamList<S>& out);
  Index width() const { return gamma.value.cols(); }

  Param<S> gamma;
  Param<S> beta;  // empty when the layer has no shift
  Param<S> running_mean;
  Param<S> running_var;

  static constexpr double kEps = 1e-5;
  static constexpr double kMomentum = 0.1;

 private:
  RowVec<double> mean_sum_;
  RowVec<double> var_sum_;
  Index steps_ = 0;
};

extern template class RecurrentBatchNorm<float>;
extern template class RecurrentBatchNorm<double>;

}  // namespace lseq::nn
