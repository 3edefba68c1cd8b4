#pragma once

#include "lseq/core/params.hpp"
#include "lseq/core/tensor.hpp"

#include <string>

namespace lseq::nn {

// Learnable non-negative filterbank: y = x softplus(W), W is F x M.
template <typename S>
class Filterbank {
 public:
  Filterbank() = default;
  Filterbank(const std::string& name, Index bins, Index filters);

  // Triangular filters with peaks evenly spaced from bin 0 to bin F-1.
  void init_triangular();
  Mat<S> effective() const;
  Mat<S> forward(const Mat<S>& x) const;
  // Accumulates the weight gradient; the input is data, so dL/dx is not formed.
  void backward(const Mat<S>& x, const Mat<S>& dy);
  void collect(ParamList<S>& out);

  Index bins() const { return weight.value.rows(); }
  Index filters() const { return weight.value.cols(); }

  Param<S> weight;

  static constexpr double kInitFloor = 1e-3;
};

// S~ = S W for an already non-negative F x M weight matrix.
template <typename S>
Mat<S> apply_filterbank(const Mat<S>& image, const Mat<S>& weights);

double softplus(double x);
double softplus_inverse(double y);

extern template class Filterbank<float>;
extern template class Filterbank<double>;

}  // namespace lseq::nn
