#include "lseq/nn/batch_norm.hpp"

namespace lseq::nn {

template <typename S>
RecurrentBatchNorm<S>::RecurrentBatchNorm(const std::string& name, Index width, bool with_shift, double gamma_init)
    : gamma(name + ".gamma", 1, width),
      running_mean(name + ".running_mean", 1, width, false),
      running_var(name + ".running_var", 1, width, false) {
  gamma.value.setConstant(static_cast<S>(gamma_init));
  if (with_shift) beta = Param<S>(name + ".beta", 1, width);
  running_var.value.setOnes();
}

template <typename S>
Mat<S> RecurrentBatchNorm<S>::forward_step(const Mat<S>& x, Mode mode, StepCache& cache) {
  const Index n = x.rows();
  if (mode == Mode::Train) {
    const RowVec<S> mean = x.colwise().sum() / static_cast<S>(n);
    cache.xhat = x.rowwise() - mean;
    const RowVec<S> var = cache.xhat.colwise().squaredNorm() / static_cast<S>(n);
    cache.inv_std = (var.array() + static_cast<S>(kEps)).rsqrt().matrix();
    if (steps_ == 0) {
      mean_sum_ = RowVec<double>::Zero(x.cols());
      var_sum_ = RowVec<double>::Zero(x.cols());
    }
    mean_sum_ += mean.template cast<double>();
    var_sum_ += var.template cast<double>();
    ++steps_;
  } else {
    cache.xhat = x.rowwise() - running_mean.value.row(0);
    cache.inv_std = (running_var.value.row(0).array() + static_cast<S>(kEps)).rsqrt().matrix();
  }
  cache.xhat.array().rowwise() *= cache.inv_std.array();
  Mat<S> y = cache.xhat.array().rowwise() * gamma.value.row(0).array();
  if (beta.size() > 0) y.rowwise() += beta.value.row(0);
  return y;
}

template <typename S>
Mat<S> RecurrentBatchNorm<S>::backward_step(const Mat<S>& dy, const StepCache& cache, Mode mode) {
  gamma.grad += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  if (beta.size() > 0) beta.grad += dy.colwise().sum();
  Mat<S> dxhat = dy.array().rowwise() * gamma.value.row(0).array();
  if (mode == Mode::Train) {
    const auto n = static_cast<S>(dy.rows());
    const RowVec<S> mean_d = dxhat.colwise().sum() / n;
    const RowVec<S> mean_dx = (dxhat.array() * cache.xhat.array()).colwise().sum().matrix() / n;
    dxhat.rowwise() -= mean_d;
    dxhat.array() -= cache.xhat.array().rowwise() * mean_dx.array();
  }
  dxhat.array().rowwise() *= cache.inv_std.array();
  return dxhat;
}

template <typename S>
void RecurrentBatchNorm<S>::begin_sequence() {
  steps_ = 0;
}

template <typename S>
void RecurrentBatchNorm<S>::end_sequence() {
  if (steps_ == 0) return;
  const double inv = 1.0 / static_cast<double>(steps_);
  running_mean.value.row(0) = ((1.0 - kMomentum) * running_mean.value.row(0).template cast<double>() +
                               kMomentum * inv * mean_sum_)
                                  .template cast<S>();
  running_var.value.row(0) = ((1.0 - kMomentum) * running_var.value.row(0).template cast<double>() +
                              kMomentum * inv * var_sum_)
                                 .template cast<S>();
  steps_ = 0;
}

template <typename S>
void RecurrentBatchNorm<S>::collect(ParamList<S>& out) {
  out.push_back(&gamma);
  if (beta.size() > 0) out.push_back(&beta);
  out.push_back(&running_mean);
  out.push_back(&running_var);
}

template class RecurrentBatchNorm<float>;
template class RecurrentBatchNorm<double>;

}  // namespace lseq::nn
