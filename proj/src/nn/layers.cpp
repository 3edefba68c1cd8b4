#include "lseq/nn/layers.hpp"

#include "lseq/core/error.hpp"

namespace lseq::nn {

template <typename S>
Dense<S>::Dense(const std::string& name, Index in, Index out)
    : weight(name + ".weight", in, out), bias(name + ".bias", 1, out) {}

template <typename S>
void Dense<S>::init(Rng& rng) {
  init_fan_in_uniform(weight, weight.value.rows(), rng);
  bias.value.setZero();
}

template <typename S>
Mat<S> Dense<S>::forward(const Mat<S>& x) const {
  if (x.cols() != weight.value.rows()) {
    throw ShapeError(weight.name + ": expected " + std::to_string(weight.value.rows()) + " input features, got " +
                     std::to_string(x.cols()));
  }
  Mat<S> y = x * weight.value;
  y.rowwise() += bias.value.row(0);
  return y;
}

template <typename S>
Mat<S> Dense<S>::backward(const Mat<S>& x, const Mat<S>& dy) {
  weight.grad.noalias() += x.transpose() * dy;
  bias.grad += dy.colwise().sum();
  return dy * weight.value.transpose();
}

template <typename S>
void Dense<S>::collect(ParamList<S>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

template <typename S>
LayerNorm<S>::LayerNorm(const std::string& name, Index width)
    : gain(name + ".gain", 1, width), shift(name + ".shift", 1, width) {
  gain.value.setOnes();
}

template <typename S>
Mat<S> LayerNorm<S>::forward(const Mat<S>& x, Cache& cache) const {
  const auto n = static_cast<S>(x.cols());
  const Eigen::Matrix<S, Eigen::Dynamic, 1> mean = x.rowwise().sum() / n;
  cache.xhat = x.colwise() - mean;
  const Eigen::Matrix<S, Eigen::Dynamic, 1> var = cache.xhat.rowwise().squaredNorm() / n;
  cache.inv_std = (var.array() + static_cast<S>(kEps)).rsqrt().matrix();
  cache.xhat = cache.inv_std.asDiagonal() * cache.xhat;
  Mat<S> y = cache.xhat.array().rowwise() * gain.value.row(0).array();
  y.rowwise() += shift.value.row(0);
  return y;
}

template <typename S>
Mat<S> LayerNorm<S>::backward(const Mat<S>& dy, const Cache& cache) {
  gain.grad += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  shift.grad += dy.colwise().sum();
  const auto n = static_cast<S>(dy.cols());
  const Mat<S> dxhat = dy.array().rowwise() * gain.value.row(0).array();
  const Eigen::Matrix<S, Eigen::Dynamic, 1> mean_d = dxhat.rowwise().sum() / n;
  const Eigen::Matrix<S, Eigen::Dynamic, 1> mean_dx =
      (dxhat.array() * cache.xhat.array()).rowwise().sum().matrix() / n;
  Mat<S> dx = dxhat.colwise() - mean_d;
  dx.array() -= cache.xhat.array().colwise() * mean_dx.array();
  return cache.inv_std.asDiagonal() * dx;
}

template <typename S>
void LayerNorm<S>::collect(ParamList<S>& out) {
  out.push_back(&gain);
  out.push_back(&shift);
}

template <typename S>
Mat<S> dropout_forward(const Mat<S>& x, double rate, const ForwardContext& ctx, DropoutMask<S>& mask) {
  if (!ctx.training() || rate <= 0.0) {
    mask.scale.resize(0, 0);
    return x;
  }
  if (ctx.rng == nullptr) throw Error("dropout in train mode needs an RNG");
  const S keep_scale = static_cast<S>(1.0 / (1.0 - rate));
  mask.scale.resize(x.rows(), x.cols());
  for (Index i = 0; i < mask.scale.size(); ++i) {
    mask.scale.data()[i] = uniform01(*ctx.rng) < rate ? S(0) : keep_scale;
  }
  return x.cwiseProduct(mask.scale);
}

template <typename S>
Mat<S> dropout_backward(const Mat<S>& dy, const DropoutMask<S>& mask) {
  if (!mask.active()) return dy;
  return dy.cwiseProduct(mask.scale);
}

template class Dense<float>;
template class Dense<double>;
template class LayerNorm<float>;
template class LayerNorm<double>;
template Mat<float> dropout_forward(const Mat<float>&, double, const ForwardContext&, DropoutMask<float>&);
template Mat<double> dropout_forward(const Mat<double>&, double, const ForwardContext&, DropoutMask<double>&);
template Mat<float> dropout_backward(const Mat<float>&, const DropoutMask<float>&);
template Mat<double> dropout_backward(const Mat<double>&, const DropoutMask<double>&);

}  // namespace lseq::nn
