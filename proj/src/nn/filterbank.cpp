#include "lseq/nn/filterbank.hpp"

#include "lseq/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace lseq::nn {

double softplus(double x) {
  return x > 30.0 ? x : std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
  if (!(y > 0.0)) throw Error("softplus_inverse needs a positive argument");
  return y > 30.0 ? y : std::log(std::expm1(y));
}

namespace {

template <typename S>
Mat<S> softplus_of(const Mat<S>& w) {
  Mat<S> out(w.rows(), w.cols());
  for (Index i = 0; i < w.size(); ++i) out.data()[i] = static_cast<S>(softplus(static_cast<double>(w.data()[i])));
  return out;
}

}  // namespace

template <typename S>
Mat<S> apply_filterbank(const Mat<S>& image, const Mat<S>& weights) {
  if (image.cols() != weights.rows()) {
    throw ShapeError("filterbank: image has " + std::to_string(image.cols()) + " bins, filterbank expects " +
                     std::to_string(weights.rows()));
  }
  return image * weights;
}

template <typename S>
Filterbank<S>::Filterbank(const std::string& name, Index bins, Index filters) : weight(name + ".weight", bins, filters) {
  if (filters < 1 || filters >= bins) {
    throw ShapeError(name + ": filter count must be in [1, bins), got " + std::to_string(filters));
  }
}

template <typename S>
void Filterbank<S>::init_triangular() {
  const Index f = bins();
  const Index m = filters();
  const double spacing = m > 1 ? static_cast<double>(f - 1) / static_cast<double>(m - 1) : static_cast<double>(f - 1);
  for (Index j = 0; j < m; ++j) {
    const double peak = m > 1 ? spacing * static_cast<double>(j) : 0.5 * static_cast<double>(f - 1);
    for (Index i = 0; i < f; ++i) {
      const double tri = 1.0 - std::abs(static_cast<double>(i) - peak) / spacing;
      weight.value(i, j) = static_cast<S>(softplus_inverse(std::max(kInitFloor, tri)));
    }
  }
}

template <typename S>
Mat<S> Filterbank<S>::effective() const {
  return softplus_of(weight.value);
}

template <typename S>
Mat<S> Filterbank<S>::forward(const Mat<S>& x) const {
  return apply_filterbank(x, effective());
}

template <typename S>
void Filterbank<S>::backward(const Mat<S>& x, const Mat<S>& dy) {
  const Mat<S> d_eff = x.transpose() * dy;
  // d softplus(w) / dw = sigmoid(w)
  const Mat<S> slope = (S(1) + (-weight.value.array()).exp()).inverse().matrix();
  weight.grad += d_eff.cwiseProduct(slope);
}

template <typename S>
void Filterbank<S>::collect(ParamList<S>& out) {
  out.push_back(&weight);
}

template Mat<float> apply_filterbank(const Mat<float>&, const Mat<float>&);
template Mat<double> apply_filterbank(const Mat<double>&, const Mat<double>&);
template class Filterbank<float>;
template class Filterbank<double>;

}  // namespace lseq::nn
