#pragma once

#include "lseq/core/rng.hpp"
#include "lseq/core/tensor.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace lseq {

// A named tensor owned by a layer. Trainable tensors carry a gradient buffer;
// non-trainable ones (batch-norm running statistics) are persistent state that
// is checkpointed but never touched by the optimizer.
template <typename S>
struct Param {
  std::string name;
  Mat<S> value;
  Mat<S> grad;
  bool trainable = true;

  Param() = default;
  Param(std::string n, Index rows, Index cols, bool is_trainable = true)
      : name(std::move(n)),
        value(Mat<S>::Zero(rows, cols)),
        grad(Mat<S>::Zero(rows, cols)),
        trainable(is_trainable) {}

  Index size() const { return value.size(); }
  void zero_grad() { grad.setZero(); }
};

template <typename S>
using ParamList = std::vector<Param<S>*>;

template <typename S>
void zero_grads(const ParamList<S>& params) {
  for (auto* p : params) {
    if (p->trainable) p->zero_grad();
  }
}

template <typename S>
double squared_l2(const ParamList<S>& params) {
  double sum = 0.0;
  for (const auto* p : params) {
    if (p->trainable) sum += p->value.template cast<double>().squaredNorm();
  }
  return sum;
}

template <typename S>
Index trainable_count(const ParamList<S>& params) {
  Index n = 0;
  for (const auto* p : params) {
    if (p->trainable) n += p->size();
  }
  return n;
}

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
template <typename S>
void init_fan_in_uniform(Param<S>& p, Index fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (Index i = 0; i < p.value.size(); ++i) {
    p.value.data()[i] = static_cast<S>((2.0 * uniform01(rng) - 1.0) * bound);
  }
}

}  // namespace lseq
