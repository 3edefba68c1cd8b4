#include "lseq/train/adam.hpp"

#include "lseq/core/error.hpp"

#include <cmath>

namespace lseq::train {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error("adam: learning rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) throw Error("adam: betas must be in (0, 1)");
  if (!(epsilon > 0.0)) throw Error("adam: epsilon must be positive");
}

template <typename S>
Adam<S>::Adam(const ParamList<S>& params, const AdamConfig& config) : config_(config) {
  config.validate();
  for (auto* p : params) {
    if (p->trainable) tensors_.push_back(p);
  }
  reset();
}

template <typename S>
void Adam<S>::reset() {
  m_.clear();
  v_.clear();
  for (auto* p : tensors_) {
    m_.push_back(Mat<S>::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Mat<S>::Zero(p->value.rows(), p->value.cols()));
  }
  t_ = 0;
}

template <typename S>
void Adam<S>::step() {
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const auto c1 = static_cast<S>(1.0 / (1.0 - std::pow(b1, static_cast<double>(t_))));
  const auto c2 = static_cast<S>(1.0 / (1.0 - std::pow(b2, static_cast<double>(t_))));
  const auto lr = static_cast<S>(config_.learning_rate);
  const auto eps = static_cast<S>(config_.epsilon);
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    auto& g = tensors_[i]->grad;
    m_[i] = static_cast<S>(b1) * m_[i] + static_cast<S>(1.0 - b1) * g;
    v_[i] = static_cast<S>(b2) * v_[i] + static_cast<S>(1.0 - b2) * g.cwiseAbs2();
    tensors_[i]->value.array() -= lr * (m_[i].array() * c1) / ((v_[i].array() * c2).sqrt() + eps);
  }
}

template <typename S>
double gradient_norm(const ParamList<S>& params) {
  double sq = 0.0;
  for (const auto* p : params) {
    if (p->trainable) sq += p->grad.template cast<double>().squaredNorm();
  }
  return std::sqrt(sq);
}

template <typename S>
double clip_global_norm(const ParamList<S>& params, double max_norm) {
  const double norm = gradient_norm(params);
  if (max_norm > 0.0 && norm > max_norm) {
    const auto scale = static_cast<S>(max_norm / norm);
    for (auto* p : params) {
      if (p->trainable) p->grad *= scale;
    }
  }
  return norm;
}

template class Adam<float>;
template class Adam<double>;
template double clip_global_norm(const ParamList<float>&, double);
template double clip_global_norm(const ParamList<double>&, double);
template double gradient_norm(const ParamList<float>&);
template double gradient_norm(const ParamList<double>&);

}  // namespace lseq::train
