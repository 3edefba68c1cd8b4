#pragma once

#include "lseq/core/params.hpp"

#include <cstdint>
#include <vector>

namespace lseq::train {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;

  void validate() const;
};

// Adam over the trainable tensors of a parameter list. Moment buffers are
// indexed like the trainable subsequence of the list.
template <typename S>
class Adam {
 public:
  Adam(const ParamList<S>& params, const AdamConfig& config);

  void step();
  void reset();

  std::int64_t steps() const { return t_; }
  void set_steps(std::int64_t t) { t_ = t; }
  const std::vector<Param<S>*>& tensors() const { return tensors_; }
  std::vector<Mat<S>>& first_moments() { return m_; }
  std::vector<Mat<S>>& second_moments() { return v_; }
  const std::vector<Mat<S>>& first_moments() const { return m_; }
  const std::vector<Mat<S>>& second_moments() const { return v_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<Param<S>*> tensors_;
  std::vector<Mat<S>> m_;
  std::vector<Mat<S>> v_;
  std::int64_t t_ = 0;
};

// Rescales all trainable gradients so their joint L2 norm is at most
// max_norm. Returns the norm before clipping.
template <typename S>
double clip_global_norm(const ParamList<S>& params, double max_norm);

template <typename S>
double gradient_norm(const ParamList<S>& params);

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace lseq::train
