#pragma once

#include "lseq/core/tensor.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lseq::eval {

inline constexpr int kClasses = 5;

// Rows are reference stages, columns predicted stages.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kClasses>, kClasses> counts{};

  void add(int reference, int predicted, std::int64_t n = 1);
  std::int64_t total() const;
  std::int64_t trace() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricReport {
  double accuracy = 0.0;
  double kappa = 0.0;
  double macro_f1 = 0.0;
  double mean_sensitivity = 0.0;
  double mean_specificity = 0.0;
  std::array<double, kClasses> per_class_f1{};
  std::int64_t total = 0;
  bool kappa_degenerate = false;
  std::vector<int> absent_classes;  // absent from reference and prediction; F1 set to 0
};

// Accuracy, Cohen's kappa, per-class and macro F1, macro-averaged
// sensitivity (recall) and specificity (true-negative rate).
MetricReport compute_metrics(const ConfusionMatrix& cm);

// Accumulates valid positions only.
ConfusionMatrix confusion_from_labels(const std::vector<std::uint8_t>& reference,
                                      const std::vector<std::uint8_t>& predicted,
                                      const std::vector<std::uint8_t>& valid);

}  // namespace lseq::eval
