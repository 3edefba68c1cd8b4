#include "lseq/eval/metrics.hpp"

#include "lseq/core/error.hpp"

namespace lseq::eval {

void ConfusionMatrix::add(int reference, int predicted, std::int64_t n) {
  if (reference < 0 || reference >= kClasses || predicted < 0 || predicted >= kClasses) {
    throw Error("confusion matrix: stage code out of range");
  }
  if (n < 0) throw Error("confusion matrix: negative count");
  counts[static_cast<std::size_t>(reference)][static_cast<std::size_t>(predicted)] += n;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts) {
    for (auto v : row) t += v;
  }
  return t;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (int i = 0; i < kClasses; ++i) t += counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t i = 0; i < kClasses; ++i) {
    for (std::size_t j = 0; j < kClasses; ++j) counts[i][j] += other.counts[i][j];
  }
  return *this;
}

MetricReport compute_metrics(const ConfusionMatrix& cm) {
  MetricReport r;
  r.total = cm.total();
  if (r.total <= 0) throw Error("compute_metrics: confusion matrix is empty");
  const double n = static_cast<double>(r.total);
  std::array<double, kClasses> row{}, col{};
  for (std::size_t i = 0; i < kClasses; ++i) {
    for (std::size_t j = 0; j < kClasses; ++j) {
      row[i] += static_cast<double>(cm.counts[i][j]);
      col[j] += static_cast<double>(cm.counts[i][j]);
    }
  }
  const double po = static_cast<double>(cm.trace()) / n;
  double pe = 0.0;
  for (std::size_t c = 0; c < kClasses; ++c) pe += (row[c] / n) * (col[c] / n);
  r.accuracy = po;
  if (1.0 - pe == 0.0) {
    r.kappa = 0.0;
    r.kappa_degenerate = true;
  } else {
    r.kappa = (po - pe) / (1.0 - pe);
  }

  double f1_sum = 0.0, sens_sum = 0.0, spec_sum = 0.0;
  for (std::size_t c = 0; c < kClasses; ++c) {
    const double tp = static_cast<double>(cm.counts[c][c]);
    const double fn = row[c] - tp;
    const double fp = col[c] - tp;
    const double tn = n - tp - fn - fp;
    const double denom = 2.0 * tp + fp + fn;
    if (row[c] == 0.0 && col[c] == 0.0) {
      r.per_class_f1[c] = 0.0;
      r.absent_classes.push_back(static_cast<int>(c));
    } else {
      r.per_class_f1[c] = 2.0 * tp / denom;
    }
    f1_sum += r.per_class_f1[c];
    sens_sum += row[c] > 0.0 ? tp / row[c] : 0.0;
    spec_sum += (tn + fp) > 0.0 ? tn / (tn + fp) : 0.0;
  }
  r.macro_f1 = f1_sum / kClasses;
  r.mean_sensitivity = sens_sum / kClasses;
  r.mean_specificity = spec_sum / kClasses;
  return r;
}

ConfusionMatrix confusion_from_labels(const std::vector<std::uint8_t>& reference,
                                      const std::vector<std::uint8_t>& predicted,
                                      const std::vector<std::uint8_t>& valid) {
  if (reference.size() != predicted.size() || reference.size() != valid.size()) {
    throw ShapeError("confusion_from_labels: length mismatch");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (valid[i]) cm.add(reference[i], predicted[i]);
  }
  return cm;
}

}  // namespace lseq::eval
