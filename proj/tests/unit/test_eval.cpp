#include "lseq/core/error.hpp"
#include "lseq/core/rng.hpp"
#include "lseq/eval/metrics.hpp"
#include "lseq/eval/scoring.hpp"
#include "lseq/train/sampler.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace lseq;
using namespace lseq::eval;

namespace {

// Metrics recomputed from the expanded list of (reference, predicted) pairs.
struct OracleMetrics {
  double accuracy, kappa, macro_f1, sensitivity, specificity;
  std::array<double, kClasses> f1;
};

OracleMetrics oracle(const ConfusionMatrix& cm) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < kClasses; ++i) {
    for (int j = 0; j < kClasses; ++j) {
      for (std::int64_t k = 0; k < cm.counts[i][j]; ++k) pairs.emplace_back(i, j);
    }
  }
  const double n = static_cast<double>(pairs.size());
  OracleMetrics m{};
  double agree = 0.0;
  for (auto [r, p] : pairs) agree += r == p;
  m.accuracy = agree / n;
  double chance = 0.0;
  for (int c = 0; c < kClasses; ++c) {
    double ref = 0.0, pred = 0.0;
    for (auto [r, p] : pairs) {
      ref += r == c;
      pred += p == c;
    }
    chance += (ref / n) * (pred / n);
  }
  m.kappa = chance == 1.0 ? 0.0 : (m.accuracy - chance) / (1.0 - chance);
  for (int c = 0; c < kClasses; ++c) {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (auto [r, p] : pairs) {
      if (r == c && p == c) ++tp;
      else if (r != c && p == c) ++fp;
      else if (r == c && p != c) ++fn;
      else ++tn;
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.f1[c] = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.macro_f1 += m.f1[c] / kClasses;
    m.sensitivity += recall / kClasses;
    m.specificity += (tn + fp > 0 ? tn / (tn + fp) : 0.0) / kClasses;
  }
  return m;
}

ConfusionMatrix random_cm(Rng& rng) {
  ConfusionMatrix cm;
  for (int i = 0; i < kClasses; ++i) {
    for (int j = 0; j < kClasses; ++j) cm.counts[i][j] = static_cast<std::int64_t>(uniform_below(rng, 40));
  }
  // Occasionally empty a class entirely to exercise the absent-class path.
  if (uniform_below(rng, 5) == 0) {
    const auto c = static_cast<int>(uniform_below(rng, kClasses));
    for (int k = 0; k < kClasses; ++k) cm.counts[c][k] = cm.counts[k][c] = 0;
  }
  return cm;
}

frontend::FeatureArchive toy_recording(Index R, std::uint64_t seed) {
  frontend::FeatureArchive a;
  a.recording_id = "toy";
  a.subject_id = "s";
  a.frames = 2;
  a.bins = 3;
  Rng rng = substream(seed, "toy");
  for (Index e = 0; e < R; ++e) {
    a.hypnogram.stages.push_back(static_cast<std::uint8_t>(uniform_below(rng, 5)));
    a.hypnogram.valid.push_back(1);
  }
  a.values.resize(static_cast<std::size_t>(R * 6));
  for (auto& v : a.values) v = static_cast<float>(normal01(rng));
  return a;
}

// Posteriors depend on the epoch's features and on its position inside the
// window, so overlapping windows disagree and averaging is observable.
class PositionalStager : public Stager {
 public:
  explicit PositionalStager(Index length) : length_(length) {}
  Index length() const override { return length_; }
  MatD posteriors(const model::SequenceBatch<float>& batch) override {
    ++calls;
    MatD p(batch.epochs(), kClasses);
    for (Index i = 0; i < batch.epochs(); ++i) p.row(i) = window_posterior(batch.images, i, i % length_);
    return p;
  }
  static RowVec<double> window_posterior(const MatF& images, Index epoch, Index position) {
    RowVec<double> logits(kClasses);
    for (int c = 0; c < kClasses; ++c) {
      logits(c) = images(epoch * 2 + c % 2, c % 3) + 0.3 * static_cast<double>(position * (c + 1));
    }
    logits = (logits.array() - logits.maxCoeff()).exp();
    return logits / logits.sum();
  }
  int calls = 0;

 private:
  Index length_;
};

}  // namespace

TEST(Metrics, MatchOracleOnRandomMatrices) {
  Rng rng = substream(21, "metrics");
  for (int trial = 0; trial < 100; ++trial) {
    const auto cm = random_cm(rng);
    const auto r = compute_metrics(cm);
    const auto o = oracle(cm);
    ASSERT_NEAR(r.accuracy, o.accuracy, 1e-12);
    ASSERT_NEAR(r.kappa, o.kappa, 1e-12);
    ASSERT_NEAR(r.macro_f1, o.macro_f1, 1e-12);
    ASSERT_NEAR(r.mean_sensitivity, o.sensitivity, 1e-12);
    ASSERT_NEAR(r.mean_specificity, o.specificity, 1e-12);
    for (int c = 0; c < kClasses; ++c) ASSERT_NEAR(r.per_class_f1[c], o.f1[c], 1e-12);
  }
}

TEST(Metrics, PerfectAgreement) {
  ConfusionMatrix cm;
  for (int c = 0; c < kClasses; ++c) cm.add(c, c, 10 + c);
  const auto r = compute_metrics(cm);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.kappa, 1.0);
  EXPECT_EQ(r.macro_f1, 1.0);
  EXPECT_EQ(r.mean_sensitivity, 1.0);
  EXPECT_EQ(r.mean_specificity, 1.0);
}

TEST(Metrics, ConstantMajorityPredictionHasZeroKappa) {
  ConfusionMatrix cm;
  cm.add(2, 2, 60);
  cm.add(0, 2, 40);
  const auto r = compute_metrics(cm);
  EXPECT_EQ(r.kappa, 0.0);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
}

TEST(Metrics, DegenerateCases) {
  ConfusionMatrix single;
  single.add(1, 1, 7);
  const auto r = compute_metrics(single);
  EXPECT_TRUE(r.kappa_degenerate);
  EXPECT_EQ(r.kappa, 0.0);
  EXPECT_EQ(r.absent_classes, (std::vector<int>{0, 2, 3, 4}));
  EXPECT_THROW(compute_metrics(ConfusionMatrix{}), Error);
}

TEST(Metrics, KappaInvariantUnderClassRelabeling) {
  Rng rng = substream(22, "perm");
  for (int trial = 0; trial < 20; ++trial) {
    const auto cm = random_cm(rng);
    std::array<int, kClasses> perm{0, 1, 2, 3, 4};
    lseq::shuffle(perm.begin(), perm.end(), rng);
    ConfusionMatrix permuted;
    for (int i = 0; i < kClasses; ++i) {
      for (int j = 0; j < kClasses; ++j) permuted.counts[perm[i]][perm[j]] = cm.counts[i][j];
    }
    const auto a = compute_metrics(cm);
    const auto b = compute_metrics(permuted);
    EXPECT_NEAR(a.kappa, b.kappa, 1e-12);
    EXPECT_NEAR(a.macro_f1, b.macro_f1, 1e-12);
  }
}

TEST(Metrics, ConfusionFromLabelsSkipsMasked) {
  const auto cm = confusion_from_labels({0, 1, 2, 3}, {0, 2, 2, 3}, {1, 1, 0, 1});
  EXPECT_EQ(cm.total(), 3);
  EXPECT_EQ(cm.trace(), 2);
  EXPECT_EQ(cm.counts[1][2], 1);
}

TEST(Scoring, WindowStarts) {
  EXPECT_EQ(window_starts(20, 20, 20), (std::vector<Index>{0}));
  EXPECT_EQ(window_starts(40, 20, 20), (std::vector<Index>{0, 20}));
  EXPECT_EQ(window_starts(45, 20, 20), (std::vector<Index>{0, 20, 25}));
  EXPECT_EQ(window_starts(5, 20, 20), (std::vector<Index>{0}));
  EXPECT_THROW(window_starts(5, 2, 0), Error);
}

TEST(Scoring, SingleWindowIsArgmax) {
  const auto rec = toy_recording(6, 1);
  PositionalStager stager(6);
  const auto scored = score_recording(stager, rec, 6);
  const auto batch = train::assemble_windows(rec, {0}, 6);
  for (Index e = 0; e < 6; ++e) {
    const auto p = PositionalStager::window_posterior(batch.images, e, e);
    Index best;
    p.maxCoeff(&best);
    EXPECT_EQ(scored.predicted[e], best);
    EXPECT_EQ(scored.coverage[e], 1);
  }
}

TEST(Scoring, DisjointWindowsDoNotAverage) {
  const auto rec = toy_recording(12, 2);
  PositionalStager stager(6);
  const auto scored = score_recording(stager, rec, 6);
  for (auto c : scored.coverage) EXPECT_EQ(c, 1);
  const auto batch = train::assemble_windows(rec, {0, 6}, 6);
  for (Index e = 0; e < 12; ++e) {
    const auto p = PositionalStager::window_posterior(batch.images, e, e % 6);
    EXPECT_LT((scored.posteriors.row(e) - p).norm(), 1e-12);
  }
}

TEST(Scoring, OverlappingWindowsAverageLikeExplicitLoop) {
  const Index L = 6, R = L + 1;
  const auto rec = toy_recording(R, 3);
  PositionalStager stager(L);
  const auto scored = score_recording(stager, rec, 1, 1);
  EXPECT_EQ(stager.calls, 2);
  MatD sum = MatD::Zero(R, kClasses);
  std::vector<int> count(R, 0);
  for (Index start = 0; start + L <= R; ++start) {
    const auto batch = train::assemble_windows(rec, {start}, L);
    for (Index l = 0; l < L; ++l) {
      sum.row(start + l) += PositionalStager::window_posterior(batch.images, l, l);
      ++count[start + l];
    }
  }
  EXPECT_EQ(count.front(), 1);
  EXPECT_EQ(count[3], 2);
  for (Index e = 0; e < R; ++e) {
    EXPECT_EQ(scored.coverage[e], count[e]);
    EXPECT_LT((scored.posteriors.row(e) - sum.row(e) / count[e]).norm(), 1e-12);
  }
}

TEST(Scoring, OracleStagerIsPerfectAndShortRecordingsArePadded) {
  const auto rec = toy_recording(4, 4);
  OracleStager oracle_stager(10);
  const auto scored = score_recording(oracle_stager, rec, 10);
  ASSERT_EQ(scored.predicted.size(), 4u);
  EXPECT_EQ(scored.predicted, rec.hypnogram.stages);
  EXPECT_EQ(recording_accuracy(rec, scored), 1.0);
}
