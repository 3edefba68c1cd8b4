#pragma once

#include "lseq/eval/metrics.hpp"
#include "lseq/eval/scoring.hpp"
#include "lseq/frontend/recording_io.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace lseq::eval {

enum class Protocol { Loso, Split };

Protocol parse_protocol(const std::string& name);
std::string protocol_name(Protocol p);

struct CvConfig {
  Protocol protocol = Protocol::Loso;
  Index repetitions = 1;
  double test_fraction = 0.3;    // split protocol
  Index validation_subjects = 1;  // taken from the non-test subjects of every fold
  std::uint64_t seed = 1;
  Index stride = 0;  // 0: L
  Index batch_size = 8;

  void validate() const;
};

struct Fold {
  Index repetition = 0;
  Index index = 0;
  std::vector<std::string> train_subjects;
  std::vector<std::string> validation_subjects;
  std::vector<std::string> test_subjects;
};

// Subject ids in order of first appearance.
std::vector<std::string> subjects_of(const std::vector<FeatureArchive>& recordings);

// LOSO: one fold per subject. Split: one fold per repetition holding out
// ceil(test_fraction * S) subjects. Validation subjects are drawn from the
// remaining subjects with the repetition's seed.
std::vector<Fold> make_folds(const std::vector<std::string>& subjects, const CvConfig& config, Index repetition);

// Throws if a subject sits in two roles of one fold or in the test set of
// two folds of one repetition.
void check_folds(const std::vector<Fold>& folds);

// Trains (or otherwise produces) the stager of one fold.
using FoldTrainer = std::function<std::unique_ptr<Stager>(const Fold&, const std::vector<FeatureArchive>& train,
                                                          const std::vector<FeatureArchive>& validation)>;

struct RecordingScore {
  std::string recording_id;
  std::string subject_id;
  Index repetition = 0;
  Index fold = 0;
  Index epochs = 0;  // valid epochs scored
  double accuracy = 0.0;
};

struct FoldResult {
  Fold fold;
  ConfusionMatrix confusion;
  MetricReport report;
  std::vector<RecordingScore> recordings;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over repetitions (0 for one)
};

struct CvResult {
  std::vector<FoldResult> folds;
  std::vector<ConfusionMatrix> pooled;  // per repetition, sum of its fold matrices
  std::vector<MetricReport> repetition_reports;
  MetricSummary accuracy, kappa, macro_f1, sensitivity, specificity;
  std::array<MetricSummary, kClasses> per_class_f1{};
};

// Scores every test recording of a fold and accumulates its confusion matrix.
FoldResult evaluate_fold(Stager& stager, const Fold& fold, const std::vector<FeatureArchive>& test,
                         Index stride, Index batch_size);

CvResult cross_validate(const std::vector<FeatureArchive>& recordings, const CvConfig& config,
                        const FoldTrainer& trainer);

MetricSummary summarize(const std::vector<double>& values);

}  // namespace lseq::eval
