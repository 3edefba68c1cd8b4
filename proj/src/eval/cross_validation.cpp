#include "lseq/eval/cross_validation.hpp"

#include "lseq/core/error.hpp"
#include "lseq/core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace lseq::eval {

Protocol parse_protocol(const std::string& name) {
  if (name == "loso") return Protocol::Loso;
  if (name == "split") return Protocol::Split;
  throw Error("unknown protocol '" + name + "' (expected loso or split)");
}

std::string protocol_name(Protocol p) { return p == Protocol::Loso ? "loso" : "split"; }

void CvConfig::validate() const {
  if (repetitions < 1) throw Error("cross-validation: repetitions must be at least 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("cross-validation: test_fraction must be in (0, 1)");
  if (validation_subjects < 0) throw Error("cross-validation: validation_subjects must be non-negative");
  if (stride < 0 || batch_size < 1) throw Error("cross-validation: bad stride or batch size");
}

std::vector<std::string> subjects_of(const std::vector<FeatureArchive>& recordings) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : recordings) {
    if (seen.insert(r.subject_id).second) out.push_back(r.subject_id);
  }
  return out;
}

std::vector<Fold> make_folds(const std::vector<std::string>& subjects, const CvConfig& config, Index repetition) {
  config.validate();
  const auto S = static_cast<Index>(subjects.size());
  if (config.protocol == Protocol::Loso && S < 2) throw Error("LOSO needs at least 2 subjects, got " + std::to_string(S));
  std::vector<Fold> folds;
  auto assign_rest = [&](Fold& f, std::vector<std::string> rest, std::uint64_t stream) {
    Rng rng = substream(config.seed, "validation", stream);
    lseq::shuffle(rest.begin(), rest.end(), rng);
    const auto n_val = std::min<Index>(config.validation_subjects, static_cast<Index>(rest.size()) - 1);
    if (n_val < 0 || (config.validation_subjects > 0 && n_val < 1)) {
      throw Error("not enough subjects for a training and a validation set");
    }
    f.validation_subjects.assign(rest.begin(), rest.begin() + n_val);
    f.train_subjects.assign(rest.begin() + n_val, rest.end());
  };
  if (config.protocol == Protocol::Loso) {
    for (Index i = 0; i < S; ++i) {
      Fold f;
      f.repetition = repetition;
      f.index = i;
      f.test_subjects = {subjects[i]};
      std::vector<std::string> rest;
      for (Index j = 0; j < S; ++j) {
        if (j != i) rest.push_back(subjects[j]);
      }
      assign_rest(f, rest, static_cast<std::uint64_t>(repetition * S + i));
      folds.push_back(std::move(f));
    }
  } else {
    auto order = subjects;
    Rng rng = substream(config.seed, "split", static_cast<std::uint64_t>(repetition));
    lseq::shuffle(order.begin(), order.end(), rng);
    const auto n_test = static_cast<Index>(std::ceil(config.test_fraction * static_cast<double>(S)));
    if (n_test >= S) throw Error("split protocol leaves no training subjects");
    Fold f;
    f.repetition = repetition;
    f.test_subjects.assign(order.begin(), order.begin() + n_test);
    assign_rest(f, {order.begin() + n_test, order.end()}, static_cast<std::uint64_t>(repetition));
    folds.push_back(std::move(f));
  }
  check_folds(folds);
  return folds;
}

void check_folds(const std::vector<Fold>& folds) {
  std::map<std::pair<Index, std::string>, Index> tested;
  for (const auto& f : folds) {
    std::set<std::string> roles;
    for (const auto* group : {&f.train_subjects, &f.validation_subjects, &f.test_subjects}) {
      for (const auto& s : *group) {
        if (!roles.insert(s).second) {
          throw Error("subject " + s + " appears in more than one role of fold " + std::to_string(f.index));
        }
      }
    }
    for (const auto& s : f.test_subjects) {
      const auto [it, fresh] = tested.emplace(std::make_pair(f.repetition, s), f.index);
      if (!fresh) {
        throw Error("subject " + s + " appears in two folds (" + std::to_string(it->second) + " and " +
                    std::to_string(f.index) + ")");
      }
    }
  }
}

namespace {

std::vector<FeatureArchive> select(const std::vector<FeatureArchive>& recordings,
                                   const std::vector<std::string>& subjects) {
  const std::set<std::string> wanted(subjects.begin(), subjects.end());
  std::vector<FeatureArchive> out;
  for (const auto& r : recordings) {
    if (wanted.count(r.subject_id)) out.push_back(r);
  }
  return out;
}

}  // namespace

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

FoldResult evaluate_fold(Stager& stager, const Fold& fold, const std::vector<FeatureArchive>& test, Index stride,
                         Index batch_size) {
  FoldResult result;
  result.fold = fold;
  for (const auto& rec : test) {
    const auto scored = score_recording(stager, rec, stride > 0 ? stride : stager.length(), batch_size);
    const auto cm = confusion_from_labels(rec.hypnogram.stages, scored.predicted, rec.hypnogram.valid);
    result.confusion += cm;
    RecordingScore rs;
    rs.recording_id = rec.recording_id;
    rs.subject_id = rec.subject_id;
    rs.repetition = fold.repetition;
    rs.fold = fold.index;
    rs.epochs = cm.total();
    rs.accuracy = cm.total() > 0 ? static_cast<double>(cm.trace()) / static_cast<double>(cm.total()) : 0.0;
    result.recordings.push_back(rs);
  }
  if (result.confusion.total() == 0) throw Error("fold " + std::to_string(fold.index) + " has no valid test epochs");
  result.report = compute_metrics(result.confusion);
  return result;
}

CvResult cross_validate(const std::vector<FeatureArchive>& recordings, const CvConfig& config,
                        const FoldTrainer& trainer) {
  config.validate();
  const auto subjects = subjects_of(recordings);
  CvResult result;
  std::vector<double> acc, kappa, mf1, sens, spec;
  std::array<std::vector<double>, kClasses> f1;
  for (Index rep = 0; rep < config.repetitions; ++rep) {
    const auto folds = make_folds(subjects, config, rep);
    ConfusionMatrix pooled;
    for (const auto& fold : folds) {
      const auto stager = trainer(fold, select(recordings, fold.train_subjects),
                                  select(recordings, fold.validation_subjects));
      if (!stager) throw Error("fold trainer returned no stager");
      auto fr = evaluate_fold(*stager, fold, select(recordings, fold.test_subjects), config.stride,
                              config.batch_size);
      pooled += fr.confusion;
      result.folds.push_back(std::move(fr));
    }
    const auto report = compute_metrics(pooled);
    result.pooled.push_back(pooled);
    result.repetition_reports.push_back(report);
    acc.push_back(report.accuracy);
    kappa.push_back(report.kappa);
    mf1.push_back(report.macro_f1);
    sens.push_back(report.mean_sensitivity);
    spec.push_back(report.mean_specificity);
    for (int c = 0; c < kClasses; ++c) f1[c].push_back(report.per_class_f1[c]);
  }
  result.accuracy = summarize(acc);
  result.kappa = summarize(kappa);
  result.macro_f1 = summarize(mf1);
  result.sensitivity = summarize(sens);
  result.specificity = summarize(spec);
  for (int c = 0; c < kClasses; ++c) result.per_class_f1[c] = summarize(f1[c]);
  return result;
}

}  // namespace lseq::eval
