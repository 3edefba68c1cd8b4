#include "lseq/io/dataset.hpp"

#include "lseq/core/error.hpp"
#include "lseq/core/rng.hpp"

#include <algorithm>
#include <set>

namespace lseq::io {

namespace fs = std::filesystem;

std::string archive_name(const std::string& recording_id) { return recording_id + ".lsf"; }

std::vector<FeatureArchive> load_recordings(const fs::path& path, const frontend::PrepareOptions& options) {
  std::vector<FeatureArchive> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".lsf") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back(frontend::read_features(f));
  } else if (fs::is_regular_file(path)) {
    for (const auto& row : frontend::read_manifest(path)) out.push_back(frontend::prepare_recording(row, options));
  } else {
    throw Error("no such data path " + path.string());
  }
  if (out.empty()) throw Error("no recordings found in " + path.string());
  std::set<std::string> ids;
  for (const auto& r : out) {
    if (!ids.insert(r.recording_id).second) throw Error("duplicate recording id " + r.recording_id);
  }
  return out;
}

SubjectSplit split_by_subject(const std::vector<FeatureArchive>& recordings, Index validation_subjects,
                              Index test_subjects, std::uint64_t seed) {
  std::vector<std::string> subjects;
  for (const auto& r : recordings) {
    if (std::find(subjects.begin(), subjects.end(), r.subject_id) == subjects.end()) subjects.push_back(r.subject_id);
  }
  std::sort(subjects.begin(), subjects.end());
  const auto S = static_cast<Index>(subjects.size());
  if (validation_subjects < 1 || test_subjects < 0 || validation_subjects + test_subjects >= S) {
    throw Error("cannot hold out " + std::to_string(validation_subjects) + " validation and " +
                std::to_string(test_subjects) + " test subjects from " + std::to_string(S) + " subjects");
  }
  Rng rng = substream(seed, "subject_split");
  lseq::shuffle(subjects.begin(), subjects.end(), rng);
  SubjectSplit split;
  split.test_subjects.assign(subjects.begin(), subjects.begin() + test_subjects);
  split.validation_subjects.assign(subjects.begin() + test_subjects,
                                   subjects.begin() + test_subjects + validation_subjects);
  const std::set<std::string> test(split.test_subjects.begin(), split.test_subjects.end());
  const std::set<std::string> val(split.validation_subjects.begin(), split.validation_subjects.end());
  for (const auto& r : recordings) {
    if (test.count(r.subject_id)) {
      split.test.push_back(r);
    } else if (val.count(r.subject_id)) {
      split.validation.push_back(r);
    } else {
      split.train.push_back(r);
    }
  }
  return split;
}

}  // namespace lseq::io
