#pragma once

#include "lseq/frontend/recording_io.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace lseq::io {

using frontend::FeatureArchive;

// Feature archive file name of a recording.
std::string archive_name(const std::string& recording_id);

// `path` is either a directory of feature archives (*.lsf, loaded in name
// order) or a manifest CSV whose rows are prepared in memory.
std::vector<FeatureArchive> load_recordings(const std::filesystem::path& path,
                                            const frontend::PrepareOptions& options = {});

struct SubjectSplit {
  std::vector<FeatureArchive> train;
  std::vector<FeatureArchive> validation;
  std::vector<FeatureArchive> test;
  std::vector<std::string> validation_subjects;
  std::vector<std::string> test_subjects;
};

// Shuffles subjects with `seed`, then assigns the first test_subjects to the
// test set, the next validation_subjects to validation, and the rest to
// training. Recordings of one subject always stay together.
SubjectSplit split_by_subject(const std::vector<FeatureArchive>& recordings, Index validation_subjects,
                              Index test_subjects, std::uint64_t seed);

}  // namespace lseq::io
