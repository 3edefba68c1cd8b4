#pragma once

#include "lseq/eval/benchmark.hpp"
#include "lseq/eval/cross_validation.hpp"
#include "lseq/eval/metrics.hpp"
#include "lseq/io/config_json.hpp"
#include "lseq/train/trainer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace lseq::io {

Json metric_report_to_json(const eval::MetricReport& r);
Json confusion_to_json(const eval::ConfusionMatrix& cm);
Json cv_summary_to_json(const eval::CvResult& r);

// Rows are reference stages, columns predicted stages, with stage-name headers.
void write_confusion_csv(const std::filesystem::path& path, const eval::ConfusionMatrix& cm);
void write_recording_scores_csv(const std::filesystem::path& path, const std::vector<eval::RecordingScore>& scores);
void write_metrics_log_header(std::ostream& os);
void write_metrics_log_row(std::ostream& os, const train::ValidationRecord& r);

// Fixed-width table: one row per label, columns Acc, kappa, MF1, Sens, Spec
// and the per-class F1 scores.
std::string metric_table(const std::vector<std::pair<std::string, eval::MetricReport>>& rows);

// Static SVG plots.
std::string confusion_heatmap_svg(const eval::ConfusionMatrix& cm, const std::string& title);
std::string recording_strip_svg(const std::vector<eval::RecordingScore>& scores, const std::string& title);
std::string scaling_curve_svg(const std::vector<eval::BenchmarkRow>& rows, const std::string& title);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lseq::io
