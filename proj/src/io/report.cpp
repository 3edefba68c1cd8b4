#include "lseq/io/report.hpp"

#include "lseq/core/error.hpp"
#include "lseq/frontend/labels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace lseq::io {

using eval::kClasses;

Json metric_report_to_json(const eval::MetricReport& r) {
  Json f1 = Json::object();
  for (int c = 0; c < kClasses; ++c) f1[std::string(frontend::stage_name(c))] = r.per_class_f1[c];
  return Json{{"accuracy", r.accuracy},
              {"kappa", r.kappa},
              {"macro_f1", r.macro_f1},
              {"mean_sensitivity", r.mean_sensitivity},
              {"mean_specificity", r.mean_specificity},
              {"per_class_f1", f1},
              {"epochs", r.total},
              {"kappa_degenerate", r.kappa_degenerate},
              {"absent_classes", r.absent_classes}};
}

Json confusion_to_json(const eval::ConfusionMatrix& cm) {
  Json rows = Json::array();
  for (const auto& row : cm.counts) rows.push_back(Json(std::vector<std::int64_t>(row.begin(), row.end())));
  return rows;
}

Json cv_summary_to_json(const eval::CvResult& r) {
  auto s = [](const eval::MetricSummary& m) { return Json{{"mean", m.mean}, {"std", m.std}}; };
  Json f1 = Json::object();
  for (int c = 0; c < kClasses; ++c) f1[std::string(frontend::stage_name(c))] = s(r.per_class_f1[c]);
  Json reps = Json::array();
  for (std::size_t i = 0; i < r.repetition_reports.size(); ++i) {
    Json rep = metric_report_to_json(r.repetition_reports[i]);
    rep["confusion"] = confusion_to_json(r.pooled[i]);
    reps.push_back(rep);
  }
  return Json{{"repetitions", static_cast<Index>(r.repetition_reports.size())},
              {"folds", static_cast<Index>(r.folds.size())},
              {"accuracy", s(r.accuracy)},
              {"kappa", s(r.kappa)},
              {"macro_f1", s(r.macro_f1)},
              {"mean_sensitivity", s(r.sensitivity)},
              {"mean_specificity", s(r.specificity)},
              {"per_class_f1", f1},
              {"per_repetition", reps}};
}

namespace {

std::ofstream open_text(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_confusion_csv(const std::filesystem::path& path, const eval::ConfusionMatrix& cm) {
  auto os = open_text(path);
  os << "reference";
  for (int c = 0; c < kClasses; ++c) os << ',' << frontend::stage_name(c);
  os << '\n';
  for (int r = 0; r < kClasses; ++r) {
    os << frontend::stage_name(r);
    for (int c = 0; c < kClasses; ++c) os << ',' << cm.counts[r][c];
    os << '\n';
  }
}

void write_recording_scores_csv(const std::filesystem::path& path, const std::vector<eval::RecordingScore>& scores) {
  auto os = open_text(path);
  os << "recording_id,subject_id,repetition,fold,epochs,accuracy\n";
  for (const auto& s : scores) {
    os << s.recording_id << ',' << s.subject_id << ',' << s.repetition << ',' << s.fold << ',' << s.epochs << ','
       << fixed(s.accuracy, 6) << '\n';
  }
}

void write_metrics_log_header(std::ostream& os) { os << "step,train_loss,val_accuracy,seconds_per_step\n"; }

void write_metrics_log_row(std::ostream& os, const train::ValidationRecord& r) {
  os << r.step << ',' << fixed(r.train_loss, 6) << ',' << fixed(r.val_accuracy, 6) << ','
     << fixed(r.seconds_per_step, 6) << '\n';
}

std::string metric_table(const std::vector<std::pair<std::string, eval::MetricReport>>& rows) {
  std::size_t width = 8;
  for (const auto& [label, _] : rows) width = std::max(width, label.size() + 2);
  std::ostringstream os;
  auto pad = [&](const std::string& s) { return s + std::string(width - std::min(width, s.size()), ' '); };
  os << pad("") << "  Acc.  kappa    MF1  Sens.  Spec. |";
  for (int c = 0; c < kClasses; ++c) {
    std::string name(frontend::stage_name(c));
    os << std::string(7 - name.size(), ' ') << name;
  }
  os << '\n';
  for (const auto& [label, r] : rows) {
    os << pad(label) << ' ' << fixed(100 * r.accuracy, 1) << "  " << fixed(r.kappa, 3) << "  "
       << fixed(100 * r.macro_f1, 1) << "  " << fixed(100 * r.mean_sensitivity, 1) << "  "
       << fixed(100 * r.mean_specificity, 1) << " |";
    for (int c = 0; c < kClasses; ++c) {
      const auto v = fixed(100 * r.per_class_f1[c], 1);
      os << std::string(7 - v.size(), ' ') << v;
    }
    os << '\n';
  }
  return os.str();
}

std::string confusion_heatmap_svg(const eval::ConfusionMatrix& cm, const std::string& title) {
  const int cell = 60, left = 70, top = 60;
  const int size = left + kClasses * cell + 20;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 30
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << size / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(title)
     << "</text>\n";
  for (int r = 0; r < kClasses; ++r) {
    double row_total = 0.0;
    for (int c = 0; c < kClasses; ++c) row_total += static_cast<double>(cm.counts[r][c]);
    for (int c = 0; c < kClasses; ++c) {
      const double frac = row_total > 0 ? static_cast<double>(cm.counts[r][c]) / row_total : 0.0;
      const int shade = static_cast<int>(std::lround(255 - 200 * frac));
      os << "<rect x=\"" << left + c * cell << "\" y=\"" << top + r * cell << "\" width=\"" << cell << "\" height=\""
         << cell << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"#888\"/>\n";
      os << "<text x=\"" << left + c * cell + cell / 2 << "\" y=\"" << top + r * cell + cell / 2 + 4
         << "\" text-anchor=\"middle\">" << cm.counts[r][c] << "</text>\n";
    }
    os << "<text x=\"" << left - 8 << "\" y=\"" << top + r * cell + cell / 2 + 4 << "\" text-anchor=\"end\">"
       << frontend::stage_name(r) << "</text>\n";
    os << "<text x=\"" << left + r * cell + cell / 2 << "\" y=\"" << top - 8 << "\" text-anchor=\"middle\">"
       << frontend::stage_name(r) << "</text>\n";
  }
  os << "<text x=\"" << left + kClasses * cell / 2 << "\" y=\"" << top + kClasses * cell + 24
     << "\" text-anchor=\"middle\">predicted (rows: reference)</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string recording_strip_svg(const std::vector<eval::RecordingScore>& scores, const std::string& title) {
  // One column per subject, one dot per recording.
  std::vector<std::string> subjects;
  for (const auto& s : scores) {
    if (std::find(subjects.begin(), subjects.end(), s.subject_id) == subjects.end()) subjects.push_back(s.subject_id);
  }
  const int left = 60, top = 40, height = 300, col = 40;
  const int width = left + std::max<int>(1, static_cast<int>(subjects.size())) * col + 20;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << top + height + 60
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(title)
     << "</text>\n";
  for (int tick = 0; tick <= 10; tick += 2) {
    const double y = top + height - height * tick / 10.0;
    os << "<line x1=\"" << left << "\" x2=\"" << width - 10 << "\" y1=\"" << y << "\" y2=\"" << y
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fixed(tick / 10.0, 1)
       << "</text>\n";
  }
  for (const auto& s : scores) {
    const auto idx = std::find(subjects.begin(), subjects.end(), s.subject_id) - subjects.begin();
    const double x = left + col * (static_cast<double>(idx) + 0.5);
    const double y = top + height * (1.0 - s.accuracy);
    os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"#2a6\" fill-opacity=\"0.7\"><title>"
       << escape_xml(s.recording_id) << ' ' << fixed(s.accuracy, 3) << "</title></circle>\n";
  }
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    const double x = left + col * (static_cast<double>(i) + 0.5);
    os << "<text x=\"" << x << "\" y=\"" << top + height + 16 << "\" text-anchor=\"middle\">"
       << escape_xml(subjects[i]) << "</text>\n";
  }
  os << "<text x=\"14\" y=\"" << top + height / 2 << "\" transform=\"rotate(-90 14," << top + height / 2
     << ")\" text-anchor=\"middle\">accuracy per recording</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string scaling_curve_svg(const std::vector<eval::BenchmarkRow>& rows, const std::string& title) {
  const int left = 70, top = 40, w = 420, h = 280;
  double max_l = 1.0, max_t = 1e-9;
  for (const auto& r : rows) {
    max_l = std::max(max_l, static_cast<double>(r.point.L));
    max_t = std::max(max_t, r.wall_clock_s);
  }
  auto px = [&](double l) { return left + w * l / max_l; };
  auto py = [&](double t) { return top + h - h * t / max_t; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + w + 180 << "\" height=\"" << top + h + 50
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"" << left + w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(title)
     << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + h << "\" x2=\"" << left + w << "\" y2=\"" << top + h
     << "\" stroke=\"black\"/>\n<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
     << top + h << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left + w / 2 << "\" y=\"" << top + h + 36 << "\" text-anchor=\"middle\">sequence length L</text>\n";
  os << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">" << fixed(max_t, 2)
     << " s</text>\n";
  std::vector<const eval::BenchmarkRow*> flat;
  for (const auto& r : rows) {
    if (r.point.variant == model::Variant::Flat) flat.push_back(&r);
  }
  std::sort(flat.begin(), flat.end(), [](auto* a, auto* b) { return a->point.L < b->point.L; });
  if (flat.size() > 1) {
    os << "<polyline fill=\"none\" stroke=\"#c33\" points=\"";
    for (const auto* r : flat) os << px(static_cast<double>(r->point.L)) << ',' << py(r->wall_clock_s) << ' ';
    os << "\"/>\n";
  }
  int legend = 0;
  for (const auto& r : rows) {
    const bool is_flat = r.point.variant == model::Variant::Flat;
    const double x = px(static_cast<double>(r.point.L)), y = py(r.wall_clock_s);
    if (is_flat) {
      os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"#c33\"/>\n";
    } else {
      os << "<rect x=\"" << x - 4 << "\" y=\"" << y - 4 << "\" width=\"8\" height=\"8\" fill=\"#36c\"/>\n";
    }
    os << "<text x=\"" << left + w + 16 << "\" y=\"" << top + 14 * legend++ << "\" fill=\""
       << (is_flat ? "#c33" : "#36c") << "\">" << r.point.label() << ": " << fixed(r.wall_clock_s, 3) << " s</text>\n";
    os << "<text x=\"" << x << "\" y=\"" << top + h + 14 << "\" text-anchor=\"middle\">" << r.point.L << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto os = open_text(path);
  os << text;
  if (!os) throw Error("failed writing " + path.string());
}

}  // namespace lseq::io
