#include "lseq/cli/cli.hpp"

#include "lseq/core/error.hpp"
#include "lseq/eval/benchmark.hpp"
#include "lseq/eval/cross_validation.hpp"
#include "lseq/eval/scoring.hpp"
#include "lseq/io/checkpoint.hpp"
#include "lseq/io/config_json.hpp"
#include "lseq/io/dataset.hpp"
#include "lseq/io/report.hpp"
#include "lseq/io/run_config.hpp"
#include "lseq/synth/generator.hpp"
#include "lseq/train/trainer.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

namespace lseq::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct CommonConfigFlags {
  std::vector<std::string> config_files;
  std::vector<std::string> overrides;
  std::string model_preset = "full";
};

void add_config_flags(CLI::App* cmd, CommonConfigFlags& f) {
  cmd->add_option("--config", f.config_files, "JSON run configuration (repeatable, later files win)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", f.overrides, "Dotted override, e.g. train.learning_rate=1e-3 (repeatable)");
  cmd->add_option("--preset", f.model_preset, "Model size preset: full, desk, miniature")->capture_default_str();
}

fs::path run_root() {
  const char* env = std::getenv("LSEQ_RUN_ROOT");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("runs");
}

io::RunConfig resolve(const CommonConfigFlags& f, const std::vector<std::string>& extra) {
  io::RunConfig base;
  base.model = io::model_preset(f.model_preset);
  std::vector<fs::path> files(f.config_files.begin(), f.config_files.end());
  auto overrides = f.overrides;
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  return io::resolve_run_config(base, files, overrides);
}

frontend::PrepareOptions prepare_options(const io::RunConfig& c) {
  frontend::PrepareOptions o;
  o.zscore_per_recording = c.data.zscore;
  return o;
}

// ---------------------------------------------------------------- synth

struct SynthFlags {
  std::string preset = "tiny";
  std::string out;
  std::vector<std::string> config_files;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  Json doc = io::synth_config_to_json(synth::preset_by_name(f.preset));
  Json wrapped{{"synth", doc}};
  for (const auto& file : f.config_files) io::merge_layer(wrapped, io::read_json_file(file));
  for (const auto& o : f.overrides) io::apply_override(wrapped, o);
  auto config = io::synth_config_from_json(wrapped.at("synth"), synth::preset_by_name(f.preset));
  if (f.seed) config.seed = *f.seed;
  config.validate();
  const auto manifest = synth::write_dataset(config, f.out);
  io::write_json_file(fs::path(f.out) / "synth_config.json", Json{{"synth", io::synth_config_to_json(config)}});
  out << "wrote " << config.n_subjects * config.recordings_per_subject << " recordings and " << manifest.string()
      << '\n';
  return 0;
}

// ---------------------------------------------------------------- prepare

struct PrepareFlags {
  std::string manifest;
  std::string out;
  bool zscore = false;
  double margin_minutes = 30.0;
};

int cmd_prepare(const PrepareFlags& f, std::ostream& out, std::ostream& err) {
  const auto rows = frontend::read_manifest(f.manifest);
  if (rows.empty()) throw Error("manifest " + f.manifest + " lists no recordings");
  fs::create_directories(f.out);
  frontend::PrepareOptions options;
  options.zscore_per_recording = f.zscore;
  options.margin_minutes = f.margin_minutes;
  std::ofstream summary(fs::path(f.out) / "summary.csv");
  summary << "recording_id,subject_id,status,epochs,masked,error\n";
  int failures = 0;
  for (const auto& row : rows) {
    try {
      const auto archive = frontend::prepare_recording(row, options);
      frontend::write_features(fs::path(f.out) / io::archive_name(row.recording_id), archive);
      const Index masked = archive.epochs() - archive.hypnogram.usable();
      summary << row.recording_id << ',' << row.subject_id << ",ok," << archive.epochs() << ',' << masked << ",\n";
      out << row.recording_id << ": " << archive.epochs() << " epochs (" << masked << " masked)\n";
    } catch (const std::exception& e) {
      ++failures;
      std::string msg = e.what();
      for (auto& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      summary << row.recording_id << ',' << row.subject_id << ",failed,,," << msg << '\n';
      err << "error: " << row.recording_id << ": " << e.what() << '\n';
    }
  }
  out << rows.size() - static_cast<std::size_t>(failures) << " of " << rows.size() << " recordings prepared\n";
  return failures > 0 ? 1 : 0;
}

// ---------------------------------------------------------------- train

struct TrainFlags {
  CommonConfigFlags config;
  std::string data;
  std::string variant;
  std::optional<Index> L, B, K, steps, workers;
  std::optional<std::uint64_t> seed;
  std::string init_from;
  std::string init_mode = "compatible";
  std::string resume;
  std::string run_dir;
  std::string name;
  bool quiet = false;
};

std::vector<std::string> train_flag_overrides(const TrainFlags& f) {
  std::vector<std::string> o;
  if (!f.data.empty()) o.push_back("data.features=\"" + f.data + "\"");
  if (!f.variant.empty()) o.push_back("model.variant=\"" + f.variant + "\"");
  if (f.L) o.push_back("model.L=" + std::to_string(*f.L));
  if (f.B) o.push_back("model.B=" + std::to_string(*f.B));
  if (f.K) o.push_back("model.K=" + std::to_string(*f.K));
  if (f.steps) o.push_back("train.max_steps=" + std::to_string(*f.steps));
  if (f.workers) o.push_back("train.workers=" + std::to_string(*f.workers));
  if (f.seed) o.push_back("train.seed=" + std::to_string(*f.seed));
  return o;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

int cmd_train(const TrainFlags& f, std::ostream& out) {
  const auto config = resolve(f.config, train_flag_overrides(f));
  if (config.data.features.empty()) throw Error("no training data: pass --data or set data.features");
  const fs::path dir = !f.run_dir.empty() ? fs::path(f.run_dir)
                                          : run_root() / (!f.name.empty() ? f.name
                                                                           : "train-" + model::variant_name(config.model.variant) +
                                                                                 "-L" + std::to_string(config.model.fold.L) +
                                                                                 "-seed" + std::to_string(config.train.seed));
  fs::create_directories(dir);
  io::write_json_file(dir / "config.json", io::run_config_to_json(config));

  std::optional<io::Checkpoint> resume;
  if (!f.resume.empty()) resume = io::load_checkpoint(f.resume);

  const auto recordings = io::load_recordings(config.data.features, prepare_options(config));
  const auto split = io::split_by_subject(recordings, config.data.validation_subjects, config.data.test_subjects,
                                          config.data.split_seed);
  model::Model<float> model(config.model);
  model.init(config.train.seed);
  io::TransferReport transfer;
  if (!f.init_from.empty()) {
    const auto pretrained = io::load_checkpoint(f.init_from);
    const auto mode = f.init_mode == "all" ? io::Strictness::All : io::Strictness::Compatible;
    transfer = io::init_from_pretrained(model, pretrained, mode);
    out << "initialized " << transfer.copied.size() << " tensors from " << f.init_from << "; fresh: "
        << (transfer.fresh.empty() ? "none" : join(transfer.fresh)) << '\n';
  }

  std::ofstream metrics(dir / "metrics.csv");
  io::write_metrics_log_header(metrics);
  train::TrainCallbacks cb;
  cb.on_validation = [&](const train::ValidationRecord& r) {
    io::write_metrics_log_row(metrics, r);
    metrics.flush();
  };
  cb.on_best = [&](const io::Checkpoint& c) { io::save_checkpoint(dir / "best.ckpt", c); };
  if (!f.quiet) cb.log = [&](const std::string& msg) { out << msg << '\n'; };

  const auto result = train::train_model(model, split.train, split.validation, config.train, cb,
                                         resume ? &*resume : nullptr);
  io::save_checkpoint(dir / "last.ckpt", result.last);

  std::ostringstream report;
  report << "variant: " << model::variant_name(config.model.variant) << " L=" << config.model.fold.L
         << " B=" << config.model.fold.B << " K=" << config.model.fold.K << '\n'
         << "trainable parameters: " << model.trainable_parameters() << '\n'
         << "sequential steps per sample: " << model.sequential_steps() << '\n'
         << "training recordings: " << split.train.size() << ", validation subjects: "
         << join(split.validation_subjects) << '\n'
         << "steps: " << result.steps << " (stopped by " << result.stop_reason << ")\n"
         << "best validation accuracy: " << result.best_accuracy << " at step " << result.best_step << '\n';
  if (!f.init_from.empty()) {
    report << "initialized from: " << f.init_from << " (" << f.init_mode << ")\n"
           << "copied tensors: " << transfer.copied.size() << '\n'
           << "fresh tensors: " << (transfer.fresh.empty() ? "none" : join(transfer.fresh)) << '\n';
  }
  for (const auto& w : result.warnings) report << "warning: " << w << '\n';
  if (!split.test.empty()) {
    io::restore(model, result.best);
    eval::ModelStager stager(model);
    eval::Fold fold;
    fold.test_subjects = split.test_subjects;
    const auto fr = eval::evaluate_fold(stager, fold, split.test, config.eval.stride, config.eval.batch_size);
    report << "test subjects: " << join(split.test_subjects) << '\n' << io::metric_table({{"test", fr.report}});
    io::write_json_file(dir / "test_report.json", io::metric_report_to_json(fr.report));
  }
  io::write_text_file(dir / "report.txt", report.str());
  out << report.str() << "run directory: " << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateFlags {
  CommonConfigFlags config;
  std::string checkpoint;
  std::string data;
  std::string protocol = "holdout";
  std::string stager = "model";
  std::string fold_init = "checkpoint";
  std::string out;
  std::optional<Index> repetitions, stride, L;
};

void write_fold_outputs(const fs::path& dir, const std::string& tag, const eval::FoldResult& fr) {
  Json doc = io::metric_report_to_json(fr.report);
  doc["repetition"] = fr.fold.repetition;
  doc["fold"] = fr.fold.index;
  doc["test_subjects"] = fr.fold.test_subjects;
  doc["validation_subjects"] = fr.fold.validation_subjects;
  doc["confusion"] = io::confusion_to_json(fr.confusion);
  io::write_json_file(dir / ("report_" + tag + ".json"), doc);
  io::write_confusion_csv(dir / ("confusion_" + tag + ".csv"), fr.confusion);
}

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out) {
  std::vector<std::string> extra;
  if (f.repetitions) extra.push_back("eval.repetitions=" + std::to_string(*f.repetitions));
  if (f.stride) extra.push_back("eval.stride=" + std::to_string(*f.stride));
  extra.push_back("eval.protocol=\"" + f.protocol + "\"");
  if (!f.data.empty()) extra.push_back("data.features=\"" + f.data + "\"");
  auto config = resolve(f.config, extra);
  const bool oracle = f.stager == "oracle";
  if (!oracle && f.stager != "model") throw Error("--stager must be model or oracle");
  if (!oracle && f.checkpoint.empty()) throw Error("--checkpoint is required unless --stager oracle");
  if (config.data.features.empty()) throw Error("no evaluation data: pass --data");

  std::optional<io::Checkpoint> ckpt;
  if (!f.checkpoint.empty()) {
    ckpt = io::load_checkpoint(f.checkpoint);
    config.model = io::checkpoint_model_config(*ckpt);
  }
  const Index L = f.L ? *f.L : config.model.fold.L;
  const auto recordings = io::load_recordings(config.data.features, prepare_options(config));
  const fs::path dir = !f.out.empty() ? fs::path(f.out) : run_root() / ("evaluate-" + config.eval.protocol);
  fs::create_directories(dir);

  auto make_model_stager = [&](std::unique_ptr<model::Model<float>>& holder) -> std::unique_ptr<eval::Stager> {
    struct Owning : eval::Stager {
      std::unique_ptr<model::Model<float>> model;
      eval::ModelStager inner;
      explicit Owning(std::unique_ptr<model::Model<float>> m) : model(std::move(m)), inner(*model) {}
      Index length() const override { return inner.length(); }
      MatD posteriors(const model::SequenceBatch<float>& b) override { return inner.posteriors(b); }
    };
    return std::make_unique<Owning>(std::move(holder));
  };

  std::vector<eval::FoldResult> folds;
  std::vector<std::pair<std::string, eval::MetricReport>> table;
  eval::ConfusionMatrix pooled;
  Json aggregate;
  if (config.eval.protocol == "holdout") {
    std::unique_ptr<eval::Stager> stager;
    if (oracle) {
      stager = std::make_unique<eval::OracleStager>(L);
    } else {
      auto m = std::make_unique<model::Model<float>>(config.model);
      io::restore(*m, *ckpt);
      stager = make_model_stager(m);
    }
    eval::Fold fold;
    fold.test_subjects = eval::subjects_of(recordings);
    folds.push_back(eval::evaluate_fold(*stager, fold, recordings, config.eval.stride, config.eval.batch_size));
    pooled = folds.back().confusion;
    aggregate = io::metric_report_to_json(folds.back().report);
    aggregate["confusion"] = io::confusion_to_json(pooled);
    table.emplace_back("all", folds.back().report);
  } else {
    eval::CvConfig cv;
    cv.protocol = eval::parse_protocol(config.eval.protocol);
    cv.repetitions = config.eval.repetitions;
    cv.test_fraction = config.eval.test_fraction;
    cv.validation_subjects = oracle ? 0 : config.data.validation_subjects;
    cv.seed = config.data.split_seed;
    cv.stride = config.eval.stride;
    cv.batch_size = config.eval.batch_size;
    eval::FoldTrainer trainer = [&](const eval::Fold& fold, const std::vector<frontend::FeatureArchive>& train_set,
                                    const std::vector<frontend::FeatureArchive>& val_set)
        -> std::unique_ptr<eval::Stager> {
      if (oracle) return std::make_unique<eval::OracleStager>(L);
      auto m = std::make_unique<model::Model<float>>(config.model);
      m->init(config.train.seed + static_cast<std::uint64_t>(fold.repetition));
      if (f.fold_init == "checkpoint") io::init_from_pretrained(*m, *ckpt, io::Strictness::All);
      auto tc = config.train;
      tc.seed += static_cast<std::uint64_t>(fold.repetition);
      const auto r = train::train_model(*m, train_set, val_set, tc);
      io::restore(*m, r.best);
      out << "repetition " << fold.repetition << " fold " << fold.index << ": best validation accuracy "
          << r.best_accuracy << '\n';
      return make_model_stager(m);
    };
    const auto result = eval::cross_validate(recordings, cv, trainer);
    folds = result.folds;
    for (const auto& p : result.pooled) pooled += p;
    aggregate = io::cv_summary_to_json(result);
    aggregate["protocol"] = config.eval.protocol;
    for (std::size_t i = 0; i < result.repetition_reports.size(); ++i) {
      table.emplace_back("pooled rep " + std::to_string(i), result.repetition_reports[i]);
    }
  }

  std::vector<eval::RecordingScore> scores;
  for (const auto& fr : folds) {
    const std::string tag = "rep" + std::to_string(fr.fold.repetition) + "_fold" + std::to_string(fr.fold.index);
    write_fold_outputs(dir, tag, fr);
    scores.insert(scores.end(), fr.recordings.begin(), fr.recordings.end());
    if (folds.size() > 1) table.emplace_back(tag, fr.report);
  }
  io::write_json_file(dir / "report_aggregate.json", aggregate);
  io::write_confusion_csv(dir / "confusion.csv", pooled);
  io::write_recording_scores_csv(dir / "per_recording.csv", scores);
  io::write_text_file(dir / "confusion.svg", io::confusion_heatmap_svg(pooled, "Pooled confusion matrix"));
  io::write_text_file(dir / "per_recording.svg", io::recording_strip_svg(scores, "Accuracy per recording"));
  const auto text = io::metric_table(table);
  io::write_text_file(dir / "report.txt", text);
  out << text << "outputs: " << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkFlags {
  CommonConfigFlags config;
  std::string grid;
  Index steps = 1000;
  Index batch_size = 8;
  std::string out;
};

int cmd_benchmark(const BenchmarkFlags& f, std::ostream& out) {
  const auto config = resolve(f.config, {});
  const auto grid = f.grid.empty() ? eval::default_grid() : eval::parse_grid(f.grid);
  eval::BenchmarkOptions options;
  options.steps = f.steps;
  options.batch_size = f.batch_size;
  options.seed = config.train.seed;
  const auto rows = eval::benchmark_scaling(config.model, grid, options);
  const fs::path dir = !f.out.empty() ? fs::path(f.out) : run_root() / "benchmark";
  fs::create_directories(dir);
  eval::write_benchmark_csv(dir / "scaling.csv", rows);
  io::write_text_file(dir / "scaling.svg", io::scaling_curve_svg(rows, "Training time for " + std::to_string(f.steps) + " steps"));
  for (const auto& r : rows) {
    out << r.point.label() << ": " << r.wall_clock_s << " s, " << r.seq_steps << " sequential steps, ratio "
        << r.ratio_vs_flat20 << '\n';
  }
  out << "outputs: " << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- predict

struct PredictFlags {
  std::string checkpoint;
  std::string data;
  std::string out = "predictions.csv";
  Index stride = 0;
};

int cmd_predict(const PredictFlags& f, std::ostream& out) {
  const auto ckpt = io::load_checkpoint(f.checkpoint);
  model::Model<float> m(io::checkpoint_model_config(ckpt));
  io::restore(m, ckpt);
  eval::ModelStager stager(m);
  const auto recordings = io::load_recordings(f.data);
  const fs::path path(f.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + f.out);
  os << "recording_id,epoch,predicted";
  for (int c = 0; c < eval::kClasses; ++c) os << ",p_" << frontend::stage_name(c);
  os << '\n';
  for (const auto& rec : recordings) {
    const auto scored = eval::score_recording(stager, rec, f.stride > 0 ? f.stride : stager.length());
    for (Index e = 0; e < rec.epochs(); ++e) {
      os << rec.recording_id << ',' << e << ',' << frontend::stage_name(scored.predicted[static_cast<std::size_t>(e)]);
      for (int c = 0; c < eval::kClasses; ++c) os << ',' << scored.posteriors(e, c);
      os << '\n';
    }
  }
  out << "wrote predictions for " << recordings.size() << " recordings to " << f.out << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-sequence sleep staging: data preparation, training, evaluation, and benchmarking", "lseq"};
  app.require_subcommand(1);

  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset (manifest, signals, labels)");
  synth->add_option("--preset", synth_flags.preset, "tiny or small")->capture_default_str();
  synth->add_option("--out", synth_flags.out, "Output directory")->required();
  synth->add_option("--config", synth_flags.config_files, "JSON file with a \"synth\" section")->check(CLI::ExistingFile);
  synth->add_option("--set", synth_flags.overrides, "Override, e.g. synth.cycle_period=120");
  synth->add_option("--seed", synth_flags.seed, "Root seed");

  PrepareFlags prepare_flags;
  auto* prepare = app.add_subcommand("prepare", "Transform manifest recordings into feature archives");
  prepare->add_option("--manifest", prepare_flags.manifest, "Manifest CSV")->required()->check(CLI::ExistingFile);
  prepare->add_option("--out", prepare_flags.out, "Output directory")->required();
  prepare->add_flag("--zscore", prepare_flags.zscore, "Standardize features per recording");
  prepare->add_option("--margin-minutes", prepare_flags.margin_minutes, "Wake margin around the in-bed period")
      ->capture_default_str();

  TrainFlags train_flags;
  auto* trainc = app.add_subcommand("train", "Train a folded or flat model");
  add_config_flags(trainc, train_flags.config);
  trainc->add_option("--data", train_flags.data, "Feature directory or manifest");
  trainc->add_option("--variant", train_flags.variant, "folded or flat");
  trainc->add_option("--L", train_flags.L, "Sequence length");
  trainc->add_option("--B", train_flags.B, "Number of subsequences (folded)");
  trainc->add_option("--K", train_flags.K, "Subsequence length (folded)");
  trainc->add_option("--steps", train_flags.steps, "Maximum training steps");
  trainc->add_option("--workers", train_flags.workers, "Data-loading threads (1 is deterministic reference mode)");
  trainc->add_option("--seed", train_flags.seed, "Training seed");
  trainc->add_option("--init-from", train_flags.init_from, "Initialize from a pretrained checkpoint")
      ->check(CLI::ExistingFile);
  trainc->add_option("--init-mode", train_flags.init_mode, "all or compatible")
      ->check(CLI::IsMember({"all", "compatible"}))
      ->capture_default_str();
  trainc->add_option("--resume", train_flags.resume, "Continue from a checkpoint")->check(CLI::ExistingFile);
  trainc->add_option("--run-dir", train_flags.run_dir, "Run directory (default: $LSEQ_RUN_ROOT/<name>)");
  trainc->add_option("--name", train_flags.name, "Run name under $LSEQ_RUN_ROOT");
  trainc->add_flag("--quiet", train_flags.quiet, "Only print the final report");

  EvaluateFlags eval_flags;
  auto* evaluate = app.add_subcommand("evaluate", "Score recordings and write metric reports");
  add_config_flags(evaluate, eval_flags.config);
  evaluate->add_option("--checkpoint", eval_flags.checkpoint, "Trained checkpoint")->check(CLI::ExistingFile);
  evaluate->add_option("--data", eval_flags.data, "Feature directory or manifest");
  evaluate->add_option("--protocol", eval_flags.protocol, "holdout, loso, or split")
      ->check(CLI::IsMember({"holdout", "loso", "split"}))
      ->capture_default_str();
  evaluate->add_option("--repetitions", eval_flags.repetitions, "Cross-validation repetitions");
  evaluate->add_option("--stride", eval_flags.stride, "Test window stride (default L)");
  evaluate->add_option("--stager", eval_flags.stager, "model, or oracle (reads reference labels)")
      ->capture_default_str();
  evaluate->add_option("--L", eval_flags.L, "Window length for the oracle stager");
  evaluate->add_option("--fold-init", eval_flags.fold_init, "checkpoint or scratch initialization of fold models")
      ->check(CLI::IsMember({"checkpoint", "scratch"}))
      ->capture_default_str();
  evaluate->add_option("--out", eval_flags.out, "Output directory");

  BenchmarkFlags bench_flags;
  auto* bench = app.add_subcommand("benchmark", "Time training steps across (variant, L, B, K) settings");
  add_config_flags(bench, bench_flags.config);
  bench->add_option("--grid", bench_flags.grid, "Comma list of flat:L and folded:L:BxK (default: flat 20,100,200 and folded 200 at 10x20, 20x10)");
  bench->add_option("--steps", bench_flags.steps, "Timed steps per row")->capture_default_str();
  bench->add_option("--batch-size", bench_flags.batch_size, "Sequences per step")->capture_default_str();
  bench->add_option("--out", bench_flags.out, "Output directory");

  PredictFlags predict_flags;
  auto* predict = app.add_subcommand("predict", "Write per-epoch predictions");
  predict->add_option("--checkpoint", predict_flags.checkpoint, "Trained checkpoint")->required()->check(CLI::ExistingFile);
  predict->add_option("--data", predict_flags.data, "Feature directory or manifest")->required();
  predict->add_option("--out", predict_flags.out, "Output CSV")->capture_default_str();
  predict->add_option("--stride", predict_flags.stride, "Window stride (default L)");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    if (synth->parsed()) return cmd_synth(synth_flags, out);
    if (prepare->parsed()) return cmd_prepare(prepare_flags, out, err);
    if (trainc->parsed()) return cmd_train(train_flags, out);
    if (evaluate->parsed()) return cmd_evaluate(eval_flags, out);
    if (bench->parsed()) return cmd_benchmark(bench_flags, out);
    if (predict->parsed()) return cmd_predict(predict_flags, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace lseq::cli
