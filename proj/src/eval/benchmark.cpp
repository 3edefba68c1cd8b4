#include "lseq/eval/benchmark.hpp"

#include "lseq/core/error.hpp"
#include "lseq/core/rng.hpp"
#include "lseq/model/model.hpp"
#include "lseq/train/adam.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace lseq::eval {

std::string GridPoint::label() const {
  if (variant == model::Variant::Flat) return "flat:" + std::to_string(L);
  return "folded:" + std::to_string(L) + ":" + std::to_string(B) + "x" + std::to_string(K);
}

GridPoint parse_grid_point(const std::string& text) {
  auto fail = [&] { return Error("bad grid point '" + text + "' (expected flat:L or folded:L:BxK)"); };
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) throw fail();
  GridPoint p;
  try {
    const std::string kind = text.substr(0, c1);
    if (kind == "flat") {
      p.variant = model::Variant::Flat;
      std::size_t used = 0;
      p.L = std::stoll(text.substr(c1 + 1), &used);
      if (used != text.size() - c1 - 1) throw fail();
      p.B = 1;
      p.K = p.L;
    } else if (kind == "folded") {
      p.variant = model::Variant::Folded;
      const auto c2 = text.find(':', c1 + 1);
      const auto x = text.find('x', c2 == std::string::npos ? 0 : c2);
      if (c2 == std::string::npos || x == std::string::npos) throw fail();
      p.L = std::stoll(text.substr(c1 + 1, c2 - c1 - 1));
      p.B = std::stoll(text.substr(c2 + 1, x - c2 - 1));
      p.K = std::stoll(text.substr(x + 1));
    } else {
      throw fail();
    }
  } catch (const std::logic_error&) {
    throw fail();
  }
  context::FoldSpec{p.L, p.B, p.K}.validate();
  return p;
}

std::vector<GridPoint> parse_grid(const std::string& text) {
  std::vector<GridPoint> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_grid_point(item));
  }
  if (out.empty()) throw Error("empty benchmark grid");
  return out;
}

std::vector<GridPoint> default_grid() {
  return parse_grid("flat:20,flat:100,flat:200,folded:200:10x20,folded:200:20x10");
}

std::vector<BenchmarkRow> benchmark_scaling(const model::ModelConfig& base, const std::vector<GridPoint>& grid,
                                            const BenchmarkOptions& options) {
  if (options.steps < 1 || options.batch_size < 1 || options.warmup_steps < 0) {
    throw Error("benchmark: steps and batch size must be positive");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (grid[i] == grid[j]) throw Error("benchmark: duplicate grid row " + grid[i].label());
    }
  }
  // One training setup per grid row, all alive at once so the timed steps can
  // be interleaved: row i's step t runs between rows' steps t-1 and t+1, so
  // slow drift of the machine (other tenants, frequency scaling) hits every
  // row alike instead of whichever row happened to run during it.
  struct Runner {
    explicit Runner(const model::ModelConfig& c) : model(c) {}
    model::Model<float> model;
    std::unique_ptr<train::Adam<float>> adam;
    model::SequenceBatch<float> batch;
    model::Model<float>::Cache cache;
    Rng dropout_rng;
    double seconds = 0.0;

    void step() {
      const nn::ForwardContext ctx{Mode::Train, &dropout_rng};
      zero_grads(model.params());
      model.forward_backward(batch, ctx, cache);
      train::clip_global_norm(model.params(), 5.0);
      adam->step();
    }
  };
  std::vector<std::unique_ptr<Runner>> runners;
  for (const auto& point : grid) {
    model::ModelConfig c = base;
    c.variant = point.variant;
    c.fold = {point.L, point.B, point.K};
    c.validate();
    auto r = std::make_unique<Runner>(c);
    r->model.init(options.seed);
    r->adam = std::make_unique<train::Adam<float>>(r->model.params(), train::AdamConfig{});
    Rng data_rng = substream(options.seed, "benchmark", static_cast<std::uint64_t>(point.L));
    auto& batch = r->batch;
    batch.sequences = options.batch_size;
    batch.length = c.fold.L;
    batch.images.resize(batch.epochs() * c.frames, c.bins);
    for (Index i = 0; i < batch.images.size(); ++i) batch.images.data()[i] = static_cast<float>(normal01(data_rng));
    for (Index i = 0; i < batch.epochs(); ++i) {
      batch.labels.push_back(static_cast<int>(uniform_below(data_rng, static_cast<std::uint64_t>(c.classes))));
      batch.mask.push_back(1);
    }
    r->dropout_rng = substream(options.seed, "dropout");
    runners.push_back(std::move(r));
  }
  for (auto& r : runners) {
    for (Index i = 0; i < options.warmup_steps; ++i) r->step();
  }
  for (Index i = 0; i < options.steps; ++i) {
    for (auto& r : runners) {
      const auto start = std::chrono::steady_clock::now();
      r->step();
      r->seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  }
  std::vector<BenchmarkRow> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    BenchmarkRow row;
    row.point = grid[i];
    row.steps = options.steps;
    row.wall_clock_s = runners[i]->seconds;
    row.seq_steps = runners[i]->model.context.last_forward_steps();
    rows.push_back(row);
  }
  double reference = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    if (r.point.variant == model::Variant::Flat && r.point.L == 20) reference = r.wall_clock_s;
  }
  for (auto& r : rows) r.ratio_vs_flat20 = r.wall_clock_s / reference;
  return rows;
}

void write_benchmark_csv(const std::filesystem::path& path, const std::vector<BenchmarkRow>& rows) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << "variant,L,B,K,steps,wall_clock_s,seq_steps,ratio_vs_flat20\n";
  os.precision(10);
  for (const auto& r : rows) {
    os << model::variant_name(r.point.variant) << ',' << r.point.L << ',' << r.point.B << ',' << r.point.K << ','
       << r.steps << ',' << r.wall_clock_s << ',' << r.seq_steps << ',';
    if (std::isfinite(r.ratio_vs_flat20)) os << r.ratio_vs_flat20;
    os << '\n';
  }
}

}  // namespace lseq::eval
