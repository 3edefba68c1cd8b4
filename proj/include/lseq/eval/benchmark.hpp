#pragma once

#include "lseq/model/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace lseq::eval {

struct GridPoint {
  model::Variant variant = model::Variant::Flat;
  Index L = 20;
  Index B = 1;
  Index K = 20;

  std::string label() const;
  bool operator==(const GridPoint&) const = default;
};

// "flat:20", "folded:200:10x20" (B x K); comma-separated lists.
GridPoint parse_grid_point(const std::string& text);
std::vector<GridPoint> parse_grid(const std::string& text);

// Flat 20/100/200 and folded 200 (10x20), 200 (20x10).
std::vector<GridPoint> default_grid();

struct BenchmarkRow {
  GridPoint point;
  Index steps = 0;
  double wall_clock_s = 0.0;
  Index seq_steps = 0;          // instrumented sequential recurrent steps per sample
  double ratio_vs_flat20 = 0.0; // wall-clock ratio; NaN without a flat L=20 row
};

struct BenchmarkOptions {
  Index steps = 1000;
  Index batch_size = 8;
  Index warmup_steps = 2;
  std::uint64_t seed = 1;
};

// Times `steps` training steps (forward, backward, Adam) for every grid
// point on random inputs shaped like the base configuration.
// Steps of different rows are interleaved; each row reports the summed time
// of its own steps.
// Duplicate grid points are rejected.
std::vector<BenchmarkRow> benchmark_scaling(const model::ModelConfig& base, const std::vector<GridPoint>& grid,
                                            const BenchmarkOptions& options);

void write_benchmark_csv(const std::filesystem::path& path, const std::vector<BenchmarkRow>& rows);

}  // namespace lseq::eval
