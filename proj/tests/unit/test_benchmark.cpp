#include "lseq/core/error.hpp"
#include "lseq/eval/benchmark.hpp"
#include "lseq/io/run_config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace lseq;
using namespace lseq::eval;

TEST(Grid, Parse) {
  const auto f = parse_grid_point("flat:20");
  EXPECT_EQ(f.variant, model::Variant::Flat);
  EXPECT_EQ(f.L, 20);
  EXPECT_EQ(f.B, 1);
  EXPECT_EQ(f.K, 20);
  const auto g = parse_grid_point("folded:200:10x20");
  EXPECT_EQ(g.variant, model::Variant::Folded);
  EXPECT_EQ(g.B, 10);
  EXPECT_EQ(g.K, 20);
  EXPECT_EQ(parse_grid_point(g.label()), g);
  EXPECT_EQ(parse_grid("flat:20,folded:100:10x10").size(), 2u);
  EXPECT_THROW(parse_grid_point("folded:200:10x10"), Error);
  EXPECT_THROW(parse_grid_point("flat"), Error);
  EXPECT_THROW(parse_grid_point("wide:20"), Error);
  EXPECT_EQ(default_grid().size(), 5u);
}

TEST(Benchmark, DuplicateRowsAreRejected) {
  const auto base = io::model_preset("miniature");
  BenchmarkOptions o;
  o.steps = 1;
  try {
    benchmark_scaling(base, parse_grid("flat:20,flat:20"), o);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate grid row flat:20"), std::string::npos);
  }
}

TEST(Benchmark, SmokeRunWritesOneRowPerGridPoint) {
  auto base = io::model_preset("miniature");
  base.frames = 4;
  base.bins = 9;
  BenchmarkOptions o;
  o.steps = 10;
  o.batch_size = 2;
  o.warmup_steps = 1;
  const auto rows = benchmark_scaling(base, default_grid(), o);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_DOUBLE_EQ(rows[0].ratio_vs_flat20, 1.0);
  for (const auto& r : rows) {
    EXPECT_EQ(r.steps, 10);
    EXPECT_GT(r.wall_clock_s, 0.0);
    EXPECT_TRUE(std::isfinite(r.ratio_vs_flat20));
    EXPECT_EQ(r.seq_steps, r.point.variant == model::Variant::Flat ? r.point.L : r.point.B + r.point.K);
  }
  const auto path = std::filesystem::temp_directory_path() / "lseq_test_scaling.csv";
  write_benchmark_csv(path, rows);
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "variant,L,B,K,steps,wall_clock_s,seq_steps,ratio_vs_flat20");
  int n = 0;
  while (std::getline(is, line)) ++n;
  EXPECT_EQ(n, 5);
}

TEST(Benchmark, RatioIsNanWithoutBaseline) {
  auto base = io::model_preset("miniature");
  base.frames = 4;
  base.bins = 9;
  BenchmarkOptions o;
  o.steps = 1;
  o.batch_size = 1;
  const auto rows = benchmark_scaling(base, parse_grid("flat:8"), o);
  EXPECT_TRUE(std::isnan(rows[0].ratio_vs_flat20));
}
