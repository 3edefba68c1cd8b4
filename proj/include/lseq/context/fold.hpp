#pragma once

#include "lseq/core/tensor.hpp"

#include <vector>

namespace lseq::context {

struct FoldSpec {
  Index L = 200;
  Index B = 10;
  Index K = 20;

  void validate() const;
};

// 1-based subsequence coordinates of sequence position ell (1-based).
struct GridPos {
  Index b = 1;
  Index k = 1;
  bool operator==(const GridPos&) const = default;
};

GridPos fold_position(Index ell, const FoldSpec& spec);
Index unfold_position(GridPos pos, const FoldSpec& spec);

// One sample folded into B x K cells of width D. Cell (b, k) (1-based) is row
// (b-1)*K + (k-1) of values.
template <typename S>
struct FoldedGrid {
  FoldSpec spec;
  Mat<S> values;

  auto cell(Index b, Index k) { return values.row((b - 1) * spec.K + (k - 1)); }
  auto cell(Index b, Index k) const { return values.row((b - 1) * spec.K + (k - 1)); }
};

template <typename S>
FoldedGrid<S> fold(const Mat<S>& sequence, const FoldSpec& spec);

template <typename S>
Mat<S> unfold(const FoldedGrid<S>& grid);

// Row maps between the sample-major layout of a batch of N sequences
// (row n*L + ell-1) and the time-major layouts seen by the recurrent stages.
//   intra: row (k-1)*(N*B) + n*B + (b-1), sequence length K, batch N*B
//   inter: row (b-1)*(N*K) + n*K + (k-1), sequence length B, batch N*K
// Each returned vector v satisfies out.row(i) = in.row(v[i]).
std::vector<Index> sample_to_intra(const FoldSpec& spec, Index batch);
std::vector<Index> intra_to_inter(const FoldSpec& spec, Index batch);
std::vector<Index> inter_to_sample(const FoldSpec& spec, Index batch);
std::vector<Index> intra_to_sample(const FoldSpec& spec, Index batch);

}  // namespace lseq::context
