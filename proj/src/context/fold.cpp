#include "lseq/context/fold.hpp"

#include "lseq/core/error.hpp"

#include <string>

namespace lseq::context {

void FoldSpec::validate() const {
  if (B < 1 || K < 1) throw ShapeError("fold: B and K must be positive");
  if (L != B * K) {
    throw ShapeError("fold: L=" + std::to_string(L) + " is not B*K=" + std::to_string(B) + "*" + std::to_string(K));
  }
}

GridPos fold_position(Index ell, const FoldSpec& spec) {
  if (ell < 1 || ell > spec.L) throw ShapeError("fold: position " + std::to_string(ell) + " out of range");
  return {(ell - 1) / spec.K + 1, (ell - 1) % spec.K + 1};
}

Index unfold_position(GridPos pos, const FoldSpec& spec) {
  if (pos.b < 1 || pos.b > spec.B || pos.k < 1 || pos.k > spec.K) throw ShapeError("unfold: cell out of range");
  return (pos.b - 1) * spec.K + pos.k;
}

template <typename S>
FoldedGrid<S> fold(const Mat<S>& sequence, const FoldSpec& spec) {
  spec.validate();
  if (sequence.rows() != spec.L) {
    throw ShapeError("fold: sequence has " + std::to_string(sequence.rows()) + " rows, expected L=" +
                     std::to_string(spec.L));
  }
  FoldedGrid<S> grid{spec, Mat<S>(spec.L, sequence.cols())};
  for (Index ell = 1; ell <= spec.L; ++ell) {
    const GridPos p = fold_position(ell, spec);
    grid.cell(p.b, p.k) = sequence.row(ell - 1);
  }
  return grid;
}

template <typename S>
Mat<S> unfold(const FoldedGrid<S>& grid) {
  grid.spec.validate();
  if (grid.values.rows() != grid.spec.L) throw ShapeError("unfold: grid does not match its fold spec");
  Mat<S> sequence(grid.spec.L, grid.values.cols());
  for (Index b = 1; b <= grid.spec.B; ++b) {
    for (Index k = 1; k <= grid.spec.K; ++k) sequence.row(unfold_position({b, k}, grid.spec) - 1) = grid.cell(b, k);
  }
  return sequence;
}

std::vector<Index> sample_to_intra(const FoldSpec& spec, Index batch) {
  spec.validate();
  std::vector<Index> v(static_cast<std::size_t>(batch * spec.L));
  for (Index k = 0; k < spec.K; ++k) {
    for (Index n = 0; n < batch; ++n) {
      for (Index b = 0; b < spec.B; ++b) {
        v[static_cast<std::size_t>(k * batch * spec.B + n * spec.B + b)] = n * spec.L + b * spec.K + k;
      }
    }
  }
  return v;
}

std::vector<Index> intra_to_inter(const FoldSpec& spec, Index batch) {
  spec.validate();
  std::vector<Index> v(static_cast<std::size_t>(batch * spec.L));
  for (Index b = 0; b < spec.B; ++b) {
    for (Index n = 0; n < batch; ++n) {
      for (Index k = 0; k < spec.K; ++k) {
        v[static_cast<std::size_t>(b * batch * spec.K + n * spec.K + k)] = k * batch * spec.B + n * spec.B + b;
      }
    }
  }
  return v;
}

std::vector<Index> inter_to_sample(const FoldSpec& spec, Index batch) {
  spec.validate();
  std::vector<Index> v(static_cast<std::size_t>(batch * spec.L));
  for (Index n = 0; n < batch; ++n) {
    for (Index b = 0; b < spec.B; ++b) {
      for (Index k = 0; k < spec.K; ++k) {
        v[static_cast<std::size_t>(n * spec.L + b * spec.K + k)] = b * batch * spec.K + n * spec.K + k;
      }
    }
  }
  return v;
}

std::vector<Index> intra_to_sample(const FoldSpec& spec, Index batch) {
  spec.validate();
  std::vector<Index> v(static_cast<std::size_t>(batch * spec.L));
  for (Index n = 0; n < batch; ++n) {
    for (Index b = 0; b < spec.B; ++b) {
      for (Index k = 0; k < spec.K; ++k) {
        v[static_cast<std::size_t>(n * spec.L + b * spec.K + k)] = k * batch * spec.B + n * spec.B + b;
      }
    }
  }
  return v;
}

template FoldedGrid<float> fold(const Mat<float>&, const FoldSpec&);
template FoldedGrid<double> fold(const Mat<double>&, const FoldSpec&);
template Mat<float> unfold(const FoldedGrid<float>&);
template Mat<double> unfold(const FoldedGrid<double>&);

}  // namespace lseq::context
