#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace lseq {

using Index = Eigen::Index;

// Row-major storage everywhere: a batch of vectors is a matrix whose rows are
// the vectors, and contiguous row blocks are cheap views.
template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

using MatF = Mat<float>;
using MatD = Mat<double>;

enum class Mode { Train, Eval };

// Gathers rows: out.row(i) = src.row(index[i]).
template <typename S>
Mat<S> gather_rows(const Mat<S>& src, const std::vector<Index>& index) {
  Mat<S> out(static_cast<Index>(index.size()), src.cols());
  for (std::size_t i = 0; i < index.size(); ++i) out.row(static_cast<Index>(i)) = src.row(index[i]);
  return out;
}

// Adjoint of gather_rows for a permutation: out.row(index[i]) += grad.row(i).
template <typename S>
Mat<S> scatter_rows(const Mat<S>& grad, const std::vector<Index>& index, Index rows) {
  Mat<S> out = Mat<S>::Zero(rows, grad.cols());
  for (std::size_t i = 0; i < index.size(); ++i) out.row(index[i]) += grad.row(static_cast<Index>(i));
  return out;
}

template <typename S>
bool all_finite(const Mat<S>& m) {
  return m.allFinite();
}

}  // namespace lseq
