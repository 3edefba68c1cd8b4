#include "lseq/context/long_context.hpp"

#include "lseq/core/error.hpp"

namespace lseq::context {

template <typename S>
ResidualBlstm<S>::ResidualBlstm(const std::string& name, Index input, Index width, double dropout)
    : blstm(name + ".blstm", input, width / 2),
      proj(name + ".proj", width, width),
      norm(name + ".norm", width),
      dropout_(dropout) {
  if (width % 2 != 0) throw ShapeError(name + ": recurrent width must be even");
}

template <typename S>
void ResidualBlstm<S>::init(Rng& rng) {
  blstm.init(rng);
  proj.init(rng);
}

template <typename S>
Mat<S> ResidualBlstm<S>::forward(const Mat<S>& x, Index steps, Index batch, const nn::ForwardContext& ctx,
                                 Cache& cache) {
  cache.recurrent = nn::dropout_forward(blstm.forward(x, steps, batch, ctx.mode, cache.blstm), dropout_, ctx,
                                        cache.dropout);
  return cache.recurrent + norm.forward(proj.forward(cache.recurrent), cache.norm);
}

template <typename S>
Mat<S> ResidualBlstm<S>::backward(const Mat<S>& d_out, const Cache& cache, Mode mode) {
  Mat<S> d_rec = d_out + proj.backward(cache.recurrent, norm.backward(d_out, cache.norm));
  d_rec = nn::dropout_backward(d_rec, cache.dropout);
  return blstm.backward(d_rec, cache.blstm, mode);
}

template <typename S>
void ResidualBlstm<S>::collect(ParamList<S>& out) {
  blstm.collect(out);
  proj.collect(out);
  norm.collect(out);
}

template <typename S>
LongContextEncoder<S>::LongContextEncoder(const std::string& name, const FoldSpec& spec, Index input, Index intra_width,
                                          Index inter_width, double dropout)
    : intra(name + ".intra", input, intra_width, dropout),
      inter(name + ".inter", intra_width, inter_width, dropout),
      spec_(spec),
      folded_(true) {
  spec.validate();
}

template <typename S>
LongContextEncoder<S> LongContextEncoder<S>::flat(const std::string& name, Index length, Index input, Index width,
                                                  double dropout) {
  LongContextEncoder enc;
  enc.intra = ResidualBlstm<S>(name + ".intra", input, width, dropout);
  enc.spec_ = FoldSpec{length, 1, length};
  enc.spec_.validate();
  enc.folded_ = false;
  return enc;
}

template <typename S>
void LongContextEncoder<S>::init(Rng& rng) {
  intra.init(rng);
  if (folded_) inter.init(rng);
}

template <typename S>
Mat<S> LongContextEncoder<S>::forward(const Mat<S>& x, Index batch, const nn::ForwardContext& ctx, Cache& cache) {
  if (x.rows() != batch * spec_.L) {
    throw ShapeError("long-context encoder: expected " + std::to_string(batch * spec_.L) + " rows, got " +
                     std::to_string(x.rows()));
  }
  cache.batch = batch;
  const Mat<S> intra_in = gather_rows(x, sample_to_intra(spec_, batch));
  const Mat<S> intra_out = intra.forward(intra_in, spec_.K, batch * spec_.B, ctx, cache.intra);
  // The two directions run independently, so one direction's loop count is
  // the sequential depth.
  last_steps_ = cache.intra.blstm.fw.iterations;
  if (!folded_ || bypass_inter) return gather_rows(intra_out, intra_to_sample(spec_, batch));

  const Mat<S> inter_in = gather_rows(intra_out, intra_to_inter(spec_, batch));
  const Mat<S> inter_out = inter.forward(inter_in, spec_.B, batch * spec_.K, ctx, cache.inter);
  last_steps_ += cache.inter.blstm.fw.iterations;
  return gather_rows(inter_out, inter_to_sample(spec_, batch));
}

template <typename S>
Mat<S> LongContextEncoder<S>::backward(const Mat<S>& d_out, const Cache& cache, Mode mode) {
  const Index batch = cache.batch;
  Mat<S> d_intra_out;
  if (!folded_ || bypass_inter) {
    d_intra_out = scatter_rows(d_out, intra_to_sample(spec_, batch), d_out.rows());
  } else {
    const Mat<S> d_inter_out = scatter_rows(d_out, inter_to_sample(spec_, batch), d_out.rows());
    const Mat<S> d_inter_in = inter.backward(d_inter_out, cache.inter, mode);
    d_intra_out = scatter_rows(d_inter_in, intra_to_inter(spec_, batch), d_inter_in.rows());
  }
  const Mat<S> d_intra_in = intra.backward(d_intra_out, cache.intra, mode);
  return scatter_rows(d_intra_in, sample_to_intra(spec_, batch), d_intra_in.rows());
}

template <typename S>
void LongContextEncoder<S>::collect(ParamList<S>& out) {
  intra.collect(out);
  if (folded_) inter.collect(out);
}

template <typename S>
FoldedGrid<S> intra_subsequence(const FoldedGrid<S>& grid, ResidualBlstm<S>& block, const nn::ForwardContext& ctx) {
  const FoldSpec& spec = grid.spec;
  spec.validate();
  typename ResidualBlstm<S>::Cache cache;
  const Mat<S> in = gather_rows(grid.values, sample_to_intra(spec, 1));
  const Mat<S> out = block.forward(in, spec.K, spec.B, ctx, cache);
  return {spec, gather_rows(out, intra_to_sample(spec, 1))};
}

template <typename S>
FoldedGrid<S> inter_subsequence(const FoldedGrid<S>& grid, ResidualBlstm<S>& block, const nn::ForwardContext& ctx) {
  const FoldSpec& spec = grid.spec;
  spec.validate();
  typename ResidualBlstm<S>::Cache cache;
  // Sample-major to inter layout is the inverse of inter_to_sample.
  const auto to_sample = inter_to_sample(spec, 1);
  std::vector<Index> to_inter(to_sample.size());
  for (std::size_t i = 0; i < to_sample.size(); ++i) to_inter[static_cast<std::size_t>(to_sample[i])] = static_cast<Index>(i);
  const Mat<S> in = gather_rows(grid.values, to_inter);
  const Mat<S> out = block.forward(in, spec.B, spec.K, ctx, cache);
  return {spec, gather_rows(out, to_sample)};
}

template class ResidualBlstm<float>;
template class ResidualBlstm<double>;
template class LongContextEncoder<float>;
template class LongContextEncoder<double>;

template FoldedGrid<float> intra_subsequence(const FoldedGrid<float>&, ResidualBlstm<float>&, const nn::ForwardContext&);
template FoldedGrid<double> intra_subsequence(const FoldedGrid<double>&, ResidualBlstm<double>&,
                                              const nn::ForwardContext&);
template FoldedGrid<float> inter_subsequence(const FoldedGrid<float>&, ResidualBlstm<float>&, const nn::ForwardContext&);
template FoldedGrid<double> inter_subsequence(const FoldedGrid<double>&, ResidualBlstm<double>&,
                                              const nn::ForwardContext&);

}  // namespace lseq::context
