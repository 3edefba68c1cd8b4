#include "lseq/nn/lstm.hpp"

#include "lseq/core/error.hpp"

namespace lseq::nn {

namespace {

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return (S(1) + (-x).exp()).inverse();
}

}  // namespace

template <typename S>
LstmDirection<S>::LstmDirection(const std::string& name, Index input, Index hidden, bool reverse)
    : w_x(name + ".w_x", input, 4 * hidden),
      w_h(name + ".w_h", hidden, 4 * hidden),
      bias(name + ".bias", 1, 4 * hidden),
      bn_x(name + ".bn_x", 4 * hidden, false, kGammaInit),
      bn_h(name + ".bn_h", 4 * hidden, false, kGammaInit),
      bn_c(name + ".bn_c", hidden, true, kGammaInit),
      reverse_(reverse) {}

template <typename S>
void LstmDirection<S>::init(Rng& rng) {
  init_fan_in_uniform(w_x, w_x.value.rows(), rng);
  init_fan_in_uniform(w_h, w_h.value.rows(), rng);
  const Index h = hidden_size();
  bias.value.setZero();
  bias.value.block(0, h, 1, h).setConstant(static_cast<S>(kForgetBias));
}

template <typename S>
Mat<S> LstmDirection<S>::forward(const Mat<S>& x, Index steps, Index batch, Mode mode, Cache& cache) {
  if (x.rows() != steps * batch) {
    throw ShapeError(w_x.name + ": input has " + std::to_string(x.rows()) + " rows, expected steps*batch = " +
                     std::to_string(steps * batch));
  }
  if (x.cols() != input_size()) {
    throw ShapeError(w_x.name + ": expected " + std::to_string(input_size()) + " input features, got " +
                     std::to_string(x.cols()));
  }
  const Index h = hidden_size();
  cache.steps = steps;
  cache.batch = batch;
  cache.iterations = 0;
  cache.input = x;
  cache.gates.resize(steps * batch, 4 * h);
  cache.cell.resize(steps * batch, h);
  cache.cell_tanh.resize(steps * batch, h);
  cache.hidden.resize(steps * batch, h);
  cache.bn_x.assign(steps, {});
  cache.bn_h.assign(steps, {});
  cache.bn_c.assign(steps, {});

  const bool train = mode == Mode::Train;
  if (train) {
    bn_x.begin_sequence();
    bn_h.begin_sequence();
    bn_c.begin_sequence();
  }

  const Mat<S> xproj = x * w_x.value;
  Mat<S> h_prev = Mat<S>::Zero(batch, h);
  Mat<S> c_prev = Mat<S>::Zero(batch, h);
  for (Index s = 0; s < steps; ++s) {
    const Index t = reverse_ ? steps - 1 - s : s;
    const Index row = t * batch;
    Mat<S> pre = bn_x.forward_step(xproj.middleRows(row, batch), mode, cache.bn_x[s]);
    if (s > 0) pre += bn_h.forward_step(h_prev * w_h.value, mode, cache.bn_h[s]);
    pre.rowwise() += bias.value.row(0);

    auto gates = cache.gates.middleRows(row, batch);
    gates.leftCols(3 * h) = sigmoid(pre.leftCols(3 * h).array()).matrix();
    gates.rightCols(h) = pre.rightCols(h).array().tanh().matrix();

    const auto i = gates.leftCols(h).array();
    const auto f = gates.middleCols(h, h).array();
    const auto o = gates.middleCols(2 * h, h).array();
    const auto g = gates.rightCols(h).array();
    Mat<S> c = (f * c_prev.array() + i * g).matrix();
    const Mat<S> cn = bn_c.forward_step(c, mode, cache.bn_c[s]);
    cache.cell.middleRows(row, batch) = c;
    cache.cell_tanh.middleRows(row, batch) = cn.array().tanh().matrix();
    cache.hidden.middleRows(row, batch) = (o * cache.cell_tanh.middleRows(row, batch).array()).matrix();
    h_prev = cache.hidden.middleRows(row, batch);
    c_prev = std::move(c);
    ++cache.iterations;
  }

  if (train) {
    bn_x.end_sequence();
    bn_h.end_sequence();
    bn_c.end_sequence();
  }
  return cache.hidden;
}

template <typename S>
Mat<S> LstmDirection<S>::backward(const Mat<S>& d_hidden, const Cache& cache, Mode mode) {
  const Index steps = cache.steps;
  const Index batch = cache.batch;
  const Index h = hidden_size();
  if (d_hidden.rows() != steps * batch || d_hidden.cols() != h) {
    throw ShapeError(w_x.name + ": gradient shape does not match the cached forward pass");
  }

  Mat<S> dxproj(steps * batch, 4 * h);
  Mat<S> dh_next = Mat<S>::Zero(batch, h);
  Mat<S> dc_next = Mat<S>::Zero(batch, h);
  Mat<S> dpre(batch, 4 * h);
  for (Index s = steps - 1; s >= 0; --s) {
    const Index t = reverse_ ? steps - 1 - s : s;
    const Index row = t * batch;
    const Index prev_row = (reverse_ ? t + 1 : t - 1) * batch;

    const auto gates = cache.gates.middleRows(row, batch);
    const auto i = gates.leftCols(h).array();
    const auto f = gates.middleCols(h, h).array();
    const auto o = gates.middleCols(2 * h, h).array();
    const auto g = gates.rightCols(h).array();
    const auto tc = cache.cell_tanh.middleRows(row, batch).array();

    const Mat<S> dh = d_hidden.middleRows(row, batch) + dh_next;
    const Mat<S> dcn = (dh.array() * o * (S(1) - tc.square())).matrix();
    const Mat<S> dc = bn_c.backward_step(dcn, cache.bn_c[s], mode) + dc_next;

    dpre.leftCols(h) = (dc.array() * g * i * (S(1) - i)).matrix();
    if (s > 0) {
      dpre.middleCols(h, h) =
          (dc.array() * cache.cell.middleRows(prev_row, batch).array() * f * (S(1) - f)).matrix();
    } else {
      dpre.middleCols(h, h).setZero();
    }
    dpre.middleCols(2 * h, h) = (dh.array() * tc * o * (S(1) - o)).matrix();
    dpre.rightCols(h) = (dc.array() * i * (S(1) - g.square())).matrix();
    dc_next = (dc.array() * f).matrix();

    bias.grad += dpre.colwise().sum();
    dxproj.middleRows(row, batch) = bn_x.backward_step(dpre, cache.bn_x[s], mode);
    if (s > 0) {
      const Mat<S> dah = bn_h.backward_step(dpre, cache.bn_h[s], mode);
      w_h.grad.noalias() += cache.hidden.middleRows(prev_row, batch).transpose() * dah;
      dh_next.noalias() = dah * w_h.value.transpose();
    } else {
      dh_next.setZero();
    }
  }
  w_x.grad.noalias() += cache.input.transpose() * dxproj;
  return dxproj * w_x.value.transpose();
}

template <typename S>
void LstmDirection<S>::collect(ParamList<S>& out) {
  out.push_back(&w_x);
  out.push_back(&w_h);
  out.push_back(&bias);
  bn_x.collect(out);
  bn_h.collect(out);
  bn_c.collect(out);
}

template <typename S>
Blstm<S>::Blstm(const std::string& name, Index input, Index hidden_per_direction)
    : fw(name + ".fw", input, hidden_per_direction, false), bw(name + ".bw", input, hidden_per_direction, true) {}

template <typename S>
void Blstm<S>::init(Rng& rng) {
  fw.init(rng);
  bw.init(rng);
}

template <typename S>
Mat<S> Blstm<S>::forward(const Mat<S>& x, Index steps, Index batch, Mode mode, Cache& cache) {
  const Index h = fw.hidden_size();
  Mat<S> out(steps * batch, 2 * h);
  out.leftCols(h) = fw.forward(x, steps, batch, mode, cache.fw);
  out.rightCols(h) = bw.forward(x, steps, batch, mode, cache.bw);
  if (!out.allFinite()) {
    for (Index t = 0; t < steps; ++t) {
      if (!out.middleRows(t * batch, batch).allFinite()) {
        throw NumericError(fw.w_x.name + ": non-finite activation at timestep " + std::to_string(t));
      }
    }
  }
  return out;
}

template <typename S>
Mat<S> Blstm<S>::backward(const Mat<S>& d_out, const Cache& cache, Mode mode) {
  const Index h = fw.hidden_size();
  Mat<S> dx = fw.backward(d_out.leftCols(h), cache.fw, mode);
  dx += bw.backward(d_out.rightCols(h), cache.bw, mode);
  return dx;
}

template <typename S>
void Blstm<S>::collect(ParamList<S>& out) {
  fw.collect(out);
  bw.collect(out);
}

template class LstmDirection<float>;
template class LstmDirection<double>;
template class Blstm<float>;
template class Blstm<double>;

}  // namespace lseq::nn
