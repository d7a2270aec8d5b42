#include "nn/layers.hpp"

#include <stdexcept>

namespace parkour::nn {

namespace {

using ConstMap = Eigen::Map<const Mat>;
using MutMap = Eigen::Map<Mat>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using MutVecMap = Eigen::Map<Eigen::VectorXd>;

}  // namespace

Act act_from_name(std::string_view name) {
  if (name == "tanh") return Act::Tanh;
  if (name == "relu") return Act::Relu;
  throw std::runtime_error("layers: unknown activation " + std::string(name));
}

std::string_view act_name(Act a) { return a == Act::Tanh ? "tanh" : "relu"; }

void act_forward(Act a, Mat& y) {
  if (a == Act::Tanh) {
    y = y.array().tanh();
  } else {
    y = y.array().max(0.0);
  }
}

void act_backward(Act a, const Mat& y, Mat& dy) {
  if (a == Act::Tanh) {
    dy.array() *= 1.0 - y.array().square();
  } else {
    dy.array() *= (y.array() > 0.0).cast<double>();
  }
}

DenseSpec DenseSpec::create(FlatParams& p, const std::string& name, int in, int out) {
  DenseSpec s;
  s.in = in;
  s.out = out;
  s.w_off = p.add(name + ".w", static_cast<std::size_t>(out) * in);
  s.b_off = p.add(name + ".b", static_cast<std::size_t>(out));
  return s;
}

void DenseSpec::forward(const FlatParams& p, const Mat& x, Mat& y) const {
  ConstMap w(p.data() + w_off, out, in);
  ConstVecMap b(p.data() + b_off, out);
  y.noalias() = w * x;
  y.colwise() += b;
}

void DenseSpec::backward(const FlatParams& p, const Mat& x, const Mat& dy,
                         std::vector<double>& grad, Mat* dx) const {
  MutMap dw(grad.data() + w_off, out, in);
  MutVecMap db(grad.data() + b_off, out);
  dw.noalias() += dy * x.transpose();
  db.noalias() += dy.rowwise().sum();
  if (dx != nullptr) {
    ConstMap w(p.data() + w_off, out, in);
    dx->noalias() += w.transpose() * dy;
  }
}

Conv1dSpec Conv1dSpec::create(FlatParams& p, const std::string& name, int in_ch,
                              int len_in, int out_ch, int k, int stride) {
  if (len_in < k || stride < 1)
    throw std::runtime_error("layers: bad conv geometry for " + name);
  Conv1dSpec s;
  s.in_ch = in_ch;
  s.len_in = len_in;
  s.out_ch = out_ch;
  s.k = k;
  s.stride = stride;
  s.w_off = p.add(name + ".w", static_cast<std::size_t>(out_ch) * in_ch * k);
  s.b_off = p.add(name + ".b", static_cast<std::size_t>(out_ch));
  return s;
}

void Conv1dSpec::forward(const FlatParams& p, const Mat& x, Mat& col, Mat& y) const {
  const int lo = len_out();
  const auto n = x.cols();
  col.resize(in_ch * k, lo * n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (int pos = 0; pos < lo; ++pos) {
      for (int c = 0; c < in_ch; ++c) {
        for (int j = 0; j < k; ++j) {
          col(c * k + j, s * lo + pos) = x(c * len_in + pos * stride + j, s);
        }
      }
    }
  }
  ConstMap w(p.data() + w_off, out_ch, in_ch * k);
  ConstVecMap b(p.data() + b_off, out_ch);
  Mat flat = w * col;  // (out_ch × lo·n)
  flat.colwise() += b;
  y.resize(out_ch * lo, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (int c = 0; c < out_ch; ++c) {
      for (int pos = 0; pos < lo; ++pos) {
        y(c * lo + pos, s) = flat(c, s * lo + pos);
      }
    }
  }
}

void Conv1dSpec::backward(const FlatParams& p, const Mat& col, const Mat& dy,
                          std::vector<double>& grad, Mat* dx) const {
  const int lo = len_out();
  const auto n = dy.cols();
  Mat dflat(out_ch, lo * n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (int c = 0; c < out_ch; ++c) {
      for (int pos = 0; pos < lo; ++pos) {
        dflat(c, s * lo + pos) = dy(c * lo + pos, s);
      }
    }
  }
  MutMap dw(grad.data() + w_off, out_ch, in_ch * k);
  MutVecMap db(grad.data() + b_off, out_ch);
  dw.noalias() += dflat * col.transpose();
  db.noalias() += dflat.rowwise().sum();
  if (dx != nullptr) {
    ConstMap w(p.data() + w_off, out_ch, in_ch * k);
    Mat dcol = w.transpose() * dflat;  // (in_ch·k × lo·n)
    for (Eigen::Index s = 0; s < n; ++s) {
      for (int pos = 0; pos < lo; ++pos) {
        for (int c = 0; c < in_ch; ++c) {
          for (int j = 0; j < k; ++j) {
            (*dx)(c * len_in + pos * stride + j, s) += dcol(c * k + j, s * lo + pos);
          }
        }
      }
    }
  }
}

AdapterSpec AdapterSpec::create(FlatParams& p, const std::string& name, int dim,
                                int width) {
  AdapterSpec s;
  s.down = DenseSpec::create(p, name + ".down", dim, width);
  s.up = DenseSpec::create(p, name + ".up", width, dim);
  return s;
}

void AdapterSpec::forward(const FlatParams& p, Act act, const Mat& f_in,
                          Mat& hidden, Mat& f_out) const {
  down.forward(p, f_in, hidden);
  act_forward(act, hidden);
  up.forward(p, hidden, f_out);
  f_out += f_in;
}

void AdapterSpec::backward(const FlatParams& p, Act act, const Mat& f_in,
                           const Mat& hidden, Mat& df,
                           std::vector<double>& grad) const {
  Mat dhidden = Mat::Zero(hidden.rows(), hidden.cols());
  up.backward(p, hidden, df, grad, &dhidden);
  act_backward(act, hidden, dhidden);
  // identity path keeps df; the down path accumulates on top of it
  down.backward(p, f_in, dhidden, grad, &df);
}

void orthogonal_fill(Rng& rng, double gain, Eigen::Ref<Mat> w) {
  const auto rows = w.rows();
  const auto cols = w.cols();
  const bool wide = rows < cols;
  Mat g(wide ? cols : rows, wide ? rows : cols);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(g.rows(), g.cols());
  const Mat r = qr.matrixQR().topRows(g.cols());
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  w = gain * (wide ? q.transpose() : q);
}

void init_dense(FlatParams& p, const DenseSpec& spec, Rng& rng, double gain) {
  MutMap w(p.data() + spec.w_off, spec.out, spec.in);
  orthogonal_fill(rng, gain, w);
  MutVecMap(p.data() + spec.b_off, spec.out).setZero();
}

void init_conv(FlatParams& p, const Conv1dSpec& spec, Rng& rng, double gain) {
  MutMap w(p.data() + spec.w_off, spec.out_ch, spec.in_ch * spec.k);
  orthogonal_fill(rng, gain, w);
  MutVecMap(p.data() + spec.b_off, spec.out_ch).setZero();
}

}  // namespace parkour::nn
