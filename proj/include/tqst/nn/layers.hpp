// Copyright 2026 The tqstnet developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "tqst/nn/tensor.hpp"
#include "tqst/protocol.hpp"
#include "tqst/rng.hpp"

namespace tqst::nn {

/// One differentiable stage. forward() caches whatever backward() needs;
/// backward() accumulates parameter gradients and returns the input
/// gradient. Single sample at a time; batching is the trainer's loop.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x, bool training, Rng& rng) = 0;
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual std::vector<ParamView> params() { return {}; }
  virtual std::string name() const = 0;

 protected:
  void require_forward(bool have) const {
    if (!have)
      throw ValidationError(name() + ": backward before forward");
  }
};

/// Fully connected layer, y = W x + b, W stored out-major.
class Linear : public Layer {
 public:
  Linear(int in_features, int out_features, Rng& rng)
      : in_(in_features), out_(out_features) {
    if (in_ < 1 || out_ < 1) throw ValidationError("Linear: bad feature count");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_));
    w_.resize(static_cast<size_t>(out_) * in_);
    b_.resize(out_);
    for (double& v : w_) v = rng.uniform(-bound, bound);
    for (double& v : b_) v = rng.uniform(-bound, bound);
    gw_.assign(w_.size(), 0.0);
    gb_.assign(b_.size(), 0.0);
  }

  Tensor forward(const Tensor& x, bool, Rng&) override {
    if (x.shape != std::vector<int>{in_})
      throw ValidationError("Linear: input shape mismatch");
    x_ = x;
    Tensor y({out_});
    for (int o = 0; o < out_; ++o) {
      const double* row = &w_[static_cast<size_t>(o) * in_];
      double acc = b_[o];
      for (int i = 0; i < in_; ++i) acc += row[i] * x.values[i];
      y.values[o] = acc;
    }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    require_forward(!x_.values.empty());
    Tensor dx({in_});
    for (int o = 0; o < out_; ++o) {
      const double g = dy.values[o];
      double* grow = &gw_[static_cast<size_t>(o) * in_];
      const double* row = &w_[static_cast<size_t>(o) * in_];
      for (int i = 0; i < in_; ++i) {
        grow[i] += g * x_.values[i];
        dx.values[i] += row[i] * g;
      }
      gb_[o] += g;
    }
    return dx;
  }

  std::vector<ParamView> params() override {
    return {{w_.data(), gw_.data(), w_.size()},
            {b_.data(), gb_.data(), b_.size()}};
  }

  std::string name() const override { return "Linear"; }
  int in_features() const { return in_; }
  int out_features() const { return out_; }

 private:
  int in_, out_;
  std::vector<double> w_, b_, gw_, gb_;
  Tensor x_;
};

class ReLU : public Layer {
 public:
  Tensor forward(const Tensor& x, bool, Rng&) override {
    y_ = x;
    for (double& v : y_.values) v = std::max(v, 0.0);
    return y_;
  }
  Tensor backward(const Tensor& dy) override {
    require_forward(!y_.values.empty());
    Tensor dx = dy;
    for (size_t i = 0; i < dx.values.size(); ++i)
      if (y_.values[i] <= 0.0) dx.values[i] = 0.0;
    return dx;
  }
  std::string name() const override { return "ReLU"; }

 private:
  Tensor y_;
};

/// Inverted dropout: training scales surviving activations by 1/(1-p);
/// inference is the identity.
class Dropout : public Layer {
 public:
  explicit Dropout(double p) : p_(p) {
    if (p < 0.0 || p >= 1.0)
      throw ValidationError("Dropout: probability must be in [0, 1)");
  }

  Tensor forward(const Tensor& x, bool training, Rng& rng) override {
    Tensor y = x;
    mask_.assign(x.size(), 1.0);
    if (training && p_ > 0.0) {
      const double keep_scale = 1.0 / (1.0 - p_);
      for (size_t i = 0; i < y.values.size(); ++i) {
        mask_[i] = rng.uniform() < p_ ? 0.0 : keep_scale;
        y.values[i] *= mask_[i];
      }
    }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    require_forward(!mask_.empty());
    Tensor dx = dy;
    for (size_t i = 0; i < dx.values.size(); ++i) dx.values[i] *= mask_[i];
    return dx;
  }

  std::string name() const override { return "Dropout"; }
  double probability() const { return p_; }

 private:
  double p_;
  std::vector<double> mask_;
};

/// Permutation-equivariant linear layer on square grids of channel vectors.
///
/// Output cell (i,j) is the sum of fifteen learned channel maps applied to
/// the cell itself, its transpose partner, the row/column/diagonal/global
/// pools, and five diagonal-only terms, plus a shared bias everywhere and a
/// second bias on the diagonal. Relabeling the grid indices relabels the
/// output identically: F(P^T X P) = P^T F(X) P.
class PELinear : public Layer {
 public:
  static constexpr int kTerms = 15;

  /// `grid_dim` only calibrates the initialization: the pooled features
  /// scale with the grid (row/column/trace sums ~ N, global sums ~ N^2),
  /// so each term's init bound is divided by its pooling size to keep the
  /// initial output at cell scale. The layer itself accepts any grid size.
  PELinear(int in_channels, int out_channels, Rng& rng, int grid_dim = 1)
      : c_(in_channels), d_(out_channels) {
    if (c_ < 1 || d_ < 1) throw ValidationError("PELinear: bad channel count");
    if (grid_dim < 1) throw ValidationError("PELinear: bad grid dimension");
    const double base = 1.0 / std::sqrt(static_cast<double>(kTerms * c_));
    const double n = grid_dim;
    const double term_scale[kTerms] = {1,     1,     n, n, n, n, n * n, n,
                                       1,     1,     1, n, n * n, n, n};
    w_.resize(static_cast<size_t>(kTerms) * c_ * d_);
    for (int k = 0; k < kTerms; ++k) {
      const double bound = base / term_scale[k];
      for (int i = 0; i < c_ * d_; ++i)
        w_[static_cast<size_t>(k) * c_ * d_ + i] = rng.uniform(-bound, bound);
    }
    bias_all_.resize(d_);
    bias_diag_.resize(d_);
    for (double& v : bias_all_) v = rng.uniform(-base, base);
    for (double& v : bias_diag_) v = rng.uniform(-base, base);
    gw_.assign(w_.size(), 0.0);
    gball_.assign(d_, 0.0);
    gbdiag_.assign(d_, 0.0);
  }

  /// Weight matrix k maps input channels to output channels:
  /// w(k, ci, dj) multiplies feature k's channel ci into output channel dj.
  double& w(int k, int ci, int dj) {
    return w_[(static_cast<size_t>(k) * c_ + ci) * d_ + dj];
  }

  Tensor forward(const Tensor& x, bool, Rng&) override {
    if (x.shape.size() != 3 || x.shape[0] != x.shape[1] || x.shape[2] != c_)
      throw ValidationError("PELinear: expected square NxNxC input");
    n_ = x.shape[0];
    x_ = x;
    pool(x, rowsum_, colsum_, diag_, tot_, tr_);

    // Position-independent pieces, each a d-vector.
    std::vector<double> cvec(d_, 0.0);
    add_map(6, tot_.data(), cvec.data());
    add_map(7, tr_.data(), cvec.data());
    for (int j = 0; j < d_; ++j) cvec[j] += bias_all_[j];
    a_.assign(static_cast<size_t>(n_) * d_, 0.0);
    b_.assign(static_cast<size_t>(n_) * d_, 0.0);
    dterm_.assign(static_cast<size_t>(n_) * d_, 0.0);
    for (int i = 0; i < n_; ++i) {
      double* ai = &a_[static_cast<size_t>(i) * d_];
      add_map(2, row(rowsum_, i), ai);
      add_map(3, row(colsum_, i), ai);
      add_map(8, row(diag_, i), ai);
      double* bi = &b_[static_cast<size_t>(i) * d_];
      add_map(4, row(colsum_, i), bi);
      add_map(5, row(rowsum_, i), bi);
      add_map(9, row(diag_, i), bi);
      double* di = &dterm_[static_cast<size_t>(i) * d_];
      add_map(10, row(diag_, i), di);
      add_map(11, tr_.data(), di);
      add_map(12, tot_.data(), di);
      add_map(13, row(rowsum_, i), di);
      add_map(14, row(colsum_, i), di);
      for (int j = 0; j < d_; ++j) di[j] += bias_diag_[j];
    }

    Tensor y({n_, n_, d_});
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        double* out = &y.values[(static_cast<size_t>(i) * n_ + j) * d_];
        add_map(0, cell(x, i, j), out);
        add_map(1, cell(x, j, i), out);
        const double* ai = &a_[static_cast<size_t>(i) * d_];
        const double* bj = &b_[static_cast<size_t>(j) * d_];
        for (int k = 0; k < d_; ++k) out[k] += ai[k] + bj[k] + cvec[k];
        if (i == j) {
          const double* di = &dterm_[static_cast<size_t>(i) * d_];
          for (int k = 0; k < d_; ++k) out[k] += di[k];
        }
      }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    require_forward(n_ > 0);
    if (dy.shape != std::vector<int>{n_, n_, d_})
      throw ValidationError("PELinear: gradient shape mismatch");

    // Pools of the output gradient, mirroring the forward pools.
    std::vector<double> dyrow(static_cast<size_t>(n_) * d_, 0.0);
    std::vector<double> dycol(static_cast<size_t>(n_) * d_, 0.0);
    std::vector<double> dydiag(static_cast<size_t>(n_) * d_, 0.0);
    std::vector<double> dytot(d_, 0.0), dytr(d_, 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const double* g = cellv(dy, i, j);
        double* ri = &dyrow[static_cast<size_t>(i) * d_];
        double* cj = &dycol[static_cast<size_t>(j) * d_];
        for (int k = 0; k < d_; ++k) {
          ri[k] += g[k];
          cj[k] += g[k];
          dytot[k] += g[k];
        }
        if (i == j)
          for (int k = 0; k < d_; ++k) {
            dydiag[static_cast<size_t>(i) * d_ + k] = g[k];
            dytr[k] += g[k];
          }
      }

    // Parameter gradients. The dense terms 0 and 1 need the full grid; the
    // pooled terms collapse to row/column/global outer products.
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        outer_acc(0, cell(x_, i, j), cellv(dy, i, j));
        outer_acc(1, cell(x_, j, i), cellv(dy, i, j));
      }
    for (int i = 0; i < n_; ++i) {
      const double* ri = &dyrow[static_cast<size_t>(i) * d_];
      const double* ci = &dycol[static_cast<size_t>(i) * d_];
      const double* di = &dydiag[static_cast<size_t>(i) * d_];
      outer_acc(2, row(rowsum_, i), ri);
      outer_acc(3, row(colsum_, i), ri);
      outer_acc(4, row(colsum_, i), ci);
      outer_acc(5, row(rowsum_, i), ci);
      outer_acc(8, row(diag_, i), ri);
      outer_acc(9, row(diag_, i), ci);
      outer_acc(10, row(diag_, i), di);
      outer_acc(13, row(rowsum_, i), di);
      outer_acc(14, row(colsum_, i), di);
    }
    outer_acc(6, tot_.data(), dytot.data());
    outer_acc(7, tr_.data(), dytot.data());
    outer_acc(11, tr_.data(), dytr.data());
    outer_acc(12, tot_.data(), dytr.data());
    for (int k = 0; k < d_; ++k) {
      gball_[k] += dytot[k];
      gbdiag_[k] += dytr[k];
    }

    // Input gradient via the transposed maps.
    std::vector<double> r1(static_cast<size_t>(n_) * c_, 0.0);  // row-indexed
    std::vector<double> r2(static_cast<size_t>(n_) * c_, 0.0);  // col-indexed
    std::vector<double> ddiag(static_cast<size_t>(n_) * c_, 0.0);
    std::vector<double> shared(c_, 0.0);
    add_map_t(6, dytot.data(), shared.data());
    add_map_t(12, dytr.data(), shared.data());
    for (int i = 0; i < n_; ++i) {
      const double* ri = &dyrow[static_cast<size_t>(i) * d_];
      const double* ci = &dycol[static_cast<size_t>(i) * d_];
      const double* di = &dydiag[static_cast<size_t>(i) * d_];
      double* r1i = &r1[static_cast<size_t>(i) * c_];
      add_map_t(2, ri, r1i);
      add_map_t(5, ci, r1i);
      add_map_t(13, di, r1i);
      double* r2i = &r2[static_cast<size_t>(i) * c_];
      add_map_t(3, ri, r2i);
      add_map_t(4, ci, r2i);
      add_map_t(14, di, r2i);
      double* ddi = &ddiag[static_cast<size_t>(i) * c_];
      add_map_t(7, dytot.data(), ddi);
      add_map_t(8, ri, ddi);
      add_map_t(9, ci, ddi);
      add_map_t(10, di, ddi);
      add_map_t(11, dytr.data(), ddi);
    }

    Tensor dx({n_, n_, c_});
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        double* out = &dx.values[(static_cast<size_t>(i) * n_ + j) * c_];
        add_map_t(0, cellv(dy, i, j), out);
        add_map_t(1, cellv(dy, j, i), out);
        const double* r1i = &r1[static_cast<size_t>(i) * c_];
        const double* r2j = &r2[static_cast<size_t>(j) * c_];
        for (int k = 0; k < c_; ++k) out[k] += r1i[k] + r2j[k] + shared[k];
        if (i == j) {
          const double* ddi = &ddiag[static_cast<size_t>(i) * c_];
          for (int k = 0; k < c_; ++k) out[k] += ddi[k];
        }
      }
    return dx;
  }

  std::vector<ParamView> params() override {
    return {{w_.data(), gw_.data(), w_.size()},
            {bias_all_.data(), gball_.data(), bias_all_.size()},
            {bias_diag_.data(), gbdiag_.data(), bias_diag_.size()}};
  }

  std::string name() const override { return "PELinear"; }
  int in_channels() const { return c_; }
  int out_channels() const { return d_; }

 private:
  // y[d] += W_k^T x[c]
  void add_map(int k, const double* x, double* y) const {
    const double* wk = &w_[static_cast<size_t>(k) * c_ * d_];
    for (int ci = 0; ci < c_; ++ci) {
      const double xv = x[ci];
      const double* wrow = &wk[static_cast<size_t>(ci) * d_];
      for (int dj = 0; dj < d_; ++dj) y[dj] += xv * wrow[dj];
    }
  }
  // x[c] += W_k g[d]
  void add_map_t(int k, const double* g, double* x) const {
    const double* wk = &w_[static_cast<size_t>(k) * c_ * d_];
    for (int ci = 0; ci < c_; ++ci) {
      const double* wrow = &wk[static_cast<size_t>(ci) * d_];
      double acc = 0.0;
      for (int dj = 0; dj < d_; ++dj) acc += wrow[dj] * g[dj];
      x[ci] += acc;
    }
  }
  // gW_k += x[c] (outer) g[d]
  void outer_acc(int k, const double* x, const double* g) {
    double* wk = &gw_[static_cast<size_t>(k) * c_ * d_];
    for (int ci = 0; ci < c_; ++ci) {
      const double xv = x[ci];
      double* wrow = &wk[static_cast<size_t>(ci) * d_];
      for (int dj = 0; dj < d_; ++dj) wrow[dj] += xv * g[dj];
    }
  }

  const double* cell(const Tensor& t, int i, int j) const {
    return &t.values[(static_cast<size_t>(i) * n_ + j) * c_];
  }
  const double* cellv(const Tensor& t, int i, int j) const {
    return &t.values[(static_cast<size_t>(i) * n_ + j) * d_];
  }
  const double* row(const std::vector<double>& m, int i) const {
    return &m[static_cast<size_t>(i) * c_];
  }

  void pool(const Tensor& x, std::vector<double>& rowsum,
            std::vector<double>& colsum, std::vector<double>& diag,
            std::vector<double>& tot, std::vector<double>& tr) const {
    rowsum.assign(static_cast<size_t>(n_) * c_, 0.0);
    colsum.assign(static_cast<size_t>(n_) * c_, 0.0);
    diag.assign(static_cast<size_t>(n_) * c_, 0.0);
    tot.assign(c_, 0.0);
    tr.assign(c_, 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const double* v = cell(x, i, j);
        double* ri = &rowsum[static_cast<size_t>(i) * c_];
        double* cj = &colsum[static_cast<size_t>(j) * c_];
        for (int k = 0; k < c_; ++k) {
          ri[k] += v[k];
          cj[k] += v[k];
          tot[k] += v[k];
        }
        if (i == j)
          for (int k = 0; k < c_; ++k) {
            diag[static_cast<size_t>(i) * c_ + k] = v[k];
            tr[k] += v[k];
          }
      }
  }

  int c_, d_;
  int n_ = 0;
  std::vector<double> w_, bias_all_, bias_diag_;
  std::vector<double> gw_, gball_, gbdiag_;
  Tensor x_;
  std::vector<double> rowsum_, colsum_, diag_, tot_, tr_;
  std::vector<double> a_, b_, dterm_;
};

/// Read a two-channel grid out as the flat 4^n parameter layout: channel 0
/// of the diagonal, then per pair (i<j) the (i,j)/(j,i) average of channel
/// 0 and channel 1. The adjoint of the input encoding, as a layer.
class GridDecode : public Layer {
 public:
  explicit GridDecode(int n_qubits)
      : n_(dim_for_qubits(n_qubits)), pairs_(pair_order(n_)) {}

  Tensor forward(const Tensor& x, bool, Rng&) override {
    if (x.shape != std::vector<int>{n_, n_, 2})
      throw ValidationError("GridDecode: expected NxNx2 input");
    have_forward_ = true;
    Tensor y({n_ * n_});
    for (int i = 0; i < n_; ++i) y.values[i] = at(x, i, i, 0);
    for (size_t k = 0; k < pairs_.size(); ++k) {
      const auto [i, j] = pairs_[k];
      y.values[n_ + 2 * k] = 0.5 * (at(x, i, j, 0) + at(x, j, i, 0));
      y.values[n_ + 2 * k + 1] = 0.5 * (at(x, i, j, 1) + at(x, j, i, 1));
    }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    require_forward(have_forward_);
    Tensor dx({n_, n_, 2});
    for (int i = 0; i < n_; ++i) at(dx, i, i, 0) = dy.values[i];
    for (size_t k = 0; k < pairs_.size(); ++k) {
      const auto [i, j] = pairs_[k];
      at(dx, i, j, 0) += 0.5 * dy.values[n_ + 2 * k];
      at(dx, j, i, 0) += 0.5 * dy.values[n_ + 2 * k];
      at(dx, i, j, 1) += 0.5 * dy.values[n_ + 2 * k + 1];
      at(dx, j, i, 1) += 0.5 * dy.values[n_ + 2 * k + 1];
    }
    return dx;
  }

  std::string name() const override { return "GridDecode"; }

 private:
  double at(const Tensor& t, int i, int j, int ch) const {
    return t.values[(static_cast<size_t>(i) * n_ + j) * 2 + ch];
  }
  double& at(Tensor& t, int i, int j, int ch) const {
    return t.values[(static_cast<size_t>(i) * n_ + j) * 2 + ch];
  }

  int n_;
  std::vector<std::pair<int, int>> pairs_;
  bool have_forward_ = false;
};

}  // namespace tqst::nn
