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
#include <complex>
#include <string>
#include <vector>

#include "tqst/errors.hpp"
#include "tqst/rng.hpp"

namespace tqst {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major, double precision.
class ComplexMatrix {
 public:
  ComplexMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(check_dims(rows, cols)) {}

  static ComplexMatrix identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diag(const std::vector<double>& d) {
    ComplexMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (int i = 0; i < m.rows(); ++i) m(i, i) = d[i];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(int i, int j) { return data_[i * cols_ + j]; }
  const cplx& operator()(int i, int j) const { return data_[i * cols_ + j]; }

  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }

  cplx trace() const {
    cplx t = 0.0;
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const cplx& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_hermiticity_defect() const {
    double worst = 0.0;
    for (int i = 0; i < rows_; ++i)
      for (int j = i; j < cols_; ++j)
        worst = std::max(worst,
                         std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
  }

  bool is_hermitian(double tol) const {
    return square() && max_hermiticity_defect() <= tol;
  }

  /// Replace with (M + M†)/2. Requires a square matrix.
  void hermitize() {
    for (int i = 0; i < rows_; ++i) {
      (*this)(i, i) = (*this)(i, i).real();
      for (int j = i + 1; j < cols_; ++j) {
        cplx avg = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        (*this)(i, j) = avg;
        (*this)(j, i) = std::conj(avg);
      }
    }
  }

  friend ComplexMatrix operator*(const ComplexMatrix& a,
                                 const ComplexMatrix& b) {
    if (a.cols_ != b.rows_)
      throw ValidationError("matrix product dimension mismatch");
    ComplexMatrix out(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        cplx aik = a(i, k);
        if (aik == cplx(0.0)) continue;
        for (int j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend ComplexMatrix operator+(const ComplexMatrix& a,
                                 const ComplexMatrix& b) {
    check_same_shape(a, b);
    ComplexMatrix out = a;
    for (size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
    return out;
  }

  friend ComplexMatrix operator-(const ComplexMatrix& a,
                                 const ComplexMatrix& b) {
    check_same_shape(a, b);
    ComplexMatrix out = a;
    for (size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
    return out;
  }

  friend ComplexMatrix operator*(cplx s, const ComplexMatrix& a) {
    ComplexMatrix out = a;
    for (cplx& v : out.data_) v *= s;
    return out;
  }

  friend double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_same_shape(a, b);
    double worst = 0.0;
    for (size_t i = 0; i < a.data_.size(); ++i)
      worst = std::max(worst, std::abs(a.data_[i] - b.data_[i]));
    return worst;
  }

 private:
  static std::vector<cplx> check_dims(int rows, int cols) {
    if (rows < 1 || cols < 1)
      throw ValidationError("matrix dimensions must be at least 1x1");
    return std::vector<cplx>(static_cast<size_t>(rows) * cols);
  }

  static void check_same_shape(const ComplexMatrix& a,
                               const ComplexMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw ValidationError("matrix shape mismatch");
  }

  int rows_, cols_;
  std::vector<cplx> data_;
};

/// Square matrix of independent uniform(0,1) real entries, row-major fill.
inline ComplexMatrix rand_uniform_matrix(Rng& rng, int dim) {
  if (dim < 1) throw ValidationError("rand_uniform_matrix: dim must be >= 1");
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = rng.uniform();
  return m;
}

}  // namespace tqst
