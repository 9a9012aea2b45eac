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
#include <string>
#include <vector>

#include "tqst/complex_matrix.hpp"
#include "tqst/eig.hpp"
#include "tqst/errors.hpp"
#include "tqst/rng.hpp"

namespace tqst {

inline int dim_for_qubits(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 8)
    throw ValidationError("qubit count must be in [1, 8]");
  return 1 << n_qubits;
}

/// A quantum state: Hermitian, trace-one, positive semi-definite matrix of
/// dimension 2^n x 2^n.
class DensityMatrix {
 public:
  /// Validates all invariants (Hermiticity, unit trace, PSD up to -1e-9,
  /// and the PSD-implied off-diagonal bound |m_ij| <= sqrt(m_ii m_jj)).
  static DensityMatrix from_matrix(int n_qubits, ComplexMatrix m) {
    const int d = dim_for_qubits(n_qubits);
    if (m.rows() != d || m.cols() != d)
      throw ValidationError("density matrix has wrong dimension");
    if (m.max_hermiticity_defect() > 1e-10)
      throw ValidationError("density matrix not Hermitian");
    if (std::abs(m.trace() - cplx(1.0)) > 1e-10)
      throw ValidationError("density matrix trace differs from 1");
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        double bound = std::sqrt(m(i, i).real() * m(j, j).real());
        if (std::abs(m(i, j)) > bound + 1e-9)
          throw ValidationError("off-diagonal bound violated at (" +
                                std::to_string(i) + "," + std::to_string(j) +
                                ")");
      }
    EigenDecomposition ed = hermitian_eig(m);
    if (ed.eigenvalues.front() < -1e-9)
      throw ValidationError("density matrix has eigenvalue " +
                            std::to_string(ed.eigenvalues.front()));
    return DensityMatrix(n_qubits, std::move(m));
  }

  /// Skips the O(d^3) PSD check; for callers whose construction guarantees
  /// positivity (convex combinations, spectral rebuilds, AA†).
  static DensityMatrix trusted(int n_qubits, ComplexMatrix m) {
    m.hermitize();
    return DensityMatrix(n_qubits, std::move(m));
  }

  int n_qubits() const { return n_qubits_; }
  int dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }

  std::vector<double> diagonal() const {
    std::vector<double> d(dim());
    for (int i = 0; i < dim(); ++i) d[i] = mat_(i, i).real();
    return d;
  }

 private:
  DensityMatrix(int n_qubits, ComplexMatrix m)
      : n_qubits_(n_qubits), mat_(std::move(m)) {}

  int n_qubits_;
  ComplexMatrix mat_;
};

/// Recipe for one random state: number of vanishing diagonal entries,
/// rank, and whether the state is pure (rank 1).
struct StateSpec {
  int n_qubits = 1;
  int zeros = 0;
  int rank = 1;
  bool pure = false;

  void validate() const {
    const int d = dim_for_qubits(n_qubits);
    if (zeros < 0 || zeros > d - 2)
      throw ValidationError("StateSpec: zeros must be in [0, 2^n - 2]");
    if (pure) {
      if (rank != 1) throw ValidationError("StateSpec: pure state needs rank 1");
    } else {
      if (rank < 2 || rank > d - zeros)
        throw ValidationError("StateSpec: mixed rank must be in [2, 2^n - zeros]");
    }
  }
};

enum class NoiseKind { None, Depolarizing, ExpState };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::None;
  double strength = 0.0;

  void validate(int n_qubits) const {
    const double d = static_cast<double>(dim_for_qubits(n_qubits));
    switch (kind) {
      case NoiseKind::None:
        break;
      case NoiseKind::Depolarizing:
        if (strength < 0.0 || strength > 1.0 + 1.0 / (d * d - 1.0))
          throw ValidationError("depolarizing strength out of range");
        break;
      case NoiseKind::ExpState:
        if (strength < 0.0 || strength > 1.0)
          throw ValidationError("state-error strength out of range");
        break;
    }
  }

  std::string name() const {
    switch (kind) {
      case NoiseKind::Depolarizing: return "depol";
      case NoiseKind::ExpState: return "expstate";
      default: return "none";
    }
  }
};

/// Draw a random density matrix with exactly `spec.zeros` vanishing diagonal
/// entries (at uniformly random positions) and rank `spec.rank`.
///
/// Mixed states: a Haar-random rank-r frame on the support subspace
/// (Gram-Schmidt of Gaussian columns) with eigenvalues drawn uniformly from
/// the simplex. Pure states: a normalized complex-Gaussian vector.
inline DensityMatrix generate_state(Rng& rng, const StateSpec& spec) {
  spec.validate();
  const int d = dim_for_qubits(spec.n_qubits);
  const int support_dim = d - spec.zeros;

  // Uniformly random support positions: partial Fisher-Yates.
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  for (int i = 0; i < support_dim; ++i) {
    int j = i + static_cast<int>(rng.next_below(d - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<int> support(idx.begin(), idx.begin() + support_dim);
  std::sort(support.begin(), support.end());

  ComplexMatrix sub(support_dim, support_dim);
  if (spec.pure) {
    std::vector<cplx> v(support_dim);
    double norm2 = 0.0;
    for (cplx& x : v) {
      x = rng.gauss_complex();
      norm2 += std::norm(x);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < support_dim; ++i)
      for (int j = 0; j < support_dim; ++j)
        sub(i, j) = v[i] * std::conj(v[j]) * (inv * inv);
  } else {
    // Orthonormal columns by modified Gram-Schmidt over Gaussian draws.
    ComplexMatrix frame(support_dim, spec.rank);
    for (int col = 0; col < spec.rank; ++col) {
      std::vector<cplx> v(support_dim);
      for (cplx& x : v) x = rng.gauss_complex();
      for (int prev = 0; prev < col; ++prev) {
        cplx proj = 0.0;
        for (int i = 0; i < support_dim; ++i)
          proj += std::conj(frame(i, prev)) * v[i];
        for (int i = 0; i < support_dim; ++i) v[i] -= proj * frame(i, prev);
      }
      double norm2 = 0.0;
      for (const cplx& x : v) norm2 += std::norm(x);
      const double inv = 1.0 / std::sqrt(norm2);
      for (int i = 0; i < support_dim; ++i) frame(i, col) = v[i] * inv;
    }
    // Flat-simplex spectrum via normalized exponentials; redraw the rare
    // spectrum whose smallest weight would fall below the rank tolerance.
    std::vector<double> lam(spec.rank);
    while (true) {
      double sum = 0.0;
      for (double& x : lam) {
        x = -std::log(rng.uniform());
        sum += x;
      }
      double lo = 1.0;
      for (double& x : lam) {
        x /= sum;
        lo = std::min(lo, x);
      }
      if (lo > 1e-9) break;
    }
    for (int i = 0; i < support_dim; ++i)
      for (int j = 0; j < support_dim; ++j) {
        cplx acc = 0.0;
        for (int k = 0; k < spec.rank; ++k)
          acc += frame(i, k) * lam[k] * std::conj(frame(j, k));
        sub(i, j) = acc;
      }
  }

  ComplexMatrix rho(d, d);
  for (int i = 0; i < support_dim; ++i)
    for (int j = 0; j < support_dim; ++j)
      rho(support[i], support[j]) = sub(i, j);
  return DensityMatrix::trusted(spec.n_qubits, std::move(rho));
}

/// Tr[rho^2]; equals the squared Frobenius norm for Hermitian matrices.
inline double purity(const DensityMatrix& rho) {
  double s = 0.0;
  for (const cplx& v : rho.matrix().data()) s += std::norm(v);
  return s;
}

/// Uhlmann fidelity Tr sqrt(sqrt(a) b sqrt(a)), in [0, 1].
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim())
    throw ValidationError("fidelity: dimension mismatch");
  // Internal square root clamps the -1e-9 slack a valid DensityMatrix may
  // carry, unlike the strict matrix_sqrt_psd. Eigenvalues at round-off
  // scale are zeroed outright: sqrt amplifies their noise to ~1e-8, which
  // would break the symmetry guarantee.
  EigenDecomposition ea = hermitian_eig(a.matrix());
  for (double& lam : ea.eigenvalues)
    lam = lam < 1e-12 ? 0.0 : std::sqrt(lam);
  ComplexMatrix sa = ea.reconstruct();
  ComplexMatrix inner = sa * b.matrix() * sa;
  inner.hermitize();
  double f = 0.0;
  for (double lam : hermitian_eig(inner).eigenvalues)
    if (lam > 1e-14) f += std::sqrt(lam);
  return f;
}

/// Depolarizing channel (1-p) rho + (p/2^n) I.
inline DensityMatrix depolarize(const DensityMatrix& rho, double p) {
  NoiseSpec{NoiseKind::Depolarizing, p}.validate(rho.n_qubits());
  const int d = rho.dim();
  ComplexMatrix out = rho.matrix();
  for (cplx& v : out.data()) v *= (1.0 - p);
  for (int i = 0; i < d; ++i) out(i, i) += p / d;
  return DensityMatrix::trusted(rho.n_qubits(), std::move(out));
}

/// Preparation-error channel (1-eps) rho + eps rho_random, where
/// rho_random = R†R / Tr[R†R] and R has uniform(-1,1) real and imaginary
/// entries from two independent draws.
inline DensityMatrix exp_state_error(Rng& rng, const DensityMatrix& rho,
                                     double eps) {
  NoiseSpec{NoiseKind::ExpState, eps}.validate(rho.n_qubits());
  const int d = rho.dim();
  ComplexMatrix re = rand_uniform_matrix(rng, d);
  ComplexMatrix im = rand_uniform_matrix(rng, d);
  ComplexMatrix r(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      r(i, j) = cplx(2.0 * re(i, j).real() - 1.0, 2.0 * im(i, j).real() - 1.0);
  ComplexMatrix random_state = r.adjoint() * r;
  const double tr = random_state.trace().real();
  ComplexMatrix out = rho.matrix();
  for (size_t k = 0; k < out.data().size(); ++k)
    out.data()[k] = (1.0 - eps) * out.data()[k] +
                    (eps / tr) * random_state.data()[k];
  return DensityMatrix::trusted(rho.n_qubits(), std::move(out));
}

}  // namespace tqst
