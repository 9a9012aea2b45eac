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
#include <numeric>
#include <vector>

#include "tqst/complex_matrix.hpp"
#include "tqst/errors.hpp"

namespace tqst {

/// Spectral decomposition of a Hermitian matrix: eigenvalues ascending,
/// eigenvectors as the columns of a unitary matrix.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;

  ComplexMatrix reconstruct() const {
    int n = eigenvectors.rows();
    ComplexMatrix out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int k = 0; k < n; ++k)
          s += eigenvectors(i, k) * eigenvalues[k] *
               std::conj(eigenvectors(j, k));
        out(i, j) = s;
      }
    return out;
  }
};

/// Diagonalize a Hermitian matrix by cyclic Jacobi rotations.
///
/// Intended for the small dense matrices of this library (dim <= 2^8);
/// converges to near machine precision in a handful of sweeps.
inline EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
  if (!m.square()) throw ValidationError("hermitian_eig: matrix not square");
  if (m.max_hermiticity_defect() > 1e-8)
    throw ValidationError("hermitian_eig: matrix not Hermitian");
  const int n = m.rows();

  ComplexMatrix a = m;
  a.hermitize();  // remove sub-tolerance asymmetry so diagonals stay real
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(1.0, a.frobenius_norm());
  const double tol = 1e-15 * scale;
  const int max_sweeps = 60;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= tol) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300) continue;
        const cplx phase = a(p, q) / mag;  // a_pq = mag * phase
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Plane unitary U with U(p,p)=c, U(p,q)=s, U(q,p)=-s*conj(phase),
        // U(q,q)=c*conj(phase); annihilates a_pq under a <- U† a U.
        const cplx sph_c = s * std::conj(phase);
        const cplx cph_c = c * std::conj(phase);
        // Column update: a <- a U, v <- v U
        for (int k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sph_c * akq;
          a(k, q) = s * akp + cph_c * akq;
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sph_c * vkq;
          v(k, q) = s * vkp + cph_c * vkq;
        }
        // Row update: a <- U† a
        const cplx sph = s * phase;
        for (int k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sph * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (int k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (int i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-1e-10, 0) are treated as round-off and clamped to zero.
inline ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m) {
  EigenDecomposition ed = hermitian_eig(m);
  for (double& lam : ed.eigenvalues) {
    if (lam < -1e-10)
      throw ValidationError("matrix_sqrt_psd: negative eigenvalue " +
                            std::to_string(lam));
    lam = std::sqrt(std::max(lam, 0.0));
  }
  ComplexMatrix out = ed.reconstruct();
  out.hermitize();
  return out;
}

}  // namespace tqst
