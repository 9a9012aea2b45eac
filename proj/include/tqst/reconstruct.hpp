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
#include <vector>

#include "tqst/eig.hpp"
#include "tqst/errors.hpp"
#include "tqst/protocol.hpp"
#include "tqst/qstate.hpp"

namespace tqst {

/// A tomography model's raw output: 4^n reals laid out as the diagonal
/// followed by interleaved (Re, Im) off-diagonal parts in pair order.
struct RawReconstruction {
  int n_qubits = 1;
  std::vector<double> params;
};

/// The inverse map: a density matrix flattened into the output layout.
inline std::vector<double> state_to_params(const DensityMatrix& rho) {
  const int d = rho.dim();
  std::vector<double> out(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i) out[i] = rho.matrix()(i, i).real();
  const auto pairs = pair_order(d);
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    out[d + 2 * k] = rho.matrix()(i, j).real();
    out[d + 2 * k + 1] = rho.matrix()(i, j).imag();
  }
  return out;
}

/// Build the Hermitian, trace-one matrix mu from a raw parameter vector.
/// Normalizes by division, preserving the ratios the model produced.
inline ComplexMatrix vector_to_hermitian(const RawReconstruction& raw) {
  const int d = dim_for_qubits(raw.n_qubits);
  if (static_cast<int>(raw.params.size()) != d * d)
    throw ValidationError("vector_to_hermitian: wrong parameter count");
  double tr = 0.0;
  for (int i = 0; i < d; ++i) tr += raw.params[i];
  if (std::abs(tr) < 1e-9)
    throw NumericalError("vector_to_hermitian: degenerate trace");
  ComplexMatrix mu(d, d);
  for (int i = 0; i < d; ++i) mu(i, i) = raw.params[i] / tr;
  const auto pairs = pair_order(d);
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    mu(i, j) = cplx(raw.params[d + 2 * k], raw.params[d + 2 * k + 1]) / tr;
    mu(j, i) = std::conj(mu(i, j));
  }
  return mu;
}

/// One negative-eigenvalue cleanup: per round, zero every negative value and
/// spread the zeroed total equally over the remaining nonzero values; repeat
/// until no negatives are left. Preserves the sum.
inline void redistribute_negative_eigenvalues(std::vector<double>& lam) {
  for (size_t round = 0; round <= lam.size(); ++round) {
    double deficit = 0.0;
    int survivors = 0;
    for (double v : lam) {
      if (v < 0.0) deficit += v;
      else if (v > 0.0) ++survivors;
    }
    if (deficit == 0.0) return;
    if (survivors == 0)
      throw NumericalError("eigenvalue redistribution: no positive value left");
    for (double& v : lam) {
      if (v < 0.0) v = 0.0;
      else if (v > 0.0) v += deficit / survivors;
    }
  }
}

/// Force positivity while keeping trace and eigenvectors: redistribute the
/// negative eigenvalues and rebuild in the unchanged eigenbasis.
inline DensityMatrix project_psd(const ComplexMatrix& mu) {
  if (!mu.square() || mu.max_hermiticity_defect() > 1e-8)
    throw ValidationError("project_psd: input must be Hermitian");
  if (std::abs(mu.trace() - cplx(1.0)) > 1e-6)
    throw ValidationError("project_psd: input must have trace 1");
  int n_qubits = 0;
  while ((1 << n_qubits) < mu.rows()) ++n_qubits;
  if ((1 << n_qubits) != mu.rows())
    throw ValidationError("project_psd: dimension is not a power of two");

  EigenDecomposition ed = hermitian_eig(mu);
  redistribute_negative_eigenvalues(ed.eigenvalues);
  ComplexMatrix out = ed.reconstruct();
  out.hermitize();
  // Exact unit trace despite eigensolver round-off.
  const double tr = out.trace().real();
  for (cplx& v : out.data()) v /= tr;
  return DensityMatrix::trusted(n_qubits, std::move(out));
}

/// Clip a purity estimate to the physical range [1/2^n, 1].
inline double clamp_purity(double raw, int n_qubits) {
  return std::clamp(raw, 1.0 / dim_for_qubits(n_qubits), 1.0);
}

}  // namespace tqst
