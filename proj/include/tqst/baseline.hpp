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

#include <cmath>
#include <vector>

#include "tqst/errors.hpp"
#include "tqst/protocol.hpp"
#include "tqst/reconstruct.hpp"

namespace tqst {

/// Classical comparator, step one: undo the outcome formulas element by
/// element. Skipped off-diagonals stay zero (the threshold rule skips them
/// precisely because they must be small), then positivity is enforced.
inline DensityMatrix direct_invert(const MeasurementRecord& rec) {
  rec.validate();
  const int d = rec.dim();
  RawReconstruction raw{rec.n_qubits,
                        std::vector<double>(static_cast<size_t>(d) * d, 0.0)};
  for (int i = 0; i < d; ++i) raw.params[i] = rec.diag(i);
  const auto pairs = pair_order(d);
  for (size_t k = 0; k < pairs.size(); ++k) {
    if (!rec.pair_performed(static_cast<int>(k))) continue;
    const auto [i, j] = pairs[k];
    const double base = (rec.diag(i) + rec.diag(j)) / 2.0;
    raw.params[d + 2 * k] = rec.pair_real(static_cast<int>(k)) - base;
    raw.params[d + 2 * k + 1] = base - rec.pair_imag(static_cast<int>(k));
  }
  return project_psd(vector_to_hermitian(raw));
}

/// Least-squares objective over the performed measurements: each performed
/// outcome f_k is the expectation of a rank-one projector P_k.
inline double mle_objective(const MeasurementRecord& rec,
                            const DensityMatrix& rho) {
  const int d = rec.dim();
  double obj = 0.0;
  for (int i = 0; i < d; ++i) {
    const double e = rho.matrix()(i, i).real() - rec.diag(i);
    obj += e * e;
  }
  const auto pairs = pair_order(d);
  for (size_t k = 0; k < pairs.size(); ++k) {
    if (!rec.pair_performed(static_cast<int>(k))) continue;
    const auto [i, j] = pairs[k];
    const double base =
        (rho.matrix()(i, i).real() + rho.matrix()(j, j).real()) / 2.0;
    const double er =
        base + rho.matrix()(i, j).real() - rec.pair_real(static_cast<int>(k));
    const double es =
        base - rho.matrix()(i, j).imag() - rec.pair_imag(static_cast<int>(k));
    obj += er * er + es * es;
  }
  return obj;
}

/// Projected-gradient refinement of the least-squares objective. The step
/// halves whenever a move would increase the objective, so the objective
/// sequence is nonincreasing by construction.
inline DensityMatrix mle_refine(const MeasurementRecord& rec,
                                const DensityMatrix& init, int iters = 500,
                                double step = 0.5) {
  rec.validate();
  if (init.dim() != rec.dim())
    throw ValidationError("mle_refine: record/init dimension mismatch");
  const int d = rec.dim();
  const auto pairs = pair_order(d);

  DensityMatrix rho = init;
  double obj = mle_objective(rec, rho);
  if (!std::isfinite(obj)) throw NumericalError("mle_refine: objective not finite");

  for (int it = 0; it < iters && step > 1e-14; ++it) {
    // Gradient of the objective w.r.t. rho: sum of 2 e_k P_k.
    ComplexMatrix grad(d, d);
    for (int i = 0; i < d; ++i)
      grad(i, i) = 2.0 * (rho.matrix()(i, i).real() - rec.diag(i));
    for (size_t k = 0; k < pairs.size(); ++k) {
      if (!rec.pair_performed(static_cast<int>(k))) continue;
      const auto [i, j] = pairs[k];
      const double base =
          (rho.matrix()(i, i).real() + rho.matrix()(j, j).real()) / 2.0;
      const double er =
          base + rho.matrix()(i, j).real() - rec.pair_real(static_cast<int>(k));
      const double es =
          base - rho.matrix()(i, j).imag() - rec.pair_imag(static_cast<int>(k));
      // P+ has entries 1/2 at (ii), (ij), (ji), (jj); PL has 1/2 at (ii),
      // (jj) and -i/2, +i/2 at (ij), (ji).
      grad(i, i) += er + es;
      grad(j, j) += er + es;
      grad(i, j) += cplx(er, -es);
      grad(j, i) += cplx(er, es);
    }

    while (step > 1e-14) {
      ComplexMatrix cand = rho.matrix();
      for (size_t m = 0; m < cand.data().size(); ++m)
        cand.data()[m] -= step * grad.data()[m];
      cand.hermitize();
      const double tr = cand.trace().real();
      if (std::abs(tr) < 1e-9) {
        step /= 2.0;
        continue;
      }
      for (cplx& v : cand.data()) v /= tr;
      DensityMatrix next = project_psd(cand);
      const double next_obj = mle_objective(rec, next);
      if (!std::isfinite(next_obj))
        throw NumericalError("mle_refine: objective diverged");
      if (next_obj <= obj) {
        rho = std::move(next);
        obj = next_obj;
        break;
      }
      step /= 2.0;
    }
  }
  return rho;
}

}  // namespace tqst
