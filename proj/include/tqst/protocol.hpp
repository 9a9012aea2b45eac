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
#include <optional>
#include <utility>
#include <vector>

#include "tqst/errors.hpp"
#include "tqst/qstate.hpp"
#include "tqst/rng.hpp"

namespace tqst {

/// Off-diagonal index pairs (i, j) with i < j, in row-major order:
/// (0,1), (0,2), ..., (0,d-1), (1,2), ...
inline std::vector<std::pair<int, int>> pair_order(int dim) {
  std::vector<std::pair<int, int>> out;
  out.reserve(dim * (dim - 1) / 2);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) out.emplace_back(i, j);
  return out;
}

/// Sparsity index of a nonnegative vector: 0 for uniform, 1 - 1/N for a
/// single spike. Invariant under scaling and permutation.
inline double gini_index(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  if (n < 1) throw ValidationError("gini_index: empty vector");
  double sum = 0.0;
  for (double x : c) {
    if (x < 0.0) throw ValidationError("gini_index: negative entry");
    sum += x;
  }
  if (sum <= 0.0) throw ValidationError("gini_index: all entries zero");
  std::vector<double> sorted = c;
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0;
  for (int k = 1; k <= n; ++k)
    acc += (sorted[k - 1] / sum) * ((n - k + 0.5) / n);
  return 1.0 - 2.0 * acc;
}

/// Outcome of the threshold step: which off-diagonal elements are worth
/// measuring, given the diagonal.
struct ThresholdReport {
  std::vector<double> diag;  // normalized to unit sum
  double gini = 0.0;
  double threshold = 0.0;
  std::vector<std::pair<int, int>> selected_pairs;

  int dim() const { return static_cast<int>(diag.size()); }
  int measurement_count() const {
    return dim() + 2 * static_cast<int>(selected_pairs.size());
  }
};

/// Compute the Gini threshold t = GI(diag)/(2^n - 1) and select the pairs
/// with sqrt(diag_i diag_j) >= t. A manual threshold override replaces the
/// Gini-derived t.
inline ThresholdReport select_measurements(
    std::vector<double> diag,
    std::optional<double> threshold_override = std::nullopt) {
  double sum = 0.0;
  for (double x : diag) {
    if (x < -1e-12) throw ValidationError("select_measurements: negative diagonal");
    sum += x;
  }
  if (sum <= 0.0) throw ValidationError("select_measurements: all-zero diagonal");
  if (std::abs(sum - 1.0) > 1e-6)
    throw ValidationError("select_measurements: diagonal sum differs from 1");
  for (double& x : diag) x = std::max(x, 0.0) / sum;

  ThresholdReport report;
  report.gini = gini_index(diag);
  report.threshold = threshold_override.value_or(
      report.gini / (static_cast<int>(diag.size()) - 1));
  for (auto [i, j] : pair_order(static_cast<int>(diag.size())))
    if (std::sqrt(diag[i] * diag[j]) >= report.threshold)
      report.selected_pairs.emplace_back(i, j);
  report.diag = std::move(diag);
  return report;
}

/// Flat tQST measurement vector of length 4^n: the 2^n diagonal outcomes,
/// then (real, imag) outcome pairs for each i<j in row-major pair order.
/// Measurements skipped by the threshold rule hold the sentinel 2.0, which
/// no valid outcome (a probability) can reach.
struct MeasurementRecord {
  static constexpr double kSkipped = 2.0;

  int n_qubits = 1;
  std::vector<double> values;

  int dim() const { return dim_for_qubits(n_qubits); }

  double diag(int i) const { return values[i]; }
  double pair_real(int k) const { return values[dim() + 2 * k]; }
  double pair_imag(int k) const { return values[dim() + 2 * k + 1]; }
  bool pair_performed(int k) const { return pair_real(k) != kSkipped; }

  int performed_count() const {
    int c = 0;
    for (double v : values) c += (v != kSkipped);
    return c;
  }

  void validate() const {
    const int d = dim();
    if (static_cast<int>(values.size()) != d * d)
      throw ValidationError("measurement record has wrong length");
    for (int i = 0; i < d; ++i)
      if (values[i] == kSkipped)
        throw ValidationError("diagonal measurements cannot be skipped");
    for (size_t k = 0; k < values.size(); ++k)
      if (values[k] != kSkipped && (values[k] < 0.0 || values[k] > 1.0))
        throw ValidationError("performed outcome outside [0, 1]");
  }
};

/// Projective outcomes for the selected measurements, in the infinite-shot
/// limit: the diagonal elements themselves, and for each selected pair (i,j)
///   r = <+|rho|+> = (rho_ii + rho_jj)/2 + Re rho_ij,  |+> = (|i>+|j>)/sqrt2
///   s = <L|rho|L> = (rho_ii + rho_jj)/2 - Im rho_ij,  |L> = (|i>+i|j>)/sqrt2
/// With shots > 0, each performed outcome is replaced by the frequency of
/// `shots` Bernoulli trials at its exact probability.
inline MeasurementRecord simulate_outcomes(const DensityMatrix& rho,
                                           const ThresholdReport& report,
                                           int shots = 0,
                                           Rng* shot_rng = nullptr) {
  const int d = rho.dim();
  if (report.dim() != d)
    throw ValidationError("simulate_outcomes: report/state dimension mismatch");
  if (shots > 0 && shot_rng == nullptr)
    throw ValidationError("simulate_outcomes: shot sampling needs an rng");

  auto sample = [&](double p) {
    p = std::clamp(p, 0.0, 1.0);
    if (shots <= 0) return p;
    int hits = 0;
    for (int t = 0; t < shots; ++t) hits += (shot_rng->uniform() < p);
    return static_cast<double>(hits) / shots;
  };

  MeasurementRecord rec;
  rec.n_qubits = rho.n_qubits();
  rec.values.assign(static_cast<size_t>(d) * d, MeasurementRecord::kSkipped);
  for (int i = 0; i < d; ++i) rec.values[i] = sample(rho.matrix()(i, i).real());

  const auto pairs = pair_order(d);
  size_t next_selected = 0;
  for (size_t k = 0; k < pairs.size(); ++k) {
    if (next_selected >= report.selected_pairs.size() ||
        report.selected_pairs[next_selected] != pairs[k])
      continue;
    ++next_selected;
    const auto [i, j] = pairs[k];
    const double base =
        (rho.matrix()(i, i).real() + rho.matrix()(j, j).real()) / 2.0;
    rec.values[d + 2 * k] = sample(base + rho.matrix()(i, j).real());
    rec.values[d + 2 * k + 1] = sample(base - rho.matrix()(i, j).imag());
  }
  return rec;
}

/// The record reshaped for permutation-equivariant processing: a d x d grid
/// of 2-channel cells. grid[i][i] = (diag_i, 0); grid[i][j] = grid[j][i] =
/// (real outcome, imag outcome) or (2, 2) when skipped.
struct EncodedInput {
  int n_qubits = 1;
  std::vector<double> grid;  // row-major, channels innermost: [i][j][ch]

  int dim() const { return dim_for_qubits(n_qubits); }
  double& at(int i, int j, int ch) {
    return grid[(static_cast<size_t>(i) * dim() + j) * 2 + ch];
  }
  double at(int i, int j, int ch) const {
    return grid[(static_cast<size_t>(i) * dim() + j) * 2 + ch];
  }
};

inline EncodedInput encode_input(const MeasurementRecord& rec) {
  const int d = rec.dim();
  EncodedInput enc;
  enc.n_qubits = rec.n_qubits;
  enc.grid.assign(static_cast<size_t>(d) * d * 2, 0.0);
  for (int i = 0; i < d; ++i) enc.at(i, i, 0) = rec.diag(i);
  const auto pairs = pair_order(d);
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    enc.at(i, j, 0) = enc.at(j, i, 0) = rec.pair_real(static_cast<int>(k));
    enc.at(i, j, 1) = enc.at(j, i, 1) = rec.pair_imag(static_cast<int>(k));
  }
  return enc;
}

inline MeasurementRecord decode_input(const EncodedInput& enc) {
  const int d = enc.dim();
  MeasurementRecord rec;
  rec.n_qubits = enc.n_qubits;
  rec.values.assign(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) rec.values[i] = enc.at(i, i, 0);
  const auto pairs = pair_order(d);
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    rec.values[d + 2 * k] = enc.at(i, j, 0);
    rec.values[d + 2 * k + 1] = enc.at(i, j, 1);
  }
  return rec;
}

/// Apply a noise channel, rerun threshold selection on the noisy diagonal,
/// and measure the noisy state. Returns the noisy record together with the
/// clean state, which remains the learning target.
inline std::pair<MeasurementRecord, DensityMatrix> noisy_pipeline(
    Rng& rng, const DensityMatrix& rho_clean, const NoiseSpec& noise,
    int shots = 0, std::optional<double> threshold_override = std::nullopt) {
  DensityMatrix noisy = [&] {
    switch (noise.kind) {
      case NoiseKind::Depolarizing:
        return depolarize(rho_clean, noise.strength);
      case NoiseKind::ExpState:
        return exp_state_error(rng, rho_clean, noise.strength);
      default:
        return rho_clean;
    }
  }();
  ThresholdReport report =
      select_measurements(noisy.diagonal(), threshold_override);
  MeasurementRecord rec =
      simulate_outcomes(noisy, report, shots, shots > 0 ? &rng : nullptr);
  return {std::move(rec), rho_clean};
}

}  // namespace tqst
