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

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"
#include "tqst/protocol.hpp"

using namespace tqst;

namespace {

/// Independent Gini oracle: mean absolute difference form,
/// GI = sum_ij |c_i - c_j| / (2 N ||c||_1).
double gini_by_pairwise_differences(const std::vector<double>& c) {
  double sum = 0.0, diff = 0.0;
  for (double x : c) sum += x;
  for (double a : c)
    for (double b : c) diff += std::abs(a - b);
  return diff / (2.0 * c.size() * sum);
}

DensityMatrix bell_phi_minus() {
  ComplexMatrix m(4, 4);
  m(0, 0) = 0.5;
  m(3, 3) = 0.5;
  m(0, 3) = -0.5;
  m(3, 0) = -0.5;
  return DensityMatrix::from_matrix(2, m);
}

/// Projector expectation oracle: builds |v><v| explicitly and evaluates
/// Tr[P rho] by matrix arithmetic.
double projector_expectation(const DensityMatrix& rho,
                             const std::vector<cplx>& v) {
  const int d = rho.dim();
  double acc = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      acc += (std::conj(v[a]) * rho.matrix()(a, b) * v[b]).real();
  return acc;
}

}  // namespace

TEST(gini, reference_values) {
  EXPECT_NEAR(gini_index({1, 1, 1, 1}), 0.0, 1e-15);
  EXPECT_NEAR(gini_index({0, 0, 0, 1}), 0.75, 1e-15);  // 1 - 1/N
  // Direct summation: sorted [1,3], 1 - 2[(1/4)(0.75) + (3/4)(0.25)] = 1/4.
  EXPECT_NEAR(gini_index({1, 3}), 0.25, 1e-15);
  EXPECT_NEAR(gini_index({1, 3}), gini_by_pairwise_differences({1, 3}), 1e-15);
}

TEST(gini, matches_pairwise_difference_oracle) {
  Rng rng(200);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.next_below(15));
    std::vector<double> c(n);
    for (double& x : c) x = rng.uniform();
    ASSERT_NEAR(gini_index(c), gini_by_pairwise_differences(c), 1e-12);
  }
}

TEST(gini, scale_and_permutation_invariance) {
  Rng rng(201);
  std::vector<double> c = {0.2, 0.05, 0.4, 0.35};
  const double base = gini_index(c);
  for (double alpha : {1e-3, 1.0, 1e3}) {
    std::vector<double> scaled = c;
    for (double& x : scaled) x *= alpha;
    EXPECT_NEAR(gini_index(scaled), base, 1e-12);
  }
  std::vector<double> shuffled = c;
  for (int t = 0; t < 10; ++t) {
    for (size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
    EXPECT_NEAR(gini_index(shuffled), base, 1e-15);
  }
}

TEST(gini, bounds_and_errors) {
  Rng rng(202);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.next_below(16));
    std::vector<double> c(n);
    for (double& x : c) x = rng.uniform();
    const double g = gini_index(c);
    ASSERT_GE(g, -1e-12);
    ASSERT_LE(g, 1.0 - 1.0 / n + 1e-12);
  }
  EXPECT_THROW(gini_index({0, 0, 0}), ValidationError);
  EXPECT_THROW(gini_index({0.5, -0.1}), ValidationError);
}

TEST(select_measurements, bell_state) {
  ThresholdReport report = select_measurements({0.5, 0.0, 0.0, 0.5});
  EXPECT_NEAR(report.gini, 0.5, 1e-15);
  EXPECT_NEAR(report.threshold, 1.0 / 6.0, 1e-15);
  ASSERT_EQ(report.selected_pairs.size(), 1u);
  EXPECT_EQ(report.selected_pairs[0], (std::pair<int, int>{0, 3}));
  EXPECT_EQ(report.measurement_count(), 6);
}

TEST(select_measurements, uniform_diagonal_selects_everything) {
  ThresholdReport report = select_measurements({0.25, 0.25, 0.25, 0.25});
  EXPECT_NEAR(report.gini, 0.0, 1e-15);
  EXPECT_NEAR(report.threshold, 0.0, 1e-15);
  EXPECT_EQ(report.selected_pairs.size(), 6u);
  EXPECT_EQ(report.measurement_count(), 16);
}

TEST(select_measurements, single_spike_selects_nothing) {
  ThresholdReport report = select_measurements({1.0, 0.0, 0.0, 0.0});
  EXPECT_NEAR(report.threshold, 0.25, 1e-15);
  EXPECT_TRUE(report.selected_pairs.empty());
  EXPECT_EQ(report.measurement_count(), 4);
}

TEST(select_measurements, validation) {
  EXPECT_THROW(select_measurements({0.0, 0.0}), ValidationError);
  EXPECT_THROW(select_measurements({0.7, 0.7}), ValidationError);
  EXPECT_NO_THROW(select_measurements({0.7, 0.3 + 1e-7}));
}

TEST(select_measurements, permutation_covariance) {
  Rng rng(203);
  std::vector<double> diag = {0.4, 0.3, 0.2, 0.1};
  ThresholdReport base = select_measurements(diag);
  std::vector<int> perm = {2, 0, 3, 1};  // new index -> old index
  std::vector<double> permuted(4);
  for (int i = 0; i < 4; ++i) permuted[i] = diag[perm[i]];
  ThresholdReport moved = select_measurements(permuted);
  EXPECT_NEAR(moved.gini, base.gini, 1e-15);
  // Selection, viewed as a set of diagonal-value pairs, is unchanged.
  auto value_pairs = [&](const ThresholdReport& r) {
    std::vector<std::pair<double, double>> out;
    for (auto [i, j] : r.selected_pairs) {
      double a = r.diag[i], b = r.diag[j];
      out.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto vb = value_pairs(base), vm = value_pairs(moved);
  ASSERT_EQ(vb.size(), vm.size());
  for (size_t k = 0; k < vb.size(); ++k) {
    ASSERT_NEAR(vb[k].first, vm[k].first, 1e-12);
    ASSERT_NEAR(vb[k].second, vm[k].second, 1e-12);
  }
}

TEST(select_measurements, count_monotone_in_threshold) {
  std::vector<double> diag = {0.4, 0.3, 0.2, 0.1};
  int prev = 1 << 30;
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    ThresholdReport r = select_measurements(diag, t);
    EXPECT_LE(r.measurement_count(), prev);
    prev = r.measurement_count();
  }
}

TEST(simulate_outcomes, bell_pair_values) {
  DensityMatrix bell = bell_phi_minus();
  ThresholdReport report = select_measurements(bell.diagonal());
  MeasurementRecord rec = simulate_outcomes(bell, report);
  rec.validate();
  EXPECT_EQ(rec.performed_count(), 6);
  // Pair (0,3) is index 2 in row-major pair order.
  EXPECT_NEAR(rec.pair_real(2), 0.0, 1e-15);
  EXPECT_NEAR(rec.pair_imag(2), 0.5, 1e-15);
  EXPECT_EQ(rec.pair_real(0), MeasurementRecord::kSkipped);

  // Oracle: the same outcomes as projector expectations.
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(projector_expectation(bell, {s, 0, 0, s}), rec.pair_real(2),
              1e-15);
  EXPECT_NEAR(projector_expectation(bell, {s, 0, 0, cplx(0, 1) * s}),
              rec.pair_imag(2), 1e-15);
}

TEST(simulate_outcomes, zero_offdiagonal_cases) {
  // Maximally mixed single qubit: r = s = 0.5.
  DensityMatrix mixed =
      DensityMatrix::from_matrix(1, ComplexMatrix::diag({0.5, 0.5}));
  MeasurementRecord rec =
      simulate_outcomes(mixed, select_measurements(mixed.diagonal()));
  EXPECT_NEAR(rec.pair_real(0), 0.5, 1e-15);
  EXPECT_NEAR(rec.pair_imag(0), 0.5, 1e-15);

  // |0><0| with the threshold forced to zero: r = s = (1+0)/2 = 0.5.
  DensityMatrix ground =
      DensityMatrix::from_matrix(1, ComplexMatrix::diag({1.0, 0.0}));
  MeasurementRecord forced =
      simulate_outcomes(ground, select_measurements(ground.diagonal(), 0.0));
  EXPECT_NEAR(forced.pair_real(0), 0.5, 1e-15);
  EXPECT_NEAR(forced.pair_imag(0), 0.5, 1e-15);
}

TEST(simulate_outcomes, outcomes_within_unit_interval) {
  Rng rng(204);
  for (int t = 0; t < 10000; ++t) {
    StateSpec spec;
    spec.n_qubits = 1 + static_cast<int>(rng.next_below(3));
    const int d = dim_for_qubits(spec.n_qubits);
    spec.zeros = static_cast<int>(rng.next_below(d - 1));
    spec.pure = rng.uniform() < 0.5;
    spec.rank =
        spec.pure ? 1 : 2 + static_cast<int>(rng.next_below(d - spec.zeros - 1));
    DensityMatrix rho = generate_state(rng, spec);
    MeasurementRecord rec =
        simulate_outcomes(rho, select_measurements(rho.diagonal(), 0.0));
    for (double v : rec.values) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(simulate_outcomes, dimension_mismatch_rejected) {
  DensityMatrix mixed =
      DensityMatrix::from_matrix(1, ComplexMatrix::diag({0.5, 0.5}));
  ThresholdReport wrong = select_measurements({0.25, 0.25, 0.25, 0.25});
  EXPECT_THROW(simulate_outcomes(mixed, wrong), ValidationError);
}

TEST(simulate_outcomes, shot_noise_converges) {
  DensityMatrix bell = bell_phi_minus();
  ThresholdReport report = select_measurements(bell.diagonal());
  Rng rng(205);
  MeasurementRecord rec = simulate_outcomes(bell, report, 20000, &rng);
  rec.validate();
  EXPECT_NEAR(rec.diag(0), 0.5, 0.02);
  EXPECT_NEAR(rec.pair_imag(2), 0.5, 0.02);
  EXPECT_THROW(simulate_outcomes(bell, report, 100, nullptr), ValidationError);
}

TEST(encoding, grid_layout_and_roundtrip) {
  DensityMatrix bell = bell_phi_minus();
  MeasurementRecord rec =
      simulate_outcomes(bell, select_measurements(bell.diagonal()));
  EncodedInput enc = encode_input(rec);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(enc.at(i, i, 0), rec.diag(i));
    EXPECT_EQ(enc.at(i, i, 1), 0.0);
  }
  EXPECT_EQ(enc.at(0, 3, 0), 0.0);
  EXPECT_EQ(enc.at(3, 0, 0), 0.0);
  EXPECT_EQ(enc.at(0, 3, 1), 0.5);
  EXPECT_EQ(enc.at(3, 0, 1), 0.5);
  EXPECT_EQ(enc.at(0, 1, 0), MeasurementRecord::kSkipped);
  EXPECT_EQ(enc.at(0, 1, 1), MeasurementRecord::kSkipped);

  MeasurementRecord back = decode_input(enc);
  EXPECT_EQ(back.n_qubits, rec.n_qubits);
  EXPECT_EQ(back.values, rec.values);
}

TEST(encoding, roundtrip_on_random_records) {
  Rng rng(206);
  for (int t = 0; t < 200; ++t) {
    StateSpec spec;
    spec.n_qubits = 1 + static_cast<int>(rng.next_below(4));
    spec.zeros = 0;
    spec.pure = true;
    spec.rank = 1;
    DensityMatrix rho = generate_state(rng, spec);
    MeasurementRecord rec =
        simulate_outcomes(rho, select_measurements(rho.diagonal()));
    ASSERT_EQ(decode_input(encode_input(rec)).values, rec.values);
  }
}

TEST(noisy_pipeline, none_matches_plain_protocol) {
  Rng rng(207);
  DensityMatrix bell = bell_phi_minus();
  auto [rec, target] = noisy_pipeline(rng, bell, NoiseSpec{});
  MeasurementRecord plain =
      simulate_outcomes(bell, select_measurements(bell.diagonal()));
  EXPECT_EQ(rec.values, plain.values);
  EXPECT_LT(max_abs_diff(target.matrix(), bell.matrix()), 1e-15);
}

TEST(noisy_pipeline, full_depolarizing_measures_everything) {
  Rng rng(208);
  auto [rec, target] = noisy_pipeline(
      rng, bell_phi_minus(), NoiseSpec{NoiseKind::Depolarizing, 1.0});
  EXPECT_EQ(rec.performed_count(), 16);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(rec.diag(i), 0.25, 1e-15);
  // The target stays the clean state.
  EXPECT_NEAR(target.matrix()(0, 3).real(), -0.5, 1e-15);
}

TEST(noisy_pipeline, selection_recomputed_on_noisy_diagonal) {
  Rng rng(209);
  auto [rec, target] = noisy_pipeline(
      rng, bell_phi_minus(), NoiseSpec{NoiseKind::Depolarizing, 0.05});
  EXPECT_GE(rec.performed_count(), 6);
  rec.validate();
}
