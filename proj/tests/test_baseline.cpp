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

#include <cmath>

#include "gtest/gtest.h"
#include "tqst/baseline.hpp"

using namespace tqst;

namespace {

DensityMatrix bell_phi_minus() {
  ComplexMatrix m(4, 4);
  m(0, 0) = 0.5;
  m(3, 3) = 0.5;
  m(0, 3) = -0.5;
  m(3, 0) = -0.5;
  return DensityMatrix::from_matrix(2, m);
}

DensityMatrix maximally_mixed(int n_qubits) {
  const int d = dim_for_qubits(n_qubits);
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = 1.0 / d;
  return DensityMatrix::from_matrix(n_qubits, m);
}

StateSpec random_spec(Rng& rng, int n_qubits) {
  StateSpec spec;
  spec.n_qubits = n_qubits;
  const int d = dim_for_qubits(n_qubits);
  spec.zeros = static_cast<int>(rng.next_below(d - 1));
  spec.pure = rng.uniform() < 0.5;
  spec.rank =
      spec.pure ? 1 : 2 + static_cast<int>(rng.next_below(d - spec.zeros - 1));
  return spec;
}

}  // namespace

TEST(direct_invert, bell_record_recovers_bell) {
  DensityMatrix bell = bell_phi_minus();
  MeasurementRecord rec =
      simulate_outcomes(bell, select_measurements(bell.diagonal()));
  ASSERT_EQ(rec.performed_count(), 6);
  DensityMatrix out = direct_invert(rec);
  EXPECT_GE(fidelity(out, bell), 0.999);
}

TEST(direct_invert, maximally_mixed_is_exact) {
  DensityMatrix mixed = maximally_mixed(2);
  MeasurementRecord rec =
      simulate_outcomes(mixed, select_measurements(mixed.diagonal()));
  DensityMatrix out = direct_invert(rec);
  EXPECT_LT(max_abs_diff(out.matrix(), mixed.matrix()), 1e-12);
}

TEST(direct_invert, exact_on_full_measurement_records) {
  Rng rng(400);
  for (int t = 0; t < 100; ++t) {
    DensityMatrix rho = generate_state(rng, random_spec(rng, 2));
    MeasurementRecord rec =
        simulate_outcomes(rho, select_measurements(rho.diagonal(), 0.0));
    DensityMatrix out = direct_invert(rec);
    ASSERT_GE(fidelity(out, rho), 0.999);
  }
}

TEST(mle_refine, truth_is_a_fixed_point) {
  DensityMatrix bell = bell_phi_minus();
  MeasurementRecord rec =
      simulate_outcomes(bell, select_measurements(bell.diagonal()));
  EXPECT_NEAR(mle_objective(rec, bell), 0.0, 1e-24);
  DensityMatrix out = mle_refine(rec, bell, 50, 0.5);
  EXPECT_LT(max_abs_diff(out.matrix(), bell.matrix()), 1e-10);
}

TEST(mle_refine, recovers_bell_from_maximally_mixed_start) {
  DensityMatrix bell = bell_phi_minus();
  MeasurementRecord rec =
      simulate_outcomes(bell, select_measurements(bell.diagonal()));
  DensityMatrix out = mle_refine(rec, maximally_mixed(2), 500, 0.5);
  EXPECT_GE(fidelity(out, bell), 0.99);
}

TEST(mle_refine, objective_nonincreasing) {
  Rng rng(401);
  DensityMatrix rho = generate_state(rng, random_spec(rng, 2));
  MeasurementRecord rec =
      simulate_outcomes(rho, select_measurements(rho.diagonal()));
  DensityMatrix state = maximally_mixed(2);
  double prev = mle_objective(rec, state);
  for (int it = 0; it < 20; ++it) {
    state = mle_refine(rec, state, 5, 0.5);
    const double obj = mle_objective(rec, state);
    ASSERT_LE(obj, prev + 1e-15);
    prev = obj;
  }
}

TEST(mle_refine, never_worse_than_direct_inversion_on_average) {
  Rng rng(402);
  double fid_direct = 0.0, fid_mle = 0.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    DensityMatrix rho = generate_state(rng, random_spec(rng, 2));
    MeasurementRecord rec =
        simulate_outcomes(rho, select_measurements(rho.diagonal(), 0.0));
    DensityMatrix direct = direct_invert(rec);
    DensityMatrix refined = mle_refine(rec, direct, 50, 0.25);
    fid_direct += fidelity(direct, rho) / trials;
    fid_mle += fidelity(refined, rho) / trials;
  }
  EXPECT_GE(fid_mle, fid_direct - 1e-6);
}

TEST(mle_refine, dimension_mismatch_rejected) {
  DensityMatrix bell = bell_phi_minus();
  MeasurementRecord rec =
      simulate_outcomes(bell, select_measurements(bell.diagonal()));
  EXPECT_THROW(mle_refine(rec, maximally_mixed(1), 10, 0.5), ValidationError);
}
