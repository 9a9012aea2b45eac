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
#include "tqst/reconstruct.hpp"

using namespace tqst;

namespace {

StateSpec random_spec(Rng& rng, int max_qubits = 3) {
  StateSpec spec;
  spec.n_qubits = 1 + static_cast<int>(rng.next_below(max_qubits));
  const int d = dim_for_qubits(spec.n_qubits);
  spec.zeros = static_cast<int>(rng.next_below(d - 1));
  spec.pure = rng.uniform() < 0.5;
  spec.rank =
      spec.pure ? 1 : 2 + static_cast<int>(rng.next_below(d - spec.zeros - 1));
  return spec;
}

}  // namespace

TEST(vector_to_hermitian, known_layouts) {
  // Basis state |0><0| for two qubits.
  RawReconstruction ground{2, std::vector<double>(16, 0.0)};
  ground.params[0] = 1.0;
  ComplexMatrix mu = vector_to_hermitian(ground);
  EXPECT_NEAR(mu(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(mu.frobenius_norm(), 1.0, 1e-15);

  // Bell phi-minus: diag [.5,0,0,.5], pair (0,3) has re = -0.5 (pair index
  // 2, so slots 4 + 2*2 and 4 + 2*2 + 1).
  RawReconstruction bell{2, std::vector<double>(16, 0.0)};
  bell.params[0] = 0.5;
  bell.params[3] = 0.5;
  bell.params[4 + 4] = -0.5;
  ComplexMatrix mu_bell = vector_to_hermitian(bell);
  EXPECT_NEAR(mu_bell(0, 3).real(), -0.5, 1e-15);
  EXPECT_NEAR(mu_bell(3, 0).real(), -0.5, 1e-15);
  EXPECT_NEAR(mu_bell(0, 3).imag(), 0.0, 1e-15);
  EXPECT_NEAR(mu_bell(1, 1).real(), 0.0, 1e-15);

  // Uniform diagonal: maximally mixed.
  RawReconstruction mixed{2, std::vector<double>(16, 0.0)};
  for (int i = 0; i < 4; ++i) mixed.params[i] = 0.25;
  EXPECT_LT(max_abs_diff(vector_to_hermitian(mixed),
                         cplx(0.25) * ComplexMatrix::identity(4)),
            1e-15);
}

TEST(vector_to_hermitian, normalizes_by_trace) {
  RawReconstruction raw{1, {3.0, 1.0, 0.5, -0.25}};
  ComplexMatrix mu = vector_to_hermitian(raw);
  EXPECT_NEAR(mu.trace().real(), 1.0, 1e-15);
  EXPECT_NEAR(mu(0, 0).real(), 0.75, 1e-15);
  EXPECT_NEAR(mu(0, 1).real(), 0.125, 1e-15);
  EXPECT_NEAR(mu(0, 1).imag(), -0.0625, 1e-15);
}

TEST(vector_to_hermitian, degenerate_trace) {
  RawReconstruction raw{1, {1e-10, -1e-10, 0.5, 0.5}};
  EXPECT_THROW(vector_to_hermitian(raw), NumericalError);
}

TEST(redistribution, single_round_by_hand) {
  std::vector<double> lam = {0.6, 0.5, -0.1};
  redistribute_negative_eigenvalues(lam);
  EXPECT_NEAR(lam[0], 0.55, 1e-15);
  EXPECT_NEAR(lam[1], 0.45, 1e-15);
  EXPECT_EQ(lam[2], 0.0);
}

TEST(redistribution, deficit_absorbed_by_single_survivor) {
  std::vector<double> lam = {1.2, -0.1, -0.1};
  redistribute_negative_eigenvalues(lam);
  EXPECT_NEAR(lam[0], 1.0, 1e-15);
  EXPECT_EQ(lam[1], 0.0);
  EXPECT_EQ(lam[2], 0.0);
}

TEST(redistribution, cascades_until_nonnegative) {
  // First round pushes the small positive value negative; a second round
  // must clean it up. Sum stays 1.
  std::vector<double> lam = {1.39, 0.01, -0.4};
  redistribute_negative_eigenvalues(lam);
  double sum = 0.0;
  for (double v : lam) {
    EXPECT_GE(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(lam[1], 0.0);
  EXPECT_NEAR(lam[0], 1.0, 1e-12);
}

TEST(project_psd, psd_input_unchanged) {
  ComplexMatrix rho(2, 2);
  rho(0, 0) = 0.75;
  rho(1, 1) = 0.25;
  rho(0, 1) = cplx(0.1, 0.2);
  rho(1, 0) = std::conj(rho(0, 1));
  DensityMatrix out = project_psd(rho);
  EXPECT_LT(max_abs_diff(out.matrix(), rho), 1e-12);
}

TEST(project_psd, fixes_diagonal_spectrum) {
  DensityMatrix out =
      project_psd(ComplexMatrix::diag({0.6, 0.5, -0.1, 0.0}));
  EigenDecomposition ed = hermitian_eig(out.matrix());
  EXPECT_NEAR(ed.eigenvalues[3], 0.55, 1e-12);
  EXPECT_NEAR(ed.eigenvalues[2], 0.45, 1e-12);
  EXPECT_NEAR(ed.eigenvalues[1], 0.0, 1e-12);
  EXPECT_NEAR(ed.eigenvalues[0], 0.0, 1e-12);
}

TEST(project_psd, idempotent_trace_preserving_and_commuting) {
  Rng rng(300);
  for (int t = 0; t < 200; ++t) {
    // Hermitian trace-one but generally not PSD.
    const int n_qubits = 1 + static_cast<int>(rng.next_below(2));
    const int d = dim_for_qubits(n_qubits);
    ComplexMatrix mu(d, d);
    for (int i = 0; i < d; ++i) {
      mu(i, i) = rng.uniform(-0.5, 1.5);
      for (int j = i + 1; j < d; ++j) {
        mu(i, j) = cplx(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
        mu(j, i) = std::conj(mu(i, j));
      }
    }
    double tr = mu.trace().real();
    if (std::abs(tr) < 0.2) continue;
    for (cplx& v : mu.data()) v /= tr;

    DensityMatrix once = project_psd(mu);
    ASSERT_NEAR(once.matrix().trace().real(), 1.0, 1e-12);
    DensityMatrix twice = project_psd(once.matrix());
    ASSERT_LT(max_abs_diff(once.matrix(), twice.matrix()), 1e-12);

    // Shares an eigenbasis with the input: commutator vanishes.
    ComplexMatrix comm = once.matrix() * mu - mu * once.matrix();
    ASSERT_LT(comm.frobenius_norm(), 1e-9);

    EigenDecomposition ed = hermitian_eig(once.matrix());
    ASSERT_GE(ed.eigenvalues.front(), -1e-12);
  }
}

TEST(project_psd, validation) {
  ComplexMatrix not_herm(2, 2);
  not_herm(0, 0) = 0.5;
  not_herm(1, 1) = 0.5;
  not_herm(0, 1) = 0.3;
  EXPECT_THROW(project_psd(not_herm), ValidationError);
  EXPECT_THROW(project_psd(ComplexMatrix::diag({0.5, 0.4})), ValidationError);
  EXPECT_THROW(project_psd(ComplexMatrix::diag({0.5, 0.3, 0.2})),
               ValidationError);
}

TEST(clamp_purity, endpoints_and_passthrough) {
  EXPECT_DOUBLE_EQ(clamp_purity(1.03, 2), 1.0);
  EXPECT_DOUBLE_EQ(clamp_purity(0.2, 2), 0.25);
  EXPECT_DOUBLE_EQ(clamp_purity(0.7, 2), 0.7);
}

TEST(layout, state_params_roundtrip) {
  Rng rng(301);
  for (int t = 0; t < 100; ++t) {
    DensityMatrix rho = generate_state(rng, random_spec(rng));
    RawReconstruction raw{rho.n_qubits(), state_to_params(rho)};
    ComplexMatrix mu = vector_to_hermitian(raw);
    ASSERT_LT(max_abs_diff(mu, rho.matrix()), 1e-12);
  }
}

TEST(pipeline, decode_then_project_is_always_physical) {
  Rng rng(302);
  for (int t = 0; t < 1000; ++t) {
    const int n_qubits = 1 + static_cast<int>(rng.next_below(3));
    const int d = dim_for_qubits(n_qubits);
    RawReconstruction raw{n_qubits, std::vector<double>(d * d)};
    for (double& v : raw.params) v = rng.uniform(-1.0, 1.0);
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += raw.params[i];
    if (std::abs(tr) < 1e-3) continue;
    DensityMatrix rho = project_psd(vector_to_hermitian(raw));
    ASSERT_NEAR(rho.matrix().trace().real(), 1.0, 1e-10);
    ASSERT_GE(hermitian_eig(rho.matrix()).eigenvalues.front(), -1e-9);
    ASSERT_LE(rho.matrix().max_hermiticity_defect(), 1e-10);
  }
}
