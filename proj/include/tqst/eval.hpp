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
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqst/baseline.hpp"
#include "tqst/datagen.hpp"
#include "tqst/nn/model.hpp"
#include "tqst/reconstruct.hpp"

namespace tqst {

struct EvalRow {
  double metric = 0.0;  // fidelity (tomography) or squared error (purity)
  int zeros = 0;
  int rank = 1;
  bool pure = false;
  double noise_strength = 0.0;
  int measurements = 0;
};

struct StratumStats {
  std::string bucket;
  double mean = 0.0;
  double stddev = 0.0;
  size_t count = 0;
};

/// Per-sample rows plus the aggregates of the evaluation protocol: mean
/// fidelity with spread for tomography, MSE and R^2 against the observed
/// values, and zero-count stratification.
struct EvalReport {
  std::string task;
  std::string model;
  size_t n_test = 0;
  double mean_fidelity = 0.0;
  double std_fidelity = 0.0;
  double mse = 0.0;
  double r2 = 0.0;
  std::vector<StratumStats> strata;
  std::vector<EvalRow> rows;

  nlohmann::json to_json(bool include_rows = true) const {
    nlohmann::json strata_json = nlohmann::json::array();
    for (const StratumStats& s : strata)
      strata_json.push_back({{"bucket", s.bucket},
                             {"mean", s.mean},
                             {"std", s.stddev},
                             {"count", s.count}});
    nlohmann::json j{{"task", task},       {"model", model},
                     {"n_test", n_test},   {"mean_fidelity", mean_fidelity},
                     {"std_fidelity", std_fidelity},
                     {"mse", mse},         {"r2", r2},
                     {"strata", strata_json}};
    if (include_rows) {
      nlohmann::json rows_json = nlohmann::json::array();
      for (const EvalRow& r : rows)
        rows_json.push_back({{"metric", r.metric},
                             {"zeros", r.zeros},
                             {"rank", r.rank},
                             {"pure", r.pure},
                             {"noise_strength", r.noise_strength},
                             {"measurements", r.measurements}});
      j["rows"] = rows_json;
    }
    return j;
  }

  void write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write csv: " + path);
    out.precision(17);
    out << "metric,zeros,rank,pure,noise_strength,measurements\n";
    for (const EvalRow& r : rows)
      out << r.metric << "," << r.zeros << "," << r.rank << ","
          << (r.pure ? 1 : 0) << "," << r.noise_strength << ","
          << r.measurements << "\n";
  }
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / v.size())};
}

/// Zero-count buckets: three equal ranges over 0..2^n-2 (for two qubits
/// this is one bucket per zero count).
inline std::vector<StratumStats> stratify(const std::vector<EvalRow>& rows,
                                          int n_qubits) {
  const int z_values = dim_for_qubits(n_qubits) - 1;  // zeros in [0, 2^n-2]
  const int width = std::max(1, z_values / 3);
  std::map<int, std::vector<double>> buckets;
  for (const EvalRow& r : rows) buckets[r.zeros / width].push_back(r.metric);
  std::vector<StratumStats> out;
  for (auto& [b, vals] : buckets) {
    auto [mean, sd] = mean_std(vals);
    const int lo = b * width;
    const int hi = std::min(z_values - 1, lo + width - 1);
    StratumStats s;
    s.bucket = lo == hi ? "z=" + std::to_string(lo)
                        : "z=" + std::to_string(lo) + "-" + std::to_string(hi);
    s.mean = mean;
    s.stddev = sd;
    s.count = vals.size();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

/// A reconstruction pipeline under test: record values in, density matrix
/// out. Wraps a trained model (decode + PSD projection) or a baseline.
using Reconstructor = std::function<DensityMatrix(const std::vector<double>&)>;

inline Reconstructor model_reconstructor(nn::Model& model) {
  if (model.config().task != nn::Task::Tomography)
    throw ValidationError("model_reconstructor needs a tomography model");
  return [&model](const std::vector<double>& record) {
    RawReconstruction raw{model.config().n_qubits, model.predict(record)};
    return project_psd(vector_to_hermitian(raw));
  };
}

inline Reconstructor direct_inversion_reconstructor(int n_qubits) {
  return [n_qubits](const std::vector<double>& record) {
    return direct_invert(MeasurementRecord{n_qubits, record});
  };
}

inline Reconstructor mle_reconstructor(int n_qubits, int iters, double step) {
  return [n_qubits, iters, step](const std::vector<double>& record) {
    MeasurementRecord rec{n_qubits, record};
    return mle_refine(rec, direct_invert(rec), iters, step);
  };
}

/// Fidelity of each reconstructed test state against its clean target.
inline EvalReport evaluate_tomography(const Reconstructor& reconstruct,
                                      const std::string& model_name,
                                      const Dataset& ds,
                                      const std::vector<size_t>& test_idx) {
  EvalReport report;
  report.task = "tomography";
  report.model = model_name;
  report.n_test = test_idx.size();

  std::vector<double> fids;
  double param_sqerr = 0.0, param_var = 0.0;
  // Pooled parameter-vector statistics for the secondary MSE/R2 numbers.
  double param_mean = 0.0;
  size_t param_count = 0;
  for (size_t idx : test_idx) {
    for (double t : ds.samples[idx].target_params) {
      param_mean += t;
      ++param_count;
    }
  }
  if (param_count) param_mean /= param_count;

  for (size_t idx : test_idx) {
    const Sample& s = ds.samples[idx];
    DensityMatrix predicted = reconstruct(s.record);
    RawReconstruction target_raw{ds.spec.n_qubits, s.target_params};
    DensityMatrix target = project_psd(vector_to_hermitian(target_raw));
    const double f = fidelity(target, predicted);
    fids.push_back(f);
    const std::vector<double> pred_params = state_to_params(predicted);
    for (size_t k = 0; k < pred_params.size(); ++k) {
      const double e = pred_params[k] - s.target_params[k];
      param_sqerr += e * e;
      param_var += (s.target_params[k] - param_mean) *
                   (s.target_params[k] - param_mean);
    }
    report.rows.push_back({f, s.meta.zeros, s.meta.rank, s.meta.pure,
                           s.meta.noise_strength, s.meta.measurements});
  }
  auto [mean, sd] = detail::mean_std(fids);
  report.mean_fidelity = mean;
  report.std_fidelity = sd;
  report.mse = param_count ? param_sqerr / param_count : 0.0;
  report.r2 = param_var > 0.0 ? 1.0 - param_sqerr / param_var : 0.0;
  report.strata = detail::stratify(report.rows, ds.spec.n_qubits);
  return report;
}

/// Purity predictions: squared error per sample, aggregate MSE and R^2.
/// Predictions are clamped to the physical range first.
inline EvalReport evaluate_purity(
    const std::function<double(const std::vector<double>&)>& predict,
    const std::string& model_name, const Dataset& ds,
    const std::vector<size_t>& test_idx) {
  EvalReport report;
  report.task = "purity";
  report.model = model_name;
  report.n_test = test_idx.size();

  double y_mean = 0.0;
  for (size_t idx : test_idx) y_mean += ds.samples[idx].target_purity;
  if (!test_idx.empty()) y_mean /= test_idx.size();

  double sqerr = 0.0, var = 0.0;
  for (size_t idx : test_idx) {
    const Sample& s = ds.samples[idx];
    const double y_pred = clamp_purity(predict(s.record), ds.spec.n_qubits);
    const double e = y_pred - s.target_purity;
    sqerr += e * e;
    var += (s.target_purity - y_mean) * (s.target_purity - y_mean);
    report.rows.push_back({e * e, s.meta.zeros, s.meta.rank, s.meta.pure,
                           s.meta.noise_strength, s.meta.measurements});
  }
  report.mse = test_idx.empty() ? 0.0 : sqerr / test_idx.size();
  report.r2 = var > 0.0 ? 1.0 - sqerr / var : 0.0;
  report.strata = detail::stratify(report.rows, ds.spec.n_qubits);
  return report;
}

}  // namespace tqst
