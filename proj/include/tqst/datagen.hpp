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
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqst/errors.hpp"
#include "tqst/protocol.hpp"
#include "tqst/qstate.hpp"
#include "tqst/reconstruct.hpp"

namespace tqst {

static_assert(std::endian::native == std::endian::little,
              "dataset format is little-endian");

struct DatasetSpec {
  int n_qubits = 2;
  int per_pair = 1;  // M: samples per (zeros, rank) pair, per purity class
  NoiseSpec noise;
  std::uint64_t seed = 0;
  int shots = 0;  // 0 = exact expectation values
  // Replaces the Gini-derived threshold when set.
  std::optional<double> threshold_override;

  /// All admissible (zeros, rank) pairs for mixed states, in enumeration
  /// order: z ascending, then rank ascending.
  std::vector<std::pair<int, int>> zero_rank_pairs() const {
    const int d = dim_for_qubits(n_qubits);
    std::vector<std::pair<int, int>> out;
    for (int z = 0; z <= d - 2; ++z)
      for (int r = 2; r <= d - z; ++r) out.emplace_back(z, r);
    return out;
  }

  /// 2 M 2^{n-1} (2^n - 1): the mixed block and an equal pure block.
  long long total_samples() const {
    const long long d = dim_for_qubits(n_qubits);
    return 2LL * per_pair * (d / 2) * (d - 1);
  }

  void validate() const {
    dim_for_qubits(n_qubits);
    if (per_pair < 1) throw ValidationError("DatasetSpec: per_pair must be >= 1");
    if (shots < 0) throw ValidationError("DatasetSpec: shots must be >= 0");
    noise.validate(n_qubits);
  }
};

struct SampleMeta {
  int zeros = 0;
  int rank = 1;
  bool pure = false;
  double noise_strength = 0.0;
  int measurements = 0;
};

/// One training example: the (possibly noisy) measurement record, the clean
/// state's parameter vector and purity, and bookkeeping for stratified
/// evaluation.
struct Sample {
  std::vector<double> record;
  std::vector<double> target_params;
  double target_purity = 0.0;
  SampleMeta meta;
};

struct Dataset {
  DatasetSpec spec;
  std::vector<Sample> samples;
};

/// Number of f64 slots one sample occupies on disk.
inline size_t sample_record_doubles(int n_qubits) {
  const size_t d = dim_for_qubits(n_qubits);
  return 2 * d * d + 1 + 5;
}

/// Generate the full dataset: for every (z, r) pair, `per_pair` mixed states
/// followed by `per_pair` pure states with the same z. Each sample draws
/// from its own seed stream, so the result is independent of generation
/// order and reproducible.
inline Dataset build_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset ds;
  ds.spec = spec;
  ds.samples.reserve(spec.total_samples());
  const Rng master(spec.seed);

  std::uint64_t sample_index = 0;
  auto make_sample = [&](int zeros, int rank, bool pure) {
    Rng rng = master.split(sample_index++);
    StateSpec sspec{spec.n_qubits, zeros, pure ? 1 : rank, pure};
    DensityMatrix clean = generate_state(rng, sspec);
    auto [rec, target] = noisy_pipeline(rng, clean, spec.noise, spec.shots,
                                        spec.threshold_override);
    Sample s;
    s.meta = {zeros, pure ? 1 : rank, pure, spec.noise.strength,
              rec.performed_count()};
    s.record = std::move(rec.values);
    s.target_params = state_to_params(target);
    s.target_purity = purity(target);
    ds.samples.push_back(std::move(s));
  };

  for (auto [z, r] : spec.zero_rank_pairs()) {
    for (int m = 0; m < spec.per_pair; ++m) make_sample(z, r, false);
    for (int m = 0; m < spec.per_pair; ++m) make_sample(z, r, true);
  }
  return ds;
}

struct SplitIndices {
  std::vector<size_t> train, val, test;
};

/// Deterministic stratified split. Every (pure, zeros) class is shuffled
/// and divided by the same fractions, so each split sees every sparsity
/// class.
inline SplitIndices split_dataset(const Dataset& ds, double train_frac,
                                  double val_frac, std::uint64_t seed) {
  if (ds.samples.empty()) throw ValidationError("split: empty dataset");
  if (train_frac <= 0.0 || val_frac < 0.0 || train_frac + val_frac >= 1.0)
    throw ValidationError("split: bad fractions");

  std::map<std::pair<int, int>, std::vector<size_t>> groups;
  for (size_t i = 0; i < ds.samples.size(); ++i) {
    const SampleMeta& m = ds.samples[i].meta;
    groups[{m.pure ? 1 : 0, m.zeros}].push_back(i);
  }

  Rng rng(seed);
  SplitIndices out;
  for (auto& [key, idx] : groups) {
    for (size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[rng.next_below(i)]);
    const size_t n = idx.size();
    const size_t n_train = static_cast<size_t>(std::llround(train_frac * n));
    const size_t n_val = static_cast<size_t>(std::llround(val_frac * n));
    if (n_train + n_val > n) throw ValidationError("split: fractions overflow");
    for (size_t i = 0; i < n_train; ++i) out.train.push_back(idx[i]);
    for (size_t i = n_train; i < n_train + n_val; ++i) out.val.push_back(idx[i]);
    for (size_t i = n_train + n_val; i < n; ++i) out.test.push_back(idx[i]);
  }
  if (out.train.empty() || out.val.empty() || out.test.empty())
    throw ValidationError("split: a split would be empty");
  return out;
}

// ---------------------------------------------------------------------------
// On-disk formats: a directory with manifest.json and samples.bin.
// samples.bin is the magic "TQSTDS01" followed by fixed-length little-endian
// f64 records: 4^n input, 4^n target, purity, then (zeros, rank, pure,
// noise_strength, measurements).
// ---------------------------------------------------------------------------

namespace detail {
constexpr char kDatasetMagic[9] = "TQSTDS01";
}

inline nlohmann::json dataset_manifest(const Dataset& ds) {
  return nlohmann::json{
      {"format_version", 1},
      {"n_qubits", ds.spec.n_qubits},
      {"per_pair", ds.spec.per_pair},
      {"noise", {{"kind", ds.spec.noise.name()},
                 {"strength", ds.spec.noise.strength}}},
      {"seed", ds.spec.seed},
      {"shots", ds.spec.shots},
      {"threshold_override",
       ds.spec.threshold_override ? nlohmann::json(*ds.spec.threshold_override)
                                  : nlohmann::json()},
      {"total_samples", ds.samples.size()},
      {"sample_record_doubles", sample_record_doubles(ds.spec.n_qubits)},
  };
}

inline void save_dataset(const std::string& dir, const Dataset& ds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw ValidationError("cannot write manifest in " + dir);
    out << dataset_manifest(ds).dump(2) << "\n";
  }
  std::ofstream out(fs::path(dir) / "samples.bin", std::ios::binary);
  if (!out) throw ValidationError("cannot write samples in " + dir);
  out.write(detail::kDatasetMagic, 8);
  std::vector<double> row(sample_record_doubles(ds.spec.n_qubits));
  for (const Sample& s : ds.samples) {
    size_t k = 0;
    for (double v : s.record) row[k++] = v;
    for (double v : s.target_params) row[k++] = v;
    row[k++] = s.target_purity;
    row[k++] = s.meta.zeros;
    row[k++] = s.meta.rank;
    row[k++] = s.meta.pure ? 1.0 : 0.0;
    row[k++] = s.meta.noise_strength;
    row[k++] = s.meta.measurements;
    out.write(reinterpret_cast<const char*>(row.data()),
              row.size() * sizeof(double));
  }
  if (!out) throw ValidationError("dataset write failed in " + dir);
}

inline Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw ValidationError("cannot open manifest in " + dir);
  nlohmann::json manifest = nlohmann::json::parse(mf);

  Dataset ds;
  ds.spec.n_qubits = manifest.at("n_qubits").get<int>();
  ds.spec.per_pair = manifest.at("per_pair").get<int>();
  const std::string kind = manifest.at("noise").at("kind").get<std::string>();
  ds.spec.noise.kind = kind == "depol"      ? NoiseKind::Depolarizing
                       : kind == "expstate" ? NoiseKind::ExpState
                                            : NoiseKind::None;
  ds.spec.noise.strength = manifest.at("noise").at("strength").get<double>();
  ds.spec.seed = manifest.at("seed").get<std::uint64_t>();
  ds.spec.shots = manifest.at("shots").get<int>();
  if (manifest.contains("threshold_override") &&
      !manifest.at("threshold_override").is_null())
    ds.spec.threshold_override = manifest.at("threshold_override").get<double>();
  const size_t total = manifest.at("total_samples").get<size_t>();

  std::ifstream in(fs::path(dir) / "samples.bin", std::ios::binary);
  if (!in) throw ValidationError("cannot open samples in " + dir);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != std::string(detail::kDatasetMagic, 8))
    throw ValidationError("not a dataset file: " + dir);

  const int d = dim_for_qubits(ds.spec.n_qubits);
  std::vector<double> row(sample_record_doubles(ds.spec.n_qubits));
  ds.samples.reserve(total);
  for (size_t i = 0; i < total; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), row.size() * sizeof(double));
    if (!in) throw ValidationError("dataset truncated: " + dir);
    Sample s;
    size_t k = 0;
    s.record.assign(row.begin(), row.begin() + d * d);
    k += d * d;
    s.target_params.assign(row.begin() + k, row.begin() + k + d * d);
    k += d * d;
    s.target_purity = row[k++];
    s.meta.zeros = static_cast<int>(row[k++]);
    s.meta.rank = static_cast<int>(row[k++]);
    s.meta.pure = row[k++] != 0.0;
    s.meta.noise_strength = row[k++];
    s.meta.measurements = static_cast<int>(row[k++]);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// CSV interoperability. Columns: m0..m{4^n-1}, t0..t{4^n-1}, purity, zeros,
// rank, pure, noise_strength, measurements. External measurement records
// import through the same schema; only the m-columns are required.
// ---------------------------------------------------------------------------

inline void export_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write csv: " + path);
  const int d = dim_for_qubits(ds.spec.n_qubits);
  for (int i = 0; i < d * d; ++i) out << "m" << i << ",";
  for (int i = 0; i < d * d; ++i) out << "t" << i << ",";
  out << "purity,zeros,rank,pure,noise_strength,measurements\n";
  out.precision(17);
  for (const Sample& s : ds.samples) {
    for (double v : s.record) out << v << ",";
    for (double v : s.target_params) out << v << ",";
    out << s.target_purity << "," << s.meta.zeros << "," << s.meta.rank << ","
        << (s.meta.pure ? 1 : 0) << "," << s.meta.noise_strength << ","
        << s.meta.measurements << "\n";
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace detail

/// Rows of measurement records from a CSV with the schema above (target and
/// meta columns optional). This is the entry point for third-party
/// experimental records.
inline std::vector<MeasurementRecord> import_records_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty csv: " + path);
  const auto header = detail::split_csv_line(line);
  std::vector<int> m_cols;
  for (size_t c = 0; c < header.size(); ++c)
    if (header[c].size() > 1 && header[c][0] == 'm' &&
        std::isdigit(static_cast<unsigned char>(header[c][1])))
      m_cols.push_back(static_cast<int>(c));
  int n_qubits = 0;
  while ((1 << (2 * n_qubits)) < static_cast<int>(m_cols.size())) ++n_qubits;
  if (m_cols.empty() || (1 << (2 * n_qubits)) != static_cast<int>(m_cols.size()))
    throw ValidationError("csv m-columns do not form a 4^n record: " + path);

  std::vector<MeasurementRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    MeasurementRecord rec;
    rec.n_qubits = n_qubits;
    rec.values.reserve(m_cols.size());
    for (int c : m_cols) {
      if (c >= static_cast<int>(cells.size()))
        throw ValidationError("csv row shorter than header: " + path);
      rec.values.push_back(std::stod(cells[c]));
    }
    rec.validate();
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw ValidationError("csv holds no records: " + path);
  return out;
}

/// Full-dataset import (all columns required).
inline Dataset import_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty csv: " + path);
  const auto header = detail::split_csv_line(line);
  size_t m_count = 0;
  for (const std::string& h : header)
    if (h.size() > 1 && h[0] == 'm' &&
        std::isdigit(static_cast<unsigned char>(h[1])))
      ++m_count;
  int n_qubits = 0;
  while ((1u << (2 * n_qubits)) < m_count) ++n_qubits;
  if (m_count == 0 || (1u << (2 * n_qubits)) != m_count)
    throw ValidationError("csv m-columns do not form a 4^n record: " + path);
  const size_t dd = m_count;
  const size_t expected_cols = 2 * dd + 6;
  if (header.size() != expected_cols)
    throw ValidationError("csv header does not match the dataset schema");

  Dataset ds;
  ds.spec.n_qubits = n_qubits;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != expected_cols)
      throw ValidationError("csv row does not match the dataset schema");
    Sample s;
    size_t k = 0;
    for (size_t i = 0; i < dd; ++i) s.record.push_back(std::stod(cells[k++]));
    for (size_t i = 0; i < dd; ++i)
      s.target_params.push_back(std::stod(cells[k++]));
    s.target_purity = std::stod(cells[k++]);
    s.meta.zeros = std::stoi(cells[k++]);
    s.meta.rank = std::stoi(cells[k++]);
    s.meta.pure = std::stoi(cells[k++]) != 0;
    s.meta.noise_strength = std::stod(cells[k++]);
    s.meta.measurements = std::stoi(cells[k++]);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace tqst
