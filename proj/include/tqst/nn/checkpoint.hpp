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

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>

#include "tqst/nn/model.hpp"

namespace tqst::nn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

namespace detail {

constexpr char kModelMagic[9] = "TQSTMDL1";

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ValidationError("checkpoint: truncated file");
  return v;
}

}  // namespace detail

/// Binary checkpoint: magic "TQSTMDL1", config record, then every parameter
/// buffer as f64 in declaration order.
inline void save_model(const std::string& path, Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write checkpoint: " + path);
  out.write(detail::kModelMagic, 8);
  const ModelConfig& cfg = model.config();
  detail::write_raw<std::uint32_t>(out, 1);  // format version
  detail::write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.task));
  detail::write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.family));
  detail::write_raw<std::uint32_t>(out, cfg.n_qubits);
  detail::write_raw<std::uint32_t>(out,
                                   static_cast<std::uint32_t>(cfg.hidden.size()));
  for (int h : cfg.hidden) detail::write_raw<std::uint32_t>(out, h);
  detail::write_raw<std::uint32_t>(out, cfg.dense_hidden);
  detail::write_raw<double>(out, cfg.dropout);
  detail::write_raw<std::uint64_t>(out, model.param_count());
  for (ParamView p : model.params())
    out.write(reinterpret_cast<const char*>(p.value), p.size * sizeof(double));
  if (!out) throw ValidationError("checkpoint write failed: " + path);
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != std::string(detail::kModelMagic, 8))
    throw ValidationError("not a model checkpoint: " + path);
  const auto version = detail::read_raw<std::uint32_t>(in);
  if (version != 1)
    throw ValidationError("unsupported checkpoint version " +
                          std::to_string(version));
  ModelConfig cfg;
  cfg.task = static_cast<Task>(detail::read_raw<std::uint32_t>(in));
  cfg.family = static_cast<Family>(detail::read_raw<std::uint32_t>(in));
  cfg.n_qubits = static_cast<int>(detail::read_raw<std::uint32_t>(in));
  const auto n_hidden = detail::read_raw<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_hidden; ++i)
    cfg.hidden.push_back(static_cast<int>(detail::read_raw<std::uint32_t>(in)));
  cfg.dense_hidden = static_cast<int>(detail::read_raw<std::uint32_t>(in));
  cfg.dropout = detail::read_raw<double>(in);
  const auto param_count = detail::read_raw<std::uint64_t>(in);

  Rng init_rng(0);  // immediately overwritten by the stored parameters
  Model model = build_model(cfg, init_rng);
  if (model.param_count() != param_count)
    throw ValidationError("checkpoint parameter count mismatch");
  for (ParamView p : model.params()) {
    in.read(reinterpret_cast<char*>(p.value), p.size * sizeof(double));
    if (!in) throw ValidationError("checkpoint: truncated parameters");
  }
  return model;
}

}  // namespace tqst::nn
