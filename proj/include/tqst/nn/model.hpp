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

#include <memory>
#include <string>
#include <vector>

#include "tqst/nn/layers.hpp"
#include "tqst/nn/tensor.hpp"
#include "tqst/protocol.hpp"

namespace tqst::nn {

enum class Task { Tomography, Purity };
enum class Family { MLP, PEMLP, Combined };

inline std::string to_string(Task t) {
  return t == Task::Tomography ? "tomography" : "purity";
}
inline std::string to_string(Family f) {
  switch (f) {
    case Family::MLP: return "mlp";
    case Family::PEMLP: return "pemlp";
    default: return "combined";
  }
}

struct ModelConfig {
  Task task = Task::Tomography;
  Family family = Family::MLP;
  int n_qubits = 2;
  // MLP: neurons per hidden Linear layer. PEMLP/Combined: internal feature
  // counts of the hidden PELinear layers.
  std::vector<int> hidden;
  // Combined only: width of the dense hidden layer after the PE stack.
  int dense_hidden = 0;
  // When > 0, a dropout layer sits right before the final Linear layer.
  double dropout = 0.0;

  /// The architectures used in the reference experiments.
  static ModelConfig defaults(Task task, Family family, int n_qubits) {
    ModelConfig cfg;
    cfg.task = task;
    cfg.family = family;
    cfg.n_qubits = n_qubits;
    switch (family) {
      case Family::MLP: cfg.hidden = {32, 32}; break;
      case Family::PEMLP: cfg.hidden = {64}; break;
      case Family::Combined:
        cfg.hidden = {32, 32, 32};
        cfg.dense_hidden = 512;
        if (task == Task::Purity) cfg.dropout = 0.5;
        break;
    }
    return cfg;
  }
};

/// A sequential stack with the input preparation the family expects: MLP
/// consumes the flat 4^n record, the PE families its grid encoding.
class Model {
 public:
  Model(ModelConfig cfg, std::vector<std::unique_ptr<Layer>> layers)
      : cfg_(std::move(cfg)), layers_(std::move(layers)) {}

  const ModelConfig& config() const { return cfg_; }

  int output_size() const {
    const int d = dim_for_qubits(cfg_.n_qubits);
    return cfg_.task == Task::Tomography ? d * d : 1;
  }

  bool grid_input() const { return cfg_.family != Family::MLP; }

  Tensor make_input(const std::vector<double>& record_values) const {
    const int d = dim_for_qubits(cfg_.n_qubits);
    if (static_cast<int>(record_values.size()) != d * d)
      throw ValidationError("model input has wrong length");
    if (!grid_input()) return Tensor({d * d}, record_values);
    MeasurementRecord rec{cfg_.n_qubits, record_values};
    EncodedInput enc = encode_input(rec);
    return Tensor({d, d, 2}, std::move(enc.grid));
  }

  Tensor forward(const Tensor& input, bool training, Rng& rng) {
    Tensor t = input;
    for (auto& layer : layers_) t = layer->forward(t, training, rng);
    forward_done_ = true;
    return t;
  }

  /// Propagate d(loss)/d(output) back through the stack, accumulating
  /// parameter gradients.
  void backward(const Tensor& grad_out) {
    if (!forward_done_)
      throw ValidationError("Model: backward before forward");
    Tensor g = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
      g = (*it)->backward(g);
  }

  std::vector<ParamView> params() {
    std::vector<ParamView> out;
    for (auto& layer : layers_)
      for (ParamView p : layer->params()) out.push_back(p);
    return out;
  }

  size_t param_count() {
    size_t n = 0;
    for (ParamView p : params()) n += p.size;
    return n;
  }

  void zero_grad() {
    for (ParamView p : params())
      std::fill(p.grad, p.grad + p.size, 0.0);
  }

  /// Inference on one measurement record (dropout off).
  std::vector<double> predict(const std::vector<double>& record_values) {
    Rng unused(0);
    Tensor out = forward(make_input(record_values), false, unused);
    return out.values;
  }

  const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

 private:
  ModelConfig cfg_;
  std::vector<std::unique_ptr<Layer>> layers_;
  bool forward_done_ = false;
};

/// Assemble the stack for a config. Initialization draws from `rng` in
/// declaration order, so a seed pins every parameter.
inline Model build_model(const ModelConfig& cfg, Rng& rng) {
  const int d = dim_for_qubits(cfg.n_qubits);
  if (cfg.hidden.empty())
    throw ValidationError("model config needs at least one hidden layer");
  for (int h : cfg.hidden)
    if (h < 1) throw ValidationError("hidden sizes must be positive");
  if (cfg.dropout < 0.0 || cfg.dropout >= 1.0)
    throw ValidationError("dropout probability must be in [0, 1)");
  const int out_dim = cfg.task == Task::Tomography ? d * d : 1;

  std::vector<std::unique_ptr<Layer>> layers;
  auto add_dropout_if_configured = [&] {
    if (cfg.dropout > 0.0)
      layers.push_back(std::make_unique<Dropout>(cfg.dropout));
  };

  switch (cfg.family) {
    case Family::MLP: {
      if (cfg.dense_hidden != 0)
        throw ValidationError("dense_hidden only applies to combined models");
      int in = d * d;
      for (int h : cfg.hidden) {
        layers.push_back(std::make_unique<Linear>(in, h, rng));
        layers.push_back(std::make_unique<ReLU>());
        in = h;
      }
      add_dropout_if_configured();
      layers.push_back(std::make_unique<Linear>(in, out_dim, rng));
      break;
    }
    case Family::PEMLP: {
      if (cfg.dense_hidden != 0)
        throw ValidationError("dense_hidden only applies to combined models");
      if (cfg.task == Task::Tomography && cfg.dropout > 0.0)
        throw ValidationError(
            "dropout needs a final Linear layer; the tomography PEMLP has none");
      int ch = 2;
      for (int h : cfg.hidden) {
        layers.push_back(std::make_unique<PELinear>(ch, h, rng, d));
        layers.push_back(std::make_unique<ReLU>());
        ch = h;
      }
      layers.push_back(std::make_unique<PELinear>(ch, 2, rng, d));
      layers.push_back(std::make_unique<GridDecode>(cfg.n_qubits));
      if (cfg.task == Task::Purity) {
        add_dropout_if_configured();
        layers.push_back(std::make_unique<Linear>(d * d, 1, rng));
      }
      break;
    }
    case Family::Combined: {
      if (cfg.dense_hidden < 1)
        throw ValidationError("combined model needs dense_hidden >= 1");
      int ch = 2;
      for (int h : cfg.hidden) {
        layers.push_back(std::make_unique<PELinear>(ch, h, rng, d));
        layers.push_back(std::make_unique<ReLU>());
        ch = h;
      }
      // Bridge: reduce to two channels and read the grid out as the 4^n
      // parameter vector the dense head consumes.
      layers.push_back(std::make_unique<PELinear>(ch, 2, rng, d));
      layers.push_back(std::make_unique<GridDecode>(cfg.n_qubits));
      layers.push_back(std::make_unique<Linear>(d * d, cfg.dense_hidden, rng));
      layers.push_back(std::make_unique<ReLU>());
      add_dropout_if_configured();
      layers.push_back(std::make_unique<Linear>(cfg.dense_hidden, out_dim, rng));
      break;
    }
  }
  return Model(cfg, std::move(layers));
}

}  // namespace tqst::nn
