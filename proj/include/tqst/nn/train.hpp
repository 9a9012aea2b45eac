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

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "tqst/nn/model.hpp"
#include "tqst/nn/optim.hpp"
#include "tqst/rng.hpp"

namespace tqst::nn {

/// Inputs are raw 4^n record vectors; the model's make_input handles the
/// per-family encoding. Targets are 4^n parameter vectors (tomography) or
/// single purities.
struct TrainData {
  const std::vector<std::vector<double>>* inputs = nullptr;
  const std::vector<std::vector<double>>* targets = nullptr;

  size_t size() const { return inputs ? inputs->size() : 0; }
};

struct TrainOptions {
  int epochs = 100;
  int batch_size = 32;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  // Called after each epoch with (epoch, train_loss, val_loss).
  std::function<void(int, double, double)> on_epoch;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
};

inline double mse_loss(const std::vector<double>& pred,
                       const std::vector<double>& target) {
  if (pred.size() != target.size())
    throw ValidationError("mse_loss: size mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    acc += e * e;
  }
  return acc / static_cast<double>(pred.size());
}

/// Average MSE of the model over a dataset, in inference mode.
inline double evaluate_loss(Model& model, const TrainData& data) {
  Rng unused(0);
  double acc = 0.0;
  for (size_t s = 0; s < data.size(); ++s) {
    Tensor out = model.forward(model.make_input((*data.inputs)[s]), false, unused);
    acc += mse_loss(out.values, (*data.targets)[s]);
  }
  return data.size() ? acc / static_cast<double>(data.size()) : 0.0;
}

/// Minimize mean squared error with Adam. Deterministic for a fixed seed:
/// the epoch shuffles, the dropout masks, and the accumulation order are
/// all pinned.
inline TrainHistory train_model(Model& model, const TrainData& train,
                                const TrainData& val,
                                const TrainOptions& opts) {
  if (train.size() == 0) throw ValidationError("train_model: empty dataset");
  if (train.inputs->size() != train.targets->size())
    throw ValidationError("train_model: input/target count mismatch");
  if (opts.batch_size < 1) throw ValidationError("train_model: bad batch size");

  Rng shuffle_rng = Rng(opts.seed).split(1);
  Rng dropout_rng = Rng(opts.seed).split(2);
  Adam adam(opts.lr);

  const size_t n = train.size();
  const int out_dim = model.output_size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;

  TrainHistory history;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    for (size_t i = n; i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);

    double epoch_loss = 0.0;
    int n_batches = 0;
    for (size_t start = 0; start < n; start += opts.batch_size) {
      const size_t bsz = std::min<size_t>(opts.batch_size, n - start);
      model.zero_grad();
      double batch_loss = 0.0;
      const double grad_scale = 1.0 / (static_cast<double>(bsz) * out_dim);
      for (size_t b = 0; b < bsz; ++b) {
        const size_t idx = order[start + b];
        Tensor out = model.forward(model.make_input((*train.inputs)[idx]),
                                   true, dropout_rng);
        const std::vector<double>& target = (*train.targets)[idx];
        Tensor grad({out_dim});
        for (int k = 0; k < out_dim; ++k) {
          const double e = out.values[k] - target[k];
          batch_loss += e * e;
          grad.values[k] = 2.0 * e * grad_scale;
        }
        model.backward(grad);
      }
      adam.step(model.params());
      epoch_loss += batch_loss * grad_scale;
      ++n_batches;
    }
    history.train_loss.push_back(epoch_loss / n_batches);
    history.val_loss.push_back(evaluate_loss(model, val));
    if (opts.on_epoch)
      opts.on_epoch(epoch, history.train_loss.back(), history.val_loss.back());
  }
  return history;
}

}  // namespace tqst::nn
