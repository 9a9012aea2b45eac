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
#include "tqst/nn/tensor.hpp"

namespace tqst::nn {

/// Adam with bias correction; moments live here, keyed by parameter order.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<ParamView>& params) {
    size_t total = 0;
    for (const ParamView& p : params) total += p.size;
    if (m_.empty()) {
      m_.assign(total, 0.0);
      v_.assign(total, 0.0);
    } else if (m_.size() != total) {
      throw ValidationError("Adam: parameter layout changed between steps");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    size_t off = 0;
    for (const ParamView& p : params) {
      for (size_t i = 0; i < p.size; ++i) {
        const double g = p.grad[i];
        double& m = m_[off + i];
        double& v = v_[off + i];
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g * g;
        p.value[i] -= lr_ * (m / bc1) / (std::sqrt(v / bc2) + eps_);
      }
      off += p.size;
    }
  }

  long long step_count() const { return t_; }
  const std::vector<double>& second_moments() const { return v_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace tqst::nn
