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

#include <cstddef>
#include <vector>

#include "tqst/errors.hpp"

namespace tqst::nn {

/// Row-major dense tensor of doubles.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> values;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    values.assign(element_count(shape), 0.0);
  }
  Tensor(std::vector<int> s, std::vector<double> v)
      : shape(std::move(s)), values(std::move(v)) {
    if (values.size() != element_count(shape))
      throw ValidationError("tensor value count does not match shape");
  }

  size_t size() const { return values.size(); }

  static size_t element_count(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
      if (d < 1) throw ValidationError("tensor dimensions must be positive");
      n *= static_cast<size_t>(d);
    }
    return n;
  }
};

/// Flat view of one parameter block and its gradient buffer.
struct ParamView {
  double* value;
  double* grad;
  size_t size;
};

}  // namespace tqst::nn
