// Copyright 2026 The qas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

namespace qas {

struct AmsgradOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AmsgradOptions&, const AmsgradOptions&) = default;
};

/// AMSGRAD moments without bias correction:
///   m <- b1 m + (1 - b1) g
///   v <- b2 v + (1 - b2) g^2
///   vhat <- max(vhat, v)
///   param -= lr m / (sqrt(vhat) + eps)
struct AmsgradState {
  std::vector<double> m;
  std::vector<double> v;
  std::vector<double> v_hat;
  std::size_t step = 0;

  AmsgradState() = default;
  explicit AmsgradState(std::size_t n) : m(n, 0.0), v(n, 0.0), v_hat(n, 0.0) {}

  friend bool operator==(const AmsgradState&, const AmsgradState&) = default;
};

/// Throws NonFiniteGradient (leaving everything untouched) if any gradient
/// entry is NaN or infinite, LengthMismatch on shape errors.
void amsgrad_step(AmsgradState& state, std::span<double> params, std::span<const double> grads,
                  double lr, const AmsgradOptions& options = {});

nlohmann::json to_json(const AmsgradState& state);
AmsgradState amsgrad_state_from_json(const nlohmann::json& j);

}  // namespace qas
