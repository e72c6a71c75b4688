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

#include "qas/amsgrad.hpp"

#include <algorithm>
#include <cmath>

#include "qas/error.hpp"

namespace qas {

void amsgrad_step(AmsgradState& state, std::span<double> params, std::span<const double> grads,
                  double lr, const AmsgradOptions& options) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n || state.v_hat.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "AMSGRAD state, parameters and gradients differ in size");
  }
  if (!std::all_of(grads.begin(), grads.end(), [](double g) { return std::isfinite(g); })) {
    throw Error(ErrorCode::NonFiniteGradient, "gradient contains NaN or infinity");
  }
  const double b1 = options.beta1;
  const double b2 = options.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    state.v_hat[i] = std::max(state.v_hat[i], state.v[i]);
    params[i] -= lr * state.m[i] / (std::sqrt(state.v_hat[i]) + options.epsilon);
  }
  ++state.step;
}

nlohmann::json to_json(const AmsgradState& state) {
  return {{"m", state.m}, {"v", state.v}, {"v_hat", state.v_hat}, {"step", state.step}};
}

AmsgradState amsgrad_state_from_json(const nlohmann::json& j) {
  AmsgradState s;
  s.m = j.at("m").get<std::vector<double>>();
  s.v = j.at("v").get<std::vector<double>>();
  s.v_hat = j.at("v_hat").get<std::vector<double>>();
  s.step = j.at("step").get<std::size_t>();
  return s;
}

}  // namespace qas
