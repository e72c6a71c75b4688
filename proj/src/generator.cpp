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

#include "qas/generator.hpp"

#include <cmath>
#include <numbers>

#include "qas/error.hpp"

namespace qas {

namespace {

std::vector<double> run(const Circuit& circuit, std::span<const double> theta, bool hadamard_prep) {
  StateVector state = zero_state(circuit.n_qubits());
  if (hadamard_prep) {
    for (int q = 0; q < circuit.n_qubits(); ++q) apply_gate_inplace(state, Gate::h(q), {});
  }
  apply_circuit_inplace(state, circuit, theta);
  return probabilities(state);
}

}  // namespace

GeneratorModel::GeneratorModel(Circuit circuit, std::vector<double> angles)
    : n_qubits(circuit.n_qubits()), ansatz(std::move(circuit)), theta(std::move(angles)) {
  if (theta.size() != ansatz.n_params()) {
    throw Error(ErrorCode::ParamLengthMismatch, "theta length differs from the ansatz");
  }
  for (double t : theta) {
    if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "non-finite angle");
  }
}

std::vector<double> generator_distribution(const GeneratorModel& model) {
  return run(model.ansatz, model.theta, true);
}

std::vector<double> circuit_distribution(const Circuit& circuit, std::span<const double> theta) {
  return run(circuit, theta, false);
}

Eigen::MatrixXd circuit_jacobian(const Circuit& circuit, std::span<const double> theta,
                                 bool hadamard_prep) {
  const std::size_t dim = std::size_t{1} << circuit.n_qubits();
  Eigen::MatrixXd jac(dim, theta.size());
  std::vector<double> shifted(theta.begin(), theta.end());
  constexpr double shift = std::numbers::pi / 2.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    shifted[j] = theta[j] + shift;
    const auto plus = run(circuit, shifted, hadamard_prep);
    shifted[j] = theta[j] - shift;
    const auto minus = run(circuit, shifted, hadamard_prep);
    shifted[j] = theta[j];
    for (std::size_t k = 0; k < dim; ++k) jac(k, j) = 0.5 * (plus[k] - minus[k]);
  }
  return jac;
}

Eigen::MatrixXd distribution_jacobian(const GeneratorModel& model) {
  return circuit_jacobian(model.ansatz, model.theta, true);
}

GeneratorLoss generator_loss_and_grad(const GeneratorModel& model,
                                      std::span<const double> disc_outputs) {
  const std::size_t dim = std::size_t{1} << model.n_qubits;
  if (disc_outputs.size() != dim) {
    throw Error(ErrorCode::LengthMismatch, "need one discriminator output per grid point");
  }
  Eigen::VectorXd log_d(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = disc_outputs[k];
    if (!(d > 0.0 && d <= 1.0)) {
      throw Error(ErrorCode::InvalidDiscriminatorOutput,
                  "D(x_" + std::to_string(k) + ") = " + std::to_string(d));
    }
    log_d[k] = std::log(d);
  }
  const auto p = generator_distribution(model);
  GeneratorLoss out;
  for (std::size_t k = 0; k < dim; ++k) out.loss -= p[k] * log_d[k];

  const Eigen::MatrixXd jac = distribution_jacobian(model);
  const Eigen::VectorXd grad = -(jac.transpose() * log_d);
  out.grad.assign(grad.data(), grad.data() + grad.size());
  return out;
}

}  // namespace qas
