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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qas/statevector.hpp"

namespace qas {

/// Quantum generator: H on every qubit, then the ansatz with angles `theta`.
struct GeneratorModel {
  int n_qubits = 1;
  Circuit ansatz{1};
  std::vector<double> theta;

  GeneratorModel() = default;
  GeneratorModel(Circuit circuit, std::vector<double> angles);
};

/// Output distribution over the 2^n grid points.
std::vector<double> generator_distribution(const GeneratorModel& model);

/// Probabilities of `circuit` applied to |0...0> with no preparation layer.
std::vector<double> circuit_distribution(const Circuit& circuit, std::span<const double> theta);

/// Parameter-shift Jacobian (2^n x n_params): entry (k, j) = dp_k / dtheta_j.
Eigen::MatrixXd distribution_jacobian(const GeneratorModel& model);
Eigen::MatrixXd circuit_jacobian(const Circuit& circuit, std::span<const double> theta,
                                 bool hadamard_prep);

struct GeneratorLoss {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Non-saturating generator loss -sum_k p_k ln D(x_k) and its gradient.
/// `disc_outputs` holds D at each grid point and must lie in (0, 1].
GeneratorLoss generator_loss_and_grad(const GeneratorModel& model,
                                      std::span<const double> disc_outputs);

}  // namespace qas
