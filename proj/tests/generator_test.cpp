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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "qas/ansatz.hpp"
#include "qas/error.hpp"
#include "qas/generator.hpp"

namespace qas {
namespace {

using fixture::random_spec;
using fixture::random_theta;

GeneratorModel model_of(const AnsatzSpec& spec, int n, std::vector<double> theta) {
  return GeneratorModel(build_circuit(spec, n), std::move(theta));
}

GeneratorModel model_of(std::initializer_list<int> tags, int n, std::vector<double> theta) {
  AnsatzSpec s;
  for (int t : tags) s.blocks.push_back(block_kind_from_tag(t));
  return model_of(s, n, std::move(theta));
}

Eigen::MatrixXd finite_difference_jacobian(const GeneratorModel& m, double h) {
  const std::size_t dim = std::size_t{1} << m.n_qubits;
  Eigen::MatrixXd j(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(m.theta.size()));
  for (std::size_t c = 0; c < m.theta.size(); ++c) {
    auto plus = m.theta;
    auto minus = m.theta;
    plus[c] += h;
    minus[c] -= h;
    const auto pp = oracle::dense_probabilities(m.ansatz, plus, true);
    const auto pm = oracle::dense_probabilities(m.ansatz, minus, true);
    for (std::size_t k = 0; k < dim; ++k) {
      j(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = (pp[k] - pm[k]) / (2 * h);
    }
  }
  return j;
}

TEST(GeneratorModel, RejectsMismatchedAngles) {
  EXPECT_THROW(model_of({1}, 2, {0.1}), Error);
  EXPECT_THROW(model_of({1}, 1, {std::nan("")}), Error);
}

TEST(GeneratorDistribution, CzOnlyKeepsUniform) {
  const auto p = generator_distribution(model_of({4}, 2, {}));
  for (double x : p) EXPECT_NEAR(x, 0.25, 1e-15);
}

TEST(GeneratorDistribution, RxOnPlusStateIsConstant) {
  for (double t : {0.0, 0.3, 1.7, -2.9}) {
    const auto p = generator_distribution(model_of({1}, 1, {t}));
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[1], 0.5, 1e-15);
  }
}

TEST(GeneratorDistribution, MatchesDenseOracleAndSumsToOne) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const AnsatzSpec s = random_spec(rng, 4);
    const Circuit c = build_circuit(s, n);
    const GeneratorModel m(c, random_theta(rng, c.n_params()));
    const auto got = generator_distribution(m);
    const auto want = oracle::dense_probabilities(c, m.theta, true);
    double total = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_NEAR(got[k], want[k], 1e-12);
      total += got[k];
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(GeneratorDistribution, TrailingCzBlockChangesNothing) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 5;
    AnsatzSpec s = random_spec(rng, 4);
    const Circuit c = build_circuit(s, n);
    const auto theta = random_theta(rng, c.n_params());
    const auto before = generator_distribution(GeneratorModel(c, theta));
    s.blocks.push_back(BlockKind::CzOnly);
    const auto after = generator_distribution(model_of(s, n, theta));
    for (std::size_t k = 0; k < before.size(); ++k) EXPECT_NEAR(before[k], after[k], 1e-14);
  }
}

TEST(Jacobian, ConstantDistributionHasZeroColumn) {
  const Eigen::MatrixXd j = distribution_jacobian(model_of({1}, 1, {0.8}));
  EXPECT_LT(j.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Jacobian, BareRotationMatchesAnalyticDerivative) {
  Circuit c(1);
  c.add_rotation(GateKind::RX, 0);
  const double t = std::numbers::pi / 2;
  const Eigen::MatrixXd j = circuit_jacobian(c, std::vector<double>{t}, false);
  // p0 = cos^2(t/2), so dp0/dt = -sin(t)/2.
  EXPECT_NEAR(j(0, 0), -0.5, 1e-14);
  EXPECT_NEAR(j(1, 0), 0.5, 1e-14);
}

TEST(Jacobian, MatchesFiniteDifferencesAndConservesProbability) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const AnsatzSpec s = random_spec(rng, 3);
    const Circuit c = build_circuit(s, n);
    const GeneratorModel m(c, random_theta(rng, c.n_params()));
    const Eigen::MatrixXd shift = distribution_jacobian(m);
    const Eigen::MatrixXd fd = finite_difference_jacobian(m, 1e-5);
    ASSERT_EQ(shift.cols(), static_cast<Eigen::Index>(c.n_params()));
    for (Eigen::Index col = 0; col < shift.cols(); ++col) {
      EXPECT_LT(std::abs(shift.col(col).sum()), 1e-9);
      for (Eigen::Index row = 0; row < shift.rows(); ++row) {
        EXPECT_NEAR(shift(row, col), fd(row, col), 1e-6) << "trial " << trial;
      }
    }
  }
}

TEST(GeneratorLoss, CertainDiscriminatorGivesZero) {
  std::mt19937_64 rng(4);
  const GeneratorModel m = model_of({2, 4, 2}, 3, random_theta(rng, 12));
  const auto r = generator_loss_and_grad(m, std::vector<double>(8, 1.0));
  EXPECT_EQ(r.loss, 0.0);
  for (double g : r.grad) EXPECT_EQ(std::abs(g), 0.0);
}

TEST(GeneratorLoss, ConstantHalfGivesLogTwoAndZeroGradient) {
  std::mt19937_64 rng(5);
  const GeneratorModel m = model_of({2, 4, 2}, 3, random_theta(rng, 12));
  const auto r = generator_loss_and_grad(m, std::vector<double>(8, 0.5));
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-12);
  for (double g : r.grad) EXPECT_LT(std::abs(g), 1e-9);
}

TEST(GeneratorLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    const AnsatzSpec s = random_spec(rng, 3);
    const Circuit c = build_circuit(s, n);
    const GeneratorModel m(c, random_theta(rng, c.n_params()));
    std::vector<double> d(std::size_t{1} << n);
    for (double& x : d) x = u(rng);
    const auto r = generator_loss_and_grad(m, d);
    auto loss_at = [&](const std::vector<double>& theta) {
      const auto p = oracle::dense_probabilities(c, theta, true);
      double l = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) l -= p[k] * std::log(d[k]);
      return l;
    };
    EXPECT_NEAR(r.loss, loss_at(m.theta), 1e-12);
    for (std::size_t j = 0; j < m.theta.size(); ++j) {
      auto plus = m.theta;
      auto minus = m.theta;
      plus[j] += 1e-5;
      minus[j] -= 1e-5;
      EXPECT_NEAR(r.grad[j], (loss_at(plus) - loss_at(minus)) / 2e-5, 1e-6);
    }
  }
}

TEST(GeneratorLoss, RejectsOutputsOutsideUnitInterval) {
  const GeneratorModel m = model_of({1}, 1, {0.1});
  for (double bad : {0.0, -0.1, 1.5, std::nan("")}) {
    try {
      generator_loss_and_grad(m, std::vector<double>{0.5, bad});
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidDiscriminatorOutput);
    }
  }
  EXPECT_THROW(generator_loss_and_grad(m, std::vector<double>{0.5}), Error);
}

}  // namespace
}  // namespace qas
