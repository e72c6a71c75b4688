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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qas/amsgrad.hpp"
#include "qas/ansatz.hpp"
#include "qas/error.hpp"
#include "qas/random.hpp"
#include "qas/trainer.hpp"

namespace qas {
namespace {

template <class F>
void expect_code(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& x : p) s += (x = e(rng));
  for (double& x : p) x /= s;
  return p;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.epochs = 3;
  c.batch_size = 20;
  c.dataset_size = 100;
  c.repeats = 1;
  c.discriminator.widths = {1, 8, 4, 1};
  c.threads = 1;
  return c;
}

AnsatzSpec spec_of(std::vector<BlockKind> blocks) { return AnsatzSpec{std::move(blocks), {}}; }

// ---- target construction -------------------------------------------------

TEST(Target, UniformAndPointMass) {
  const auto u = discretize_target(TargetFamily::uniform(), 2);
  EXPECT_EQ(u.probs, (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
  const auto pm = discretize_target(TargetFamily::from_masses({1, 0, 0, 0, 0, 0, 0, 0}), 3);
  EXPECT_EQ(pm.probs, (std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0}));
}

TEST(Target, LognormalMatchesCdfDifferences) {
  const double mu = 1.0, sigma = 1.0;
  const auto t = discretize_target(TargetFamily::lognormal(mu, sigma), 3);
  ASSERT_EQ(t.probs.size(), 8U);
  // Density at each grid point recovered as a symmetric difference of the
  // closed-form CDF; the point k = 0 carries no density.
  auto cdf = [&](double x) { return 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * std::sqrt(2.0))); };
  std::vector<double> expected(8, 0.0);
  double total = 0.0;
  for (int k = 1; k < 8; ++k) {
    const double d = 1e-4;
    total += expected[k] = (cdf(k + d) - cdf(k - d)) / (2 * d);
  }
  double sum = 0.0;
  for (int k = 0; k < 8; ++k) {
    EXPECT_NEAR(t.probs[k], expected[k] / total, 1e-8) << k;
    sum += t.probs[k];
  }
  EXPECT_NEAR(sum, 1.0, 1e-10);
  const auto mode = std::max_element(t.probs.begin(), t.probs.end()) - t.probs.begin();
  EXPECT_GT(mode, 0);
  EXPECT_LT(mode, 7);
}

TEST(Target, Errors) {
  expect_code(ErrorCode::DegenerateTarget, [] { discretize_target(TargetFamily::from_masses({0, 0}), 1); });
  expect_code(ErrorCode::DegenerateTarget, [] { discretize_target(TargetFamily::from_masses({1, -1}), 1); });
  expect_code(ErrorCode::InvalidArgument, [] { discretize_target(TargetFamily::normal(0, 0), 2); });
  expect_code(ErrorCode::LengthMismatch, [] { discretize_target(TargetFamily::from_masses({1, 2, 3}), 1); });
  // Far in the tail every grid density underflows to zero.
  expect_code(ErrorCode::DegenerateTarget, [] { discretize_target(TargetFamily::normal(1e6, 1), 2); });
}

TEST(Target, ParseAndPrint) {
  EXPECT_EQ(parse_target_family("lognormal(1, 1)"), TargetFamily::lognormal(1, 1));
  EXPECT_EQ(parse_target_family(" Normal(3.5,0.5) "), TargetFamily::normal(3.5, 0.5));
  EXPECT_EQ(parse_target_family("uniform"), TargetFamily::uniform());
  EXPECT_EQ(parse_target_family("custom(1, 2, 3, 4)"), TargetFamily::from_masses({1, 2, 3, 4}));
  for (const auto& f : {TargetFamily::lognormal(0.25, 2), TargetFamily::uniform(),
                        TargetFamily::from_masses({0.5, 1e-3})}) {
    EXPECT_EQ(parse_target_family(to_string(f)), f);
  }
  for (const char* bad : {"lognormal(1)", "gamma(1, 2)", "normal(a, 1)", "custom()", ""}) {
    EXPECT_THROW(parse_target_family(bad), Error) << bad;
  }
}

// ---- divergences -----------------------------------------------------------

TEST(Kl, Examples) {
  const std::vector<double> p{0.1, 0.2, 0.7};
  EXPECT_EQ(kl_divergence(p, p), 0.0);
  EXPECT_NEAR(kl_divergence(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}), std::log(2.0),
              1e-10);  // the 1e-12 clamp on the zero entry moves it by ~3e-11
  const double clamped = kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{1, 0});
  EXPECT_NEAR(clamped, oracle::kl_reference({0.5, 0.5}, {1, 0}), 1e-12);
  // Half of ln(0.5 / 1e-12) plus half of ln 0.5, with the renormalization
  // shifting it by at most ~1e-12.
  EXPECT_NEAR(clamped, 0.5 * std::log(0.5) + 0.5 * std::log(0.5 / 1e-12), 1e-9);
  EXPECT_NEAR(clamped, 13.1224, 1e-4);
  expect_code(ErrorCode::LengthMismatch,
              [] { kl_divergence(std::vector<double>{1}, std::vector<double>{0.5, 0.5}); });
}

TEST(Kl, PropertiesOverRandomPairs) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 2 + rng() % 31;
    auto p = random_distribution(rng, n);
    auto q = random_distribution(rng, n);
    if (trial % 3 == 0) p[rng() % n] = 0.0;
    if (trial % 5 == 0) q[rng() % n] = 0.0;
    const double kl = kl_divergence(p, q);
    ASSERT_GE(kl, 0.0);
    ASSERT_NEAR(kl, oracle::kl_reference(p, q), 1e-9 * std::max(1.0, kl));
    ASSERT_EQ(kl_divergence(p, p), 0.0);
    if (p != q) ASSERT_GT(kl, 0.0);
  }
}

TEST(Ks, MaximumCdfGap) {
  EXPECT_EQ(ks_statistic(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}), 0.0);
  EXPECT_NEAR(ks_statistic(std::vector<double>{1, 0, 0}, std::vector<double>{0, 0, 1}), 1.0, 1e-15);
  EXPECT_NEAR(ks_statistic(std::vector<double>{0.2, 0.3, 0.5}, std::vector<double>{0.4, 0.4, 0.2}),
              0.3, 1e-15);
  EXPECT_THROW(ks_statistic(std::vector<double>{1}, std::vector<double>{0.5, 0.5}), Error);
}

// ---- AMSGRAD ---------------------------------------------------------------

TEST(Amsgrad, ZeroGradientLeavesParameters) {
  AmsgradState s(3);
  std::vector<double> p{0.1, -2, 3};
  const auto before = p;
  amsgrad_step(s, p, std::vector<double>{0, 0, 0}, 1e-4);
  EXPECT_EQ(p, before);
  EXPECT_EQ(s.step, 1U);
}

TEST(Amsgrad, FirstStepClosedForm) {
  AmsgradState s(1);
  std::vector<double> p{0.0};
  amsgrad_step(s, p, std::vector<double>{1.0}, 1e-4);
  const double expected = -1e-4 * 0.1 / (std::sqrt(0.001) + 1e-8);
  EXPECT_NEAR(p[0], expected, 1e-18);
  EXPECT_NEAR(p[0], -3.1623e-4, 1e-8);
  EXPECT_DOUBLE_EQ(s.m[0], 0.1);
  EXPECT_DOUBLE_EQ(s.v[0], 0.001);
  EXPECT_DOUBLE_EQ(s.v_hat[0], 0.001);
}

TEST(Amsgrad, MaxRuleKeepsLargerSecondMoment) {
  // From a zero state, grads (1, 0.1) still raise v: 0.999 * 1e-3 + 1e-3 * 1e-2
  // exceeds 1e-3, so the running max follows v.
  AmsgradState s(1);
  std::vector<double> p{0.0};
  amsgrad_step(s, p, std::vector<double>{1.0}, 1e-4);
  amsgrad_step(s, p, std::vector<double>{0.1}, 1e-4);
  EXPECT_NEAR(s.v[0], 0.001009, 1e-15);
  EXPECT_EQ(s.v_hat[0], s.v[0]);

  // Once v has grown past g^2 = 0.01, a small gradient lowers v and the
  // running max keeps the earlier, larger value.
  for (int i = 0; i < 20; ++i) amsgrad_step(s, p, std::vector<double>{1.0}, 1e-4);
  ASSERT_GT(s.v[0], 0.01);
  const double v1 = s.v_hat[0];
  amsgrad_step(s, p, std::vector<double>{0.1}, 1e-4);
  EXPECT_LT(s.v[0], v1);
  EXPECT_EQ(s.v_hat[0], v1);
}

TEST(Amsgrad, SecondMomentMaxIsMonotone) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  AmsgradState s(16);
  std::vector<double> p(16, 0.0), grad(16);
  for (int step = 0; step < 2000; ++step) {
    const double scale = std::exp(3.0 * std::sin(step * 0.01));
    for (double& x : grad) x = scale * g(rng);
    const auto prev = s.v_hat;
    amsgrad_step(s, p, grad, 1e-3);
    for (std::size_t i = 0; i < 16; ++i) {
      ASSERT_GE(s.v_hat[i], prev[i]);
      ASSERT_GE(s.v[i], 0.0);
    }
  }
}

TEST(Amsgrad, RejectsBadInputWithoutSideEffects) {
  AmsgradState s(2);
  std::vector<double> p{1, 2};
  amsgrad_step(s, p, std::vector<double>{0.5, 0.5}, 1e-2);
  const AmsgradState saved = s;
  const auto saved_p = p;
  for (double bad : {std::nan(""), std::numeric_limits<double>::infinity()}) {
    expect_code(ErrorCode::NonFiniteGradient,
                [&] { amsgrad_step(s, p, std::vector<double>{0.1, bad}, 1e-2); });
    EXPECT_TRUE(s == saved);
    EXPECT_EQ(p, saved_p);
  }
  EXPECT_THROW(amsgrad_step(s, p, std::vector<double>{0.1}, 1e-2), Error);
}

TEST(Amsgrad, StateJsonRoundTrip) {
  AmsgradState s(3);
  std::vector<double> p{1, 2, 3};
  amsgrad_step(s, p, std::vector<double>{0.3, -1e-7, 12}, 1e-2);
  amsgrad_step(s, p, std::vector<double>{0.1, 2, -0.25}, 1e-2);
  EXPECT_TRUE(amsgrad_state_from_json(nlohmann::json::parse(to_json(s).dump())) == s);
}

// ---- configuration -------------------------------------------------------

TEST(TrainConfig, Validation) {
  validate(TrainConfig{});
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    EXPECT_THROW(validate(c), Error);
  };
  bad([](TrainConfig& c) { c.epochs = 0; });
  bad([](TrainConfig& c) { c.batch_size = c.dataset_size + 1; });
  bad([](TrainConfig& c) { c.gen_lr = 0; });
  bad([](TrainConfig& c) { c.repeats = 0; });
  bad([](TrainConfig& c) { c.amsgrad.beta2 = 1.0; });
  bad([](TrainConfig& c) { c.theta_init_range = -1; });
}

TEST(TrainConfig, InitialAnglesStayInRange) {
  const TrainConfig c;
  const auto t = initial_theta(500, c, 7);
  EXPECT_EQ(t, initial_theta(500, c, 7));
  EXPECT_NE(t, initial_theta(500, c, 8));
  for (double x : t) {
    EXPECT_GE(x, -0.01);
    EXPECT_LE(x, 0.01);
  }
}

TEST(Grid, InputsSpanUnitInterval) {
  EXPECT_EQ(grid_inputs(2), (std::vector<double>{0.0, 1.0 / 3, 2.0 / 3, 1.0}));
  EXPECT_EQ(grid_inputs(1), (std::vector<double>{0.0, 1.0}));
}

// ---- training ----------------------------------------------------------------

TEST(Train, TraceShapesAndNormalization) {
  TrainConfig c = tiny_config();
  c.epochs = 1;
  const Circuit circ = build_circuit(spec_of({BlockKind::CzRxRy}), 2);
  const auto target = discretize_target(TargetFamily::lognormal(1, 1), 2);
  GeneratorModel gen(circ, initial_theta(circ.n_params(), c, 1));
  const auto t = train(gen, Discriminator(c.discriminator, 2), target, c, 1);
  EXPECT_EQ(t.discriminator_loss.size(), 1U);
  EXPECT_EQ(t.generator_loss.size(), 1U);
  EXPECT_EQ(t.kl_divergence.size(), 1U);
  EXPECT_EQ(t.ks_statistic.size(), 1U);
  EXPECT_EQ(t.final_theta.size(), circ.n_params());
  double sum = 0.0;
  for (double p : t.final_distribution) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-9);
  EXPECT_EQ(t.final_kl(), kl_divergence(t.final_distribution, target.probs));
}

TEST(Train, RecordedDistributionsStayNormalized) {
  TrainConfig c = tiny_config();
  c.epochs = 8;
  c.gen_lr = 0.05;
  const Circuit circ = build_circuit(spec_of({BlockKind::CzRxRyRz, BlockKind::CzRx}), 3);
  const auto target = discretize_target(TargetFamily::lognormal(1, 1), 3);
  const auto t = train(GeneratorModel(circ, initial_theta(circ.n_params(), c, 3)),
                       Discriminator(c.discriminator, 4), target, c, 3);
  for (double kl : t.kl_divergence) {
    EXPECT_TRUE(std::isfinite(kl));
    EXPECT_GE(kl, 0.0);
  }
  double sum = 0.0;
  for (double p : t.final_distribution) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-9);
  EXPECT_NE(t.final_theta, t.initial_theta);
}

TEST(Train, FixedSeedIsBitIdentical) {
  const TrainConfig c = tiny_config();
  const Circuit circ = build_circuit(spec_of({BlockKind::CzRxRy, BlockKind::CzOnly}), 3);
  const auto target = discretize_target(TargetFamily::normal(3, 1.5), 3);
  auto run = [&](std::uint64_t seed) {
    return train(GeneratorModel(circ, initial_theta(circ.n_params(), c, seed)),
                 Discriminator(c.discriminator, seed), target, c, seed);
  };
  const auto a = run(11), b = run(11), other = run(12);
  EXPECT_EQ(a.discriminator_loss, b.discriminator_loss);
  EXPECT_EQ(a.generator_loss, b.generator_loss);
  EXPECT_EQ(a.kl_divergence, b.kl_divergence);
  EXPECT_EQ(a.final_theta, b.final_theta);
  EXPECT_TRUE(a.final_discriminator == b.final_discriminator);
  EXPECT_NE(a.discriminator_loss, other.discriminator_loss);
}

TEST(Train, RejectsMismatchedWidths) {
  const TrainConfig c = tiny_config();
  const Circuit circ = build_circuit(spec_of({BlockKind::CzRx}), 2);
  const auto target = discretize_target(TargetFamily::uniform(), 3);
  expect_code(ErrorCode::InvalidQubitCount, [&] {
    train(GeneratorModel(circ, std::vector<double>(circ.n_params(), 0.0)),
          Discriminator(c.discriminator, 1), target, c, 1);
  });
}

TEST(Train, DiscriminatorLossFallsAgainstFrozenGenerator) {
  // The training batch layout: real rows weighted 1/B with label 1, and the
  // full grid weighted by the generator's probabilities with label 0.
  const int n = 3;
  const auto target = discretize_target(TargetFamily::lognormal(1, 1), n);
  const Circuit circ = build_circuit(spec_of({BlockKind::CzRxRy, BlockKind::CzRxRyRz}), n);
  const auto grid = grid_inputs(n);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::vector<double> theta(circ.n_params());
    for (double& t : theta) t = angle(rng);
    const auto p = generator_distribution(GeneratorModel(circ, theta));

    std::discrete_distribution<int> draw(target.probs.begin(), target.probs.end());
    const int real_rows = 200;
    BceBatch batch;
    for (int i = 0; i < real_rows; ++i) {
      batch.inputs.push_back(grid[static_cast<std::size_t>(draw(rng))]);
      batch.labels.push_back(1.0);
      batch.weights.push_back(1.0 / real_rows);
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      batch.inputs.push_back(grid[k]);
      batch.labels.push_back(0.0);
      batch.weights.push_back(p[k]);
    }

    Discriminator net(DiscriminatorOptions{}, seed);
    AmsgradState opt(net.parameters().size());
    // Loss averaged over a fixed set of dropout masks.
    auto mean_loss = [&] {
      double total = 0.0;
      for (std::uint64_t m = 0; m < 32; ++m) total += net.train_loss(batch, mix_seed(~seed, m));
      return total / 32.0;
    };
    const double before = mean_loss();
    for (int step = 0; step < 50; ++step) {
      const auto g = net.loss_and_gradients(batch, mix_seed(seed, static_cast<std::uint64_t>(step)));
      net.commit_batch_statistics(g);
      amsgrad_step(opt, net.parameters(), g.grad, 1e-5);
    }
    EXPECT_LT(mean_loss(), before) << "seed " << seed;
  }
}

// ---- repeats -----------------------------------------------------------------

TEST(Repeats, SingleRepeatSummaryEqualsTrace) {
  const TrainConfig c = tiny_config();
  const Circuit circ = build_circuit(spec_of({BlockKind::CzRxRy}), 2);
  const auto target = discretize_target(TargetFamily::lognormal(1, 1), 2);
  const auto r = train_repeats(circ, target, c, 5, 1);
  ASSERT_EQ(r.traces.size(), 1U);
  EXPECT_EQ(r.summary.kl_mean, r.traces[0].final_kl());
  EXPECT_EQ(r.summary.kl_min, r.traces[0].final_kl());
  EXPECT_EQ(r.summary.kl_max, r.traces[0].final_kl());
  EXPECT_EQ(r.summary.median_index, 0U);
}

TEST(Repeats, DeterministicAndOrdered) {
  TrainConfig c = tiny_config();
  c.epochs = 2;
  const Circuit circ = build_circuit(spec_of({BlockKind::CzRxRy}), 2);
  const auto target = discretize_target(TargetFamily::lognormal(1, 1), 2);
  const auto a = train_repeats(circ, target, c, 9, 10);
  c.threads = 3;
  const auto b = train_repeats(circ, target, c, 9, 10);
  ASSERT_EQ(a.traces.size(), 10U);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(a.traces[i].kl_divergence, b.traces[i].kl_divergence);
    EXPECT_EQ(a.traces[i].seed, repeat_seed(9, static_cast<int>(i)));
  }
  EXPECT_EQ(a.summary.kl_mean, b.summary.kl_mean);
  EXPECT_EQ(a.summary.median_index, b.summary.median_index);
  EXPECT_LE(a.summary.kl_min, a.summary.kl_mean);
  EXPECT_LE(a.summary.kl_mean, a.summary.kl_max);
}

TEST(Repeats, LowerMedianIsSelected) {
  std::vector<TrainingTrace> traces(4);
  const double kls[] = {0.4, 0.1, 0.3, 0.2};
  for (std::size_t i = 0; i < 4; ++i) traces[i].kl_divergence = {kls[i]};
  const auto s = summarize(traces);
  EXPECT_EQ(s.median_index, 3U);  // sorted: 0.1, 0.2, 0.3, 0.4
  EXPECT_DOUBLE_EQ(s.kl_mean, 0.25);
  EXPECT_EQ(s.kl_min, 0.1);
  EXPECT_EQ(s.kl_max, 0.4);
  EXPECT_THROW(summarize(std::span<const TrainingTrace>{}), Error);
}

}  // namespace
}  // namespace qas
