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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qas/amsgrad.hpp"
#include "qas/discriminator.hpp"
#include "qas/generator.hpp"

namespace qas {

enum class TargetKind { Lognormal, Normal, Uniform, Custom };

struct TargetFamily {
  TargetKind kind = TargetKind::Lognormal;
  double mu = 1.0;
  double sigma = 1.0;
  std::vector<double> custom;  // Custom only: unnormalized mass per grid point

  static TargetFamily lognormal(double mu, double sigma) { return {TargetKind::Lognormal, mu, sigma, {}}; }
  static TargetFamily normal(double mu, double sigma) { return {TargetKind::Normal, mu, sigma, {}}; }
  static TargetFamily uniform() { return {TargetKind::Uniform, 0.0, 0.0, {}}; }
  static TargetFamily from_masses(std::vector<double> m) { return {TargetKind::Custom, 0.0, 0.0, std::move(m)}; }

  friend bool operator==(const TargetFamily&, const TargetFamily&) = default;
};

/// "lognormal(1, 1)", "normal(3.5, 1.2)", "uniform", "custom(0.1, 0.2, ...)".
std::string to_string(const TargetFamily& family);
TargetFamily parse_target_family(std::string_view text);

struct TargetDistribution {
  int n_qubits = 1;
  std::vector<double> probs;
  TargetFamily family;
};

/// Density at the integer grid points 0 .. 2^n - 1, normalized to sum 1.
TargetDistribution discretize_target(const TargetFamily& family, int n_qubits);

inline constexpr double kKlClamp = 1e-12;

/// sum_k p_k ln(p_k / q_k) with both arguments clamped below at 1e-12 and
/// renormalized. `trained` comes first, `target` second.
double kl_divergence(std::span<const double> trained, std::span<const double> target);

/// Largest absolute gap between the two cumulative distributions.
double ks_statistic(std::span<const double> p, std::span<const double> q);

struct TrainConfig {
  int epochs = 300;
  int batch_size = 2000;
  int dataset_size = 20000;
  double gen_lr = 1e-4;
  double disc_lr = 1e-4;
  AmsgradOptions amsgrad;
  int repeats = 10;
  int disc_steps_per_batch = 1;
  int gen_steps_per_batch = 1;
  /// Initial angles are drawn uniformly from [-theta_init_range, theta_init_range].
  double theta_init_range = 0.01;
  DiscriminatorOptions discriminator;
  /// Worker threads for independent repeats; 0 picks the hardware count.
  int threads = 0;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Throws InvalidArgument on invariant violations.
void validate(const TrainConfig& cfg);

struct TrainingTrace {
  std::uint64_t seed = 0;
  std::vector<double> discriminator_loss;
  std::vector<double> generator_loss;
  std::vector<double> kl_divergence;
  std::vector<double> ks_statistic;
  double initial_kl = 0.0;
  std::vector<double> initial_theta;
  std::vector<double> final_theta;
  std::vector<double> final_distribution;
  Discriminator final_discriminator{DiscriminatorOptions{{1, 1}, 0.0}, 0};
  double seconds = 0.0;

  double final_kl() const { return kl_divergence.empty() ? initial_kl : kl_divergence.back(); }
};

/// Normalized discriminator input for grid point k: k / (2^n - 1).
std::vector<double> grid_inputs(int n_qubits);

/// Angles for a fresh generator, drawn from `seed`.
std::vector<double> initial_theta(std::size_t n_params, const TrainConfig& cfg, std::uint64_t seed);

/// One adversarial run: per batch, one discriminator AMSGRAD step on the real
/// batch (label 1) plus the generator-weighted grid (label 0), then one
/// generator step on the non-saturating loss. KL is recorded per epoch.
TrainingTrace train(const GeneratorModel& gen, Discriminator net, const TargetDistribution& target,
                    const TrainConfig& cfg, std::uint64_t seed);

struct RepeatSummary {
  double kl_mean = 0.0;
  double kl_min = 0.0;
  double kl_max = 0.0;
  std::size_t median_index = 0;  // repeat whose final KL is the lower median
};

struct RepeatResult {
  std::vector<TrainingTrace> traces;
  RepeatSummary summary;
};

std::uint64_t repeat_seed(std::uint64_t master_seed, int repeat);

/// `repeats` independent runs with seeds derived from `master_seed`; each
/// draws its own initial angles and discriminator weights.
RepeatResult train_repeats(const Circuit& ansatz, const TargetDistribution& target,
                           const TrainConfig& cfg, std::uint64_t master_seed, int repeats);

RepeatSummary summarize(std::span<const TrainingTrace> traces);

}  // namespace qas
