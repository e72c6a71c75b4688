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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace qas {

struct DiscriminatorOptions {
  /// Input width, hidden widths, output width (must end in 1).
  std::vector<int> widths{1, 256, 128, 64, 32, 16, 1};
  double dropout = 0.3;
  double leaky_slope = 0.2;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;

  friend bool operator==(const DiscriminatorOptions&, const DiscriminatorOptions&) = default;
};

enum class Mode { Train, Infer };

/// Rows for one weighted binary cross-entropy evaluation. An empty weight
/// vector means 1/N per row.
struct BceBatch {
  std::vector<double> inputs;
  std::vector<double> labels;
  std::vector<double> weights;
};

inline constexpr double kProbabilityClamp = 1e-12;

/// -sum_i w_i [y_i ln o_i + (1 - y_i) ln(1 - o_i)], outputs clamped to
/// [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double> outputs, std::span<const double> labels,
                std::span<const double> weights = {});

/// Classical MLP discriminator. Each hidden layer is
/// linear -> LeakyReLU -> BatchNorm -> dropout; the output layer is
/// linear -> sigmoid.
///
/// All trainable values live in one flat buffer, layer by layer:
/// W (out x in, column-major), b, gamma, beta for each hidden layer, then the
/// output row w and scalar bias. Running BatchNorm statistics are kept apart.
class Discriminator {
 public:
  Discriminator(DiscriminatorOptions options, std::uint64_t init_seed);

  const DiscriminatorOptions& options() const noexcept { return options_; }
  Mode mode() const noexcept { return mode_; }
  void set_mode(Mode mode) noexcept { mode_ = mode; }

  std::size_t hidden_layers() const noexcept { return options_.widths.size() - 2; }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  Eigen::Map<Eigen::MatrixXd> weight(std::size_t layer);
  Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
  Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
  Eigen::Map<Eigen::VectorXd> gamma(std::size_t layer);
  Eigen::Map<Eigen::VectorXd> beta(std::size_t layer);
  Eigen::Map<const Eigen::VectorXd> gamma(std::size_t layer) const;
  Eigen::Map<const Eigen::VectorXd> beta(std::size_t layer) const;

  const Eigen::VectorXd& running_mean(std::size_t layer) const { return running_mean_.at(layer); }
  const Eigen::VectorXd& running_var(std::size_t layer) const { return running_var_.at(layer); }

  /// Train mode needs at least two rows and a dropout seed, and folds the
  /// batch statistics into the running estimates. Infer mode is pure.
  std::vector<double> forward(std::span<const double> inputs,
                              std::optional<std::uint64_t> seed = std::nullopt);

  /// Infer-mode evaluation regardless of the current mode.
  std::vector<double> predict(std::span<const double> inputs) const;

  /// Parameter-shaped storage at a fixed alignment. Eigen's vectorized
  /// kernels split work by address alignment, so storage whose alignment
  /// varied with the heap would make results vary in the last bits.
  using ParameterVector = std::vector<double, Eigen::aligned_allocator<double>>;

  struct Gradients {
    double loss = 0.0;
    ParameterVector grad;  // same layout as parameters()
    std::vector<double> outputs;
    std::vector<Eigen::VectorXd> batch_mean;
    std::vector<Eigen::VectorXd> batch_var;  // biased
    std::size_t batch_size = 0;
  };

  /// Train-mode forward and analytic backward for `batch`. Running
  /// statistics are left untouched; see commit_batch_statistics. Train-mode
  /// passes share scratch buffers, so one object must not run them from two
  /// threads at once.
  Gradients loss_and_gradients(const BceBatch& batch, std::uint64_t seed) const;

  /// Train-mode loss alone, sharing the dropout masks of the same seed.
  double train_loss(const BceBatch& batch, std::uint64_t seed) const;

  /// Momentum update of running mean and (unbiased) running variance.
  void commit_batch_statistics(const Gradients& g);

  nlohmann::json to_json() const;
  static Discriminator from_json(const nlohmann::json& j);

  friend bool operator==(const Discriminator& a, const Discriminator& b);

 private:
  // Intermediate values of one Train-mode pass through a hidden layer. The
  // final entry only carries the activation fed to the output layer.
  struct LayerCache {
    Eigen::MatrixXd input;       // in x B
    Eigen::MatrixXd pre;         // out x B, before LeakyReLU
    Eigen::MatrixXd normalized;  // out x B, BatchNorm x-hat
    Eigen::VectorXd inv_std;
    Eigen::MatrixXd mask;  // dropout keep-scale per element
    Eigen::VectorXd mean;
    Eigen::VectorXd var;
  };

  // Scratch reused across Train-mode passes so the large activation matrices
  // are not reallocated every step. Copies start empty.
  struct Workspace {
    std::vector<LayerCache> layers;
    Eigen::MatrixXd delta;  // backward gradient w.r.t. a layer's output
    Eigen::MatrixXd delta_next;

    Workspace() = default;
    Workspace(const Workspace&) {}
    Workspace(Workspace&&) noexcept = default;
    Workspace& operator=(const Workspace&) { return *this; }
    Workspace& operator=(Workspace&&) noexcept = default;
  };

  struct Offsets {
    std::size_t weight, bias, gamma, beta;
  };

  /// Fills workspace_.layers.
  std::vector<double> forward_train(std::span<const double> inputs, std::uint64_t seed) const;
  std::vector<double> forward_infer(std::span<const double> inputs) const;

  DiscriminatorOptions options_;
  Mode mode_ = Mode::Train;
  ParameterVector params_;
  std::vector<Offsets> offsets_;  // hidden layers then output layer
  std::vector<Eigen::VectorXd> running_mean_;
  std::vector<Eigen::VectorXd> running_var_;
  mutable Workspace workspace_;
};

}  // namespace qas
