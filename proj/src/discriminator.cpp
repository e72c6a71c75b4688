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

#include "qas/discriminator.hpp"

#include <algorithm>
#include <cmath>

#include "qas/error.hpp"
#include "qas/random.hpp"

namespace qas {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double weight_of(std::span<const double> weights, std::size_t i, std::size_t n) {
  return weights.empty() ? 1.0 / static_cast<double>(n) : weights[i];
}

Eigen::Map<const Eigen::RowVectorXd> as_row(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

double bce_loss(std::span<const double> outputs, std::span<const double> labels,
                std::span<const double> weights) {
  if (outputs.size() != labels.size() || (!weights.empty() && weights.size() != outputs.size())) {
    throw Error(ErrorCode::LengthMismatch, "bce_loss inputs differ in length");
  }
  const std::size_t n = outputs.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double o = std::clamp(outputs[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    const double y = labels[i];
    loss -= weight_of(weights, i, n) * (y * std::log(o) + (1.0 - y) * std::log(1.0 - o));
  }
  return loss;
}

Discriminator::Discriminator(DiscriminatorOptions options, std::uint64_t init_seed)
    : options_(std::move(options)) {
  const auto& w = options_.widths;
  if (w.size() < 2 || w.back() != 1 || std::any_of(w.begin(), w.end(), [](int x) { return x < 1; })) {
    throw Error(ErrorCode::InvalidArgument, "discriminator widths must be positive and end in 1");
  }
  if (options_.dropout < 0.0 || options_.dropout > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "dropout rate outside [0, 1]");
  }

  std::size_t cursor = 0;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    const auto in = static_cast<std::size_t>(w[l]);
    const auto out = static_cast<std::size_t>(w[l + 1]);
    Offsets o{};
    o.weight = cursor;
    cursor += in * out;
    o.bias = cursor;
    cursor += out;
    const bool hidden = l + 2 < w.size();
    o.gamma = cursor;
    cursor += hidden ? out : 0;
    o.beta = cursor;
    cursor += hidden ? out : 0;
    offsets_.push_back(o);
    if (hidden) {
      running_mean_.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out)));
      running_var_.push_back(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(out)));
    }
  }
  params_.assign(cursor, 0.0);

  Rng rng(init_seed);
  for (std::size_t l = 0; l < offsets_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w[l]));
    const std::size_t count = static_cast<std::size_t>(w[l]) * static_cast<std::size_t>(w[l + 1]);
    for (std::size_t i = 0; i < count; ++i) params_[offsets_[l].weight + i] = rng.uniform(-bound, bound);
    if (l < hidden_layers()) gamma(l).setOnes();
  }
}

Eigen::Map<Eigen::MatrixXd> Discriminator::weight(std::size_t l) {
  return {params_.data() + offsets_.at(l).weight, options_.widths[l + 1], options_.widths[l]};
}
Eigen::Map<const Eigen::MatrixXd> Discriminator::weight(std::size_t l) const {
  return {params_.data() + offsets_.at(l).weight, options_.widths[l + 1], options_.widths[l]};
}
Eigen::Map<Eigen::VectorXd> Discriminator::bias(std::size_t l) {
  return {params_.data() + offsets_.at(l).bias, options_.widths[l + 1]};
}
Eigen::Map<const Eigen::VectorXd> Discriminator::bias(std::size_t l) const {
  return {params_.data() + offsets_.at(l).bias, options_.widths[l + 1]};
}
Eigen::Map<Eigen::VectorXd> Discriminator::gamma(std::size_t l) {
  return {params_.data() + offsets_.at(l).gamma, options_.widths[l + 1]};
}
Eigen::Map<const Eigen::VectorXd> Discriminator::gamma(std::size_t l) const {
  return {params_.data() + offsets_.at(l).gamma, options_.widths[l + 1]};
}
Eigen::Map<Eigen::VectorXd> Discriminator::beta(std::size_t l) {
  return {params_.data() + offsets_.at(l).beta, options_.widths[l + 1]};
}
Eigen::Map<const Eigen::VectorXd> Discriminator::beta(std::size_t l) const {
  return {params_.data() + offsets_.at(l).beta, options_.widths[l + 1]};
}

std::vector<double> Discriminator::forward_infer(std::span<const double> inputs) const {
  const double slope = options_.leaky_slope;
  Eigen::MatrixXd a = as_row(inputs);
  for (std::size_t l = 0; l < hidden_layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * a;
    z.colwise() += bias(l);
    z = (z.array() > 0.0).select(z, slope * z);
    const Eigen::ArrayXd inv_std = (running_var_[l].array() + options_.bn_eps).rsqrt();
    const Eigen::ArrayXd scale = gamma(l).array() * inv_std;
    const Eigen::ArrayXd shift = beta(l).array() - running_mean_[l].array() * scale;
    a = ((z.array().colwise() * scale).colwise() + shift).matrix();
  }
  const std::size_t out = hidden_layers();
  const Eigen::RowVectorXd z = (weight(out) * a).array() + bias(out)[0];
  std::vector<double> o(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) o[static_cast<std::size_t>(i)] = sigmoid(z[i]);
  return o;
}

std::vector<double> Discriminator::forward_train(std::span<const double> inputs,
                                                 std::uint64_t seed) const {
  const auto batch = static_cast<Eigen::Index>(inputs.size());
  if (batch < 2) {
    throw Error(ErrorCode::BatchTooSmall, "Train-mode BatchNorm needs at least two rows");
  }
  const double slope = options_.leaky_slope;
  const double p = options_.dropout;
  const double keep_scale = p >= 1.0 ? 0.0 : 1.0 / (1.0 - p);
  std::vector<LayerCache>& layers = workspace_.layers;
  layers.resize(hidden_layers() + 1);
  layers[0].input = as_row(inputs);

  for (std::size_t l = 0; l < hidden_layers(); ++l) {
    LayerCache& c = layers[l];
    const Eigen::Index rows = options_.widths[l + 1];
    const double* b = bias(l).data();
    c.pre.resize(rows, batch);
    c.normalized.resize(rows, batch);
    c.mask.resize(rows, batch);
    Eigen::MatrixXd& a = layers[l + 1].input;
    a.resize(rows, batch);

    if (c.input.rows() == 1) {
      // A single input feature makes the product an outer product.
      const double* w = weight(l).data();
      for (Eigen::Index j = 0; j < batch; ++j) {
        const double x = c.input(0, j);
        double* pre = c.pre.col(j).data();
        for (Eigen::Index i = 0; i < rows; ++i) pre[i] = w[i] * x;
      }
    } else {
      c.pre.noalias() = weight(l) * c.input;
    }

    // Fused passes over the (out x B) activations: LeakyReLU and row sums,
    // centred second moments, then normalize, scale, shift and drop.
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(rows);
    for (Eigen::Index j = 0; j < batch; ++j) {
      double* pre = c.pre.col(j).data();
      double* h = c.normalized.col(j).data();
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double z = pre[i] + b[i];
        pre[i] = z;
        h[i] = z > 0.0 ? z : slope * z;
        sum[i] += h[i];
      }
    }
    c.mean = sum.matrix() / static_cast<double>(batch);
    Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(rows);
    const double* mean = c.mean.data();
    for (Eigen::Index j = 0; j < batch; ++j) {
      const double* h = c.normalized.col(j).data();
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double d = h[i] - mean[i];
        sq[i] += d * d;
      }
    }
    c.var = sq.matrix() / static_cast<double>(batch);
    c.inv_std = (c.var.array() + options_.bn_eps).rsqrt();

    Rng rng(mix_seed(seed, l));
    double* m = c.mask.data();
    for (Eigen::Index i = 0; i < c.mask.size(); ++i) {
      m[i] = (p > 0.0 && rng.uniform() < p) ? 0.0 : keep_scale;
    }
    const double* inv_std = c.inv_std.data();
    const double* g = gamma(l).data();
    const double* be = beta(l).data();
    for (Eigen::Index j = 0; j < batch; ++j) {
      double* h = c.normalized.col(j).data();
      const double* mk = c.mask.col(j).data();
      double* out = a.col(j).data();
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double xhat = (h[i] - mean[i]) * inv_std[i];
        h[i] = xhat;
        out[i] = (g[i] * xhat + be[i]) * mk[i];
      }
    }
  }
  const std::size_t out = hidden_layers();
  const Eigen::RowVectorXd z = (weight(out) * layers[out].input).array() + bias(out)[0];
  std::vector<double> o(static_cast<std::size_t>(batch));
  for (Eigen::Index i = 0; i < batch; ++i) o[static_cast<std::size_t>(i)] = sigmoid(z[i]);
  return o;
}

std::vector<double> Discriminator::forward(std::span<const double> inputs,
                                           std::optional<std::uint64_t> seed) {
  if (mode_ == Mode::Infer) return forward_infer(inputs);
  if (!seed) throw Error(ErrorCode::InvalidArgument, "Train-mode forward needs a dropout seed");
  auto out = forward_train(inputs, *seed);
  Gradients stats;
  stats.batch_size = inputs.size();
  for (std::size_t l = 0; l < hidden_layers(); ++l) {
    stats.batch_mean.push_back(workspace_.layers[l].mean);
    stats.batch_var.push_back(workspace_.layers[l].var);
  }
  commit_batch_statistics(stats);
  return out;
}

std::vector<double> Discriminator::predict(std::span<const double> inputs) const {
  return forward_infer(inputs);
}

double Discriminator::train_loss(const BceBatch& batch, std::uint64_t seed) const {
  const auto out = forward_train(batch.inputs, seed);
  return bce_loss(out, batch.labels, batch.weights);
}

Discriminator::Gradients Discriminator::loss_and_gradients(const BceBatch& batch,
                                                           std::uint64_t seed) const {
  const std::size_t n = batch.inputs.size();
  if (batch.labels.size() != n || (!batch.weights.empty() && batch.weights.size() != n)) {
    throw Error(ErrorCode::LengthMismatch, "BCE batch columns differ in length");
  }
  Gradients g;
  g.outputs = forward_train(batch.inputs, seed);
  const std::vector<LayerCache>& cache = workspace_.layers;
  g.loss = bce_loss(g.outputs, batch.labels, batch.weights);
  g.grad.assign(params_.size(), 0.0);
  g.batch_size = n;

  const auto B = static_cast<Eigen::Index>(n);
  // dL/dz at the output pre-activation; zero where the loss clamp is active.
  Eigen::RowVectorXd dz(B);
  for (std::size_t i = 0; i < n; ++i) {
    const double o = g.outputs[i];
    const bool clamped = o <= kProbabilityClamp || o >= 1.0 - kProbabilityClamp;
    dz[static_cast<Eigen::Index>(i)] =
        clamped ? 0.0 : weight_of(batch.weights, i, n) * (o - batch.labels[i]);
  }

  const std::size_t out = hidden_layers();
  const auto& w = options_.widths;
  {
    Eigen::Map<Eigen::MatrixXd> dw(g.grad.data() + offsets_[out].weight, 1, w[out]);
    dw = dz * cache[out].input.transpose();
    g.grad[offsets_[out].bias] = dz.sum();
  }
  Eigen::MatrixXd& da = workspace_.delta;
  da.noalias() = weight(out).transpose() * dz;

  const double slope = options_.leaky_slope;
  const double inv_b = 1.0 / static_cast<double>(B);
  for (std::size_t l = hidden_layers(); l-- > 0;) {
    const LayerCache& c = cache[l];
    const Eigen::Index rows = w[l + 1];
    // Dropout, then the BatchNorm affine gradients. Their row sums are also
    // the two reductions the BatchNorm input gradient needs.
    Eigen::ArrayXd sum_dy = Eigen::ArrayXd::Zero(rows);
    Eigen::ArrayXd sum_dy_xhat = Eigen::ArrayXd::Zero(rows);
    for (Eigen::Index j = 0; j < B; ++j) {
      double* d = da.col(j).data();
      const double* mk = c.mask.col(j).data();
      const double* xhat = c.normalized.col(j).data();
      for (Eigen::Index i = 0; i < rows; ++i) {
        d[i] *= mk[i];
        sum_dy[i] += d[i];
        sum_dy_xhat[i] += d[i] * xhat[i];
      }
    }
    Eigen::Map<Eigen::VectorXd>(g.grad.data() + offsets_[l].gamma, rows) = sum_dy_xhat.matrix();
    Eigen::Map<Eigen::VectorXd>(g.grad.data() + offsets_[l].beta, rows) = sum_dy.matrix();

    // dh = gamma * inv_std / B * (B dy - sum(dy) - xhat * sum(dy xhat)),
    // then through the LeakyReLU.
    const Eigen::ArrayXd scale = gamma(l).array() * c.inv_std.array() * inv_b;
    const double batch_size = static_cast<double>(B);
    const Eigen::MatrixXd& dpre = da;
    for (Eigen::Index j = 0; j < B; ++j) {
      double* d = da.col(j).data();
      const double* xhat = c.normalized.col(j).data();
      const double* pre = c.pre.col(j).data();
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double dh = scale[i] * (batch_size * d[i] - sum_dy[i] - xhat[i] * sum_dy_xhat[i]);
        d[i] = pre[i] > 0.0 ? dh : slope * dh;
      }
    }
    Eigen::Map<Eigen::MatrixXd>(g.grad.data() + offsets_[l].weight, w[l + 1], w[l]).noalias() =
        dpre * c.input.transpose();
    Eigen::Map<Eigen::VectorXd>(g.grad.data() + offsets_[l].bias, rows) = dpre.rowwise().sum();
    if (l > 0) {
      workspace_.delta_next.noalias() = weight(l).transpose() * dpre;
      da.swap(workspace_.delta_next);
    }
  }

  for (std::size_t l = 0; l < hidden_layers(); ++l) {
    g.batch_mean.push_back(cache[l].mean);
    g.batch_var.push_back(cache[l].var);
  }
  return g;
}

void Discriminator::commit_batch_statistics(const Gradients& g) {
  if (g.batch_mean.size() != hidden_layers() || g.batch_var.size() != hidden_layers()) {
    throw Error(ErrorCode::LengthMismatch, "batch statistics do not match the layer count");
  }
  const double m = options_.bn_momentum;
  const double n = static_cast<double>(g.batch_size);
  const double unbias = n > 1 ? n / (n - 1.0) : 1.0;
  for (std::size_t l = 0; l < hidden_layers(); ++l) {
    running_mean_[l] = (1.0 - m) * running_mean_[l] + m * g.batch_mean[l];
    running_var_[l] = (1.0 - m) * running_var_[l] + (m * unbias) * g.batch_var[l];
  }
}

nlohmann::json Discriminator::to_json() const {
  nlohmann::json j;
  j["widths"] = options_.widths;
  j["dropout"] = options_.dropout;
  j["leaky_slope"] = options_.leaky_slope;
  j["bn_momentum"] = options_.bn_momentum;
  j["bn_eps"] = options_.bn_eps;
  j["mode"] = mode_ == Mode::Train ? "train" : "infer";
  j["parameters"] = std::vector<double>(params_.begin(), params_.end());
  auto& rm = j["running_mean"] = nlohmann::json::array();
  auto& rv = j["running_var"] = nlohmann::json::array();
  for (std::size_t l = 0; l < hidden_layers(); ++l) {
    rm.push_back(std::vector<double>(running_mean_[l].begin(), running_mean_[l].end()));
    rv.push_back(std::vector<double>(running_var_[l].begin(), running_var_[l].end()));
  }
  return j;
}

Discriminator Discriminator::from_json(const nlohmann::json& j) {
  DiscriminatorOptions opts;
  opts.widths = j.at("widths").get<std::vector<int>>();
  opts.dropout = j.at("dropout").get<double>();
  opts.leaky_slope = j.at("leaky_slope").get<double>();
  opts.bn_momentum = j.at("bn_momentum").get<double>();
  opts.bn_eps = j.at("bn_eps").get<double>();
  Discriminator d(opts, 0);
  d.mode_ = j.at("mode").get<std::string>() == "infer" ? Mode::Infer : Mode::Train;
  auto params = j.at("parameters").get<std::vector<double>>();
  if (params.size() != d.params_.size()) {
    throw Error(ErrorCode::LengthMismatch, "checkpoint parameter count does not match widths");
  }
  d.params_.assign(params.begin(), params.end());
  const auto& rm = j.at("running_mean");
  const auto& rv = j.at("running_var");
  if (rm.size() != d.hidden_layers() || rv.size() != d.hidden_layers()) {
    throw Error(ErrorCode::LengthMismatch, "checkpoint running statistics do not match widths");
  }
  for (std::size_t l = 0; l < d.hidden_layers(); ++l) {
    const auto mean = rm[l].get<std::vector<double>>();
    const auto var = rv[l].get<std::vector<double>>();
    if (mean.size() != static_cast<std::size_t>(d.running_mean_[l].size()) ||
        var.size() != mean.size()) {
      throw Error(ErrorCode::LengthMismatch, "running statistics width mismatch");
    }
    d.running_mean_[l] = Eigen::Map<const Eigen::VectorXd>(mean.data(), d.running_mean_[l].size());
    d.running_var_[l] = Eigen::Map<const Eigen::VectorXd>(var.data(), d.running_var_[l].size());
  }
  return d;
}

bool operator==(const Discriminator& a, const Discriminator& b) {
  if (!(a.options_ == b.options_) || a.mode_ != b.mode_ || a.params_ != b.params_) return false;
  for (std::size_t l = 0; l < a.hidden_layers(); ++l) {
    if (a.running_mean_[l] != b.running_mean_[l] || a.running_var_[l] != b.running_var_[l]) {
      return false;
    }
  }
  return true;
}

}  // namespace qas
