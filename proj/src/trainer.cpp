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

#include "qas/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <numeric>
#include <regex>
#include <thread>

#include <fmt/format.h>

#include "qas/error.hpp"
#include "qas/random.hpp"

namespace qas {

namespace {

std::vector<double> normalized_clamped(std::span<const double> p) {
  std::vector<double> out(p.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = std::max(p[i], kKlClamp);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

double density(const TargetFamily& f, double x) {
  const double s = f.sigma;
  switch (f.kind) {
    case TargetKind::Lognormal: {
      if (x <= 0.0) return 0.0;
      const double z = (std::log(x) - f.mu) / s;
      return std::exp(-0.5 * z * z) / (x * s * std::sqrt(2.0 * std::numbers::pi));
    }
    case TargetKind::Normal: {
      const double z = (x - f.mu) / s;
      return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
    }
    case TargetKind::Uniform:
      return 1.0;
    case TargetKind::Custom:
      break;
  }
  return 0.0;
}

std::vector<double> sample_dataset(const TargetDistribution& target, int count, Rng& rng) {
  std::vector<double> cdf(target.probs.size());
  std::partial_sum(target.probs.begin(), target.probs.end(), cdf.begin());
  const double denom = static_cast<double>(target.probs.size() - 1);
  std::vector<double> data(static_cast<std::size_t>(count));
  for (double& x : data) {
    const double u = rng.uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t k =
        std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    x = denom > 0 ? static_cast<double>(k) / denom : 0.0;
  }
  return data;
}

}  // namespace

std::string to_string(const TargetFamily& f) {
  switch (f.kind) {
    case TargetKind::Lognormal: return fmt::format("lognormal({}, {})", f.mu, f.sigma);
    case TargetKind::Normal: return fmt::format("normal({}, {})", f.mu, f.sigma);
    case TargetKind::Uniform: return "uniform";
    case TargetKind::Custom: return fmt::format("custom({})", fmt::join(f.custom, ", "));
  }
  return "?";
}

TargetFamily parse_target_family(std::string_view text) {
  static const std::regex call_re(R"(^\s*([a-zA-Z]+)\s*(?:\(([^)]*)\))?\s*$)");
  const std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, call_re)) {
    throw Error(ErrorCode::InvalidArgument, "cannot parse target '" + s + "'");
  }
  std::string name = m[1].str();
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  std::vector<double> args;
  if (m[2].matched) {
    static const std::regex num_re(R"([^,\s]+)");
    const std::string inner = m[2].str();
    for (auto it = std::sregex_iterator(inner.begin(), inner.end(), num_re); it != std::sregex_iterator(); ++it) {
      std::size_t used = 0;
      const std::string token = it->str();
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw Error(ErrorCode::InvalidArgument, "bad number '" + token + "' in target");
      }
      args.push_back(v);
    }
  }
  auto want = [&](std::size_t n) {
    if (args.size() != n) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("target '{}' takes {} argument(s)", name, n));
    }
  };
  if (name == "lognormal") {
    want(2);
    return TargetFamily::lognormal(args[0], args[1]);
  }
  if (name == "normal") {
    want(2);
    return TargetFamily::normal(args[0], args[1]);
  }
  if (name == "uniform") {
    want(0);
    return TargetFamily::uniform();
  }
  if (name == "custom") {
    if (args.empty()) throw Error(ErrorCode::InvalidArgument, "custom target needs masses");
    return TargetFamily::from_masses(std::move(args));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown target family '" + name + "'");
}

TargetDistribution discretize_target(const TargetFamily& family, int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw Error(ErrorCode::InvalidQubitCount, "n_qubits = " + std::to_string(n_qubits));
  }
  const std::size_t dim = std::size_t{1} << n_qubits;
  TargetDistribution t{n_qubits, std::vector<double>(dim, 0.0), family};
  if (family.kind == TargetKind::Custom) {
    if (family.custom.size() != dim) {
      throw Error(ErrorCode::LengthMismatch, "custom target needs one mass per grid point");
    }
    t.probs = family.custom;
  } else {
    if ((family.kind == TargetKind::Lognormal || family.kind == TargetKind::Normal) &&
        !(family.sigma > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
    }
    for (std::size_t k = 0; k < dim; ++k) t.probs[k] = density(family, static_cast<double>(k));
  }
  double total = 0.0;
  for (double p : t.probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorCode::DegenerateTarget, "target masses must be finite and nonnegative");
    }
    total += p;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateTarget, "target has no mass on the grid");
  for (double& p : t.probs) p /= total;
  return t;
}

double kl_divergence(std::span<const double> trained, std::span<const double> target) {
  if (trained.size() != target.size()) {
    throw Error(ErrorCode::LengthMismatch, "KL arguments differ in length");
  }
  const auto p = normalized_clamped(trained);
  const auto q = normalized_clamped(target);
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) kl += p[k] * std::log(p[k] / q[k]);
  return std::max(kl, 0.0);
}

double ks_statistic(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::LengthMismatch, "KS arguments differ in length");
  double cp = 0.0, cq = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    cp += p[k];
    cq += q[k];
    worst = std::max(worst, std::abs(cp - cq));
  }
  return worst;
}

void validate(const TrainConfig& c) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidArgument, why); };
  if (c.epochs < 1) fail("epochs must be >= 1");
  if (c.batch_size < 1) fail("batch_size must be >= 1");
  if (c.dataset_size < 1) fail("dataset_size must be >= 1");
  if (c.batch_size > c.dataset_size) fail("batch_size must not exceed dataset_size");
  if (!(c.gen_lr > 0.0) || !(c.disc_lr > 0.0)) fail("learning rates must be positive");
  if (c.repeats < 1) fail("repeats must be >= 1");
  if (c.disc_steps_per_batch < 0 || c.gen_steps_per_batch < 0) fail("step counts must be >= 0");
  if (!(c.amsgrad.beta1 >= 0.0 && c.amsgrad.beta1 < 1.0) ||
      !(c.amsgrad.beta2 >= 0.0 && c.amsgrad.beta2 < 1.0) || !(c.amsgrad.epsilon > 0.0)) {
    fail("AMSGRAD betas must lie in [0, 1) and epsilon must be positive");
  }
  if (!(c.theta_init_range >= 0.0)) fail("theta_init_range must be >= 0");
  if (c.threads < 0) fail("threads must be >= 0");
}

std::vector<double> grid_inputs(int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<double> x(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    x[k] = dim > 1 ? static_cast<double>(k) / static_cast<double>(dim - 1) : 0.0;
  }
  return x;
}

std::vector<double> initial_theta(std::size_t n_params, const TrainConfig& cfg, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x7e7a));
  std::vector<double> theta(n_params);
  for (double& t : theta) t = rng.uniform(-cfg.theta_init_range, cfg.theta_init_range);
  return theta;
}

TrainingTrace train(const GeneratorModel& gen, Discriminator net, const TargetDistribution& target,
                    const TrainConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  if (gen.n_qubits != target.n_qubits) {
    throw Error(ErrorCode::InvalidQubitCount, "generator and target widths differ");
  }
  const auto started = std::chrono::steady_clock::now();
  const std::size_t dim = target.probs.size();
  const std::vector<double> grid = grid_inputs(gen.n_qubits);

  GeneratorModel model = gen;
  TrainingTrace trace;
  trace.seed = seed;
  trace.initial_theta = model.theta;
  trace.initial_kl = kl_divergence(generator_distribution(model), target.probs);

  Rng data_rng(mix_seed(seed, 1));
  std::vector<double> dataset = sample_dataset(target, cfg.dataset_size, data_rng);
  Rng shuffle_rng(mix_seed(seed, 2));

  AmsgradState disc_opt(net.parameters().size());
  AmsgradState gen_opt(model.theta.size());
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t batches = dataset.size() / bs;
  std::uint64_t step = 0;

  BceBatch batch;
  batch.inputs.resize(bs + dim);
  batch.labels.assign(bs + dim, 0.0);
  batch.weights.resize(bs + dim);
  std::fill_n(batch.labels.begin(), bs, 1.0);
  std::fill_n(batch.weights.begin(), bs, 1.0 / static_cast<double>(bs));
  std::copy(grid.begin(), grid.end(), batch.inputs.begin() + static_cast<std::ptrdiff_t>(bs));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<double>(dataset));
    double disc_sum = 0.0, gen_sum = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      std::copy_n(dataset.begin() + static_cast<std::ptrdiff_t>(b * bs), bs, batch.inputs.begin());

      net.set_mode(Mode::Train);
      double disc_loss = 0.0;
      for (int s = 0; s < cfg.disc_steps_per_batch; ++s) {
        const auto p = generator_distribution(model);
        std::copy(p.begin(), p.end(), batch.weights.begin() + static_cast<std::ptrdiff_t>(bs));
        auto g = net.loss_and_gradients(batch, mix_seed(seed, 3, step++));
        net.commit_batch_statistics(g);
        amsgrad_step(disc_opt, net.parameters(), g.grad, cfg.disc_lr, cfg.amsgrad);
        disc_loss = g.loss;
      }

      net.set_mode(Mode::Infer);
      double gen_loss = 0.0;
      for (int s = 0; s < cfg.gen_steps_per_batch; ++s) {
        std::vector<double> d = net.predict(grid);
        for (double& x : d) x = std::clamp(x, kProbabilityClamp, 1.0);
        const auto gl = generator_loss_and_grad(model, d);
        amsgrad_step(gen_opt, model.theta, gl.grad, cfg.gen_lr, cfg.amsgrad);
        gen_loss = gl.loss;
      }
      disc_sum += disc_loss;
      gen_sum += gen_loss;
    }
    const double denom = batches > 0 ? static_cast<double>(batches) : 1.0;
    const auto p = generator_distribution(model);
    trace.discriminator_loss.push_back(disc_sum / denom);
    trace.generator_loss.push_back(gen_sum / denom);
    trace.kl_divergence.push_back(kl_divergence(p, target.probs));
    trace.ks_statistic.push_back(ks_statistic(p, target.probs));
  }

  net.set_mode(Mode::Infer);
  trace.final_theta = model.theta;
  trace.final_distribution = generator_distribution(model);
  trace.final_discriminator = std::move(net);
  trace.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return trace;
}

std::uint64_t repeat_seed(std::uint64_t master_seed, int repeat) {
  return mix_seed(master_seed, 0x5eed, static_cast<std::uint64_t>(repeat));
}

RepeatSummary summarize(std::span<const TrainingTrace> traces) {
  if (traces.empty()) throw Error(ErrorCode::InvalidArgument, "no traces to summarize");
  RepeatSummary s;
  std::vector<std::size_t> order(traces.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return traces[a].final_kl() < traces[b].final_kl();
  });
  s.median_index = order[(order.size() - 1) / 2];
  s.kl_min = traces[order.front()].final_kl();
  s.kl_max = traces[order.back()].final_kl();
  double total = 0.0;
  for (const auto& t : traces) total += t.final_kl();
  s.kl_mean = total / static_cast<double>(traces.size());
  return s;
}

RepeatResult train_repeats(const Circuit& ansatz, const TargetDistribution& target,
                           const TrainConfig& cfg, std::uint64_t master_seed, int repeats) {
  validate(cfg);
  if (repeats < 1) throw Error(ErrorCode::InvalidArgument, "repeats must be >= 1");
  auto run_one = [&](int r) {
    const std::uint64_t seed = repeat_seed(master_seed, r);
    GeneratorModel gen(ansatz, initial_theta(ansatz.n_params(), cfg, seed));
    Discriminator net(cfg.discriminator, mix_seed(seed, 0xd15c));
    return train(gen, std::move(net), target, cfg, seed);
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<int>(cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw);
  RepeatResult result;
  result.traces.resize(static_cast<std::size_t>(repeats));
  if (workers <= 1) {
    for (int r = 0; r < repeats; ++r) result.traces[static_cast<std::size_t>(r)] = run_one(r);
  } else {
    for (int first = 0; first < repeats; first += workers) {
      std::vector<std::future<TrainingTrace>> pending;
      for (int r = first; r < std::min(repeats, first + workers); ++r) {
        pending.push_back(std::async(std::launch::async, run_one, r));
      }
      for (std::size_t i = 0; i < pending.size(); ++i) {
        result.traces[static_cast<std::size_t>(first) + i] = pending[i].get();
      }
    }
  }
  result.summary = summarize(result.traces);
  return result;
}

}  // namespace qas
