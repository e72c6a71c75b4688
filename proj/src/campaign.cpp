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

#include "qas/campaign.hpp"

#include <chrono>
#include <cstdlib>

#include "qas/error.hpp"
#include "qas/random.hpp"

namespace qas {

namespace {

void config_invalid(const std::string& field, const std::string& reason) {
  throw Error(ErrorCode::ConfigInvalid, field + ": " + reason);
}

std::uint64_t iteration_seed(std::uint64_t master, int iteration) {
  return mix_seed(master, 0x17e4, static_cast<std::uint64_t>(iteration));
}

}  // namespace

bool operator==(const CampaignConfig& a, const CampaignConfig& b) {
  return a.n_qubits == b.n_qubits && a.blocks == b.blocks && a.max_iterations == b.max_iterations &&
         a.target == b.target && a.train == b.train && a.seed == b.seed &&
         a.proposer == b.proposer && a.llm.endpoint == b.llm.endpoint &&
         a.llm.model == b.llm.model && a.llm.timeout_seconds == b.llm.timeout_seconds &&
         a.llm.retries == b.llm.retries && a.llm.backoff_seconds == b.llm.backoff_seconds &&
         a.llm_api_key_env == b.llm_api_key_env && a.conversation == b.conversation &&
         a.plateau_window == b.plateau_window && a.plateau_tolerance == b.plateau_tolerance &&
         a.param_budget == b.param_budget && a.prompt_dir == b.prompt_dir;
}

void validate(const CampaignConfig& c) {
  if (c.n_qubits < 1 || c.n_qubits > kMaxQubits) config_invalid("n_qubits", "must be in 1..20");
  if (c.blocks < 1) config_invalid("blocks", "must be >= 1");
  if (c.max_iterations < 1) config_invalid("max_iterations", "must be >= 1");
  if (c.plateau_window < 0) config_invalid("plateau_window", "must be >= 0");
  if (!(c.plateau_tolerance >= 0.0)) config_invalid("plateau_tolerance", "must be >= 0");
  if (c.train.batch_size > c.train.dataset_size) {
    config_invalid("batch_size", "must not exceed dataset_size");
  }
  if (c.llm.retries < 0) config_invalid("llm_retries", "must be >= 0");
  if (!(c.llm.timeout_seconds > 0.0)) config_invalid("llm_timeout_seconds", "must be positive");
  if (!(c.llm.backoff_seconds >= 0.0)) config_invalid("llm_backoff_seconds", "must be >= 0");
  if (c.train.discriminator.widths.empty() || c.train.discriminator.widths.front() != 1) {
    config_invalid("disc_hidden_widths", "discriminator input width must be 1");
  }
  try {
    validate(c.train);
  } catch (const Error& e) {
    config_invalid("train", e.what());
  }
  try {
    discretize_target(c.target, c.n_qubits);
  } catch (const Error& e) {
    config_invalid("target", e.what());
  }
}

std::string_view to_string(ParseOutcome o) {
  switch (o) {
    case ParseOutcome::Parsed: return "parsed";
    case ParseOutcome::ParsedAfterRetry: return "parsed_after_retry";
    case ParseOutcome::Fallback: return "fallback";
  }
  return "?";
}

ParseOutcome parse_outcome_from_string(std::string_view s) {
  if (s == "parsed") return ParseOutcome::Parsed;
  if (s == "parsed_after_retry") return ParseOutcome::ParsedAfterRetry;
  if (s == "fallback") return ParseOutcome::Fallback;
  throw Error(ErrorCode::InvalidArgument, "unknown parse outcome '" + std::string(s) + "'");
}

double IterationRecord::final_kl() const {
  return feedback.entropy_values.empty() ? 0.0 : feedback.entropy_values.back();
}

bool operator==(const IterationRecord& a, const IterationRecord& b) {
  return a.iteration == b.iteration && a.spec == b.spec && a.parse_outcome == b.parse_outcome &&
         a.parse_errors == b.parse_errors && a.messages == b.messages && a.feedback == b.feedback &&
         a.repeat_final_kl == b.repeat_final_kl && a.summary.kl_mean == b.summary.kl_mean &&
         a.summary.kl_min == b.summary.kl_min && a.summary.kl_max == b.summary.kl_max &&
         a.summary.median_index == b.summary.median_index && a.train_seed == b.train_seed &&
         a.final_theta == b.final_theta && a.final_distribution == b.final_distribution &&
         a.discriminator == b.discriminator;
}

bool better_than(const IterationRecord& a, const IterationRecord& b) {
  if (a.final_kl() != b.final_kl()) return a.final_kl() < b.final_kl();
  if (a.feedback.ansatz_parameter_count != b.feedback.ansatz_parameter_count) {
    return a.feedback.ansatz_parameter_count < b.feedback.ansatz_parameter_count;
  }
  return a.feedback.ansatz_depth < b.feedback.ansatz_depth;
}

std::vector<std::size_t> best_history(const std::vector<IterationRecord>& iterations) {
  std::vector<std::size_t> best;
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    if (best.empty() || better_than(iterations[i], iterations[best.back()])) {
      best.push_back(i);
    } else {
      best.push_back(best.back());
    }
  }
  return best;
}

const IterationRecord* CampaignLog::best() const {
  return best_after.empty() ? nullptr : &iterations.at(best_after.back());
}

Conversation CampaignLog::conversation() const {
  Conversation c;
  for (const auto& it : iterations) c.insert(c.end(), it.messages.begin(), it.messages.end());
  return c;
}

std::string stop_reason(const CampaignConfig& cfg, const CampaignLog& log) {
  const auto n = log.iterations.size();
  if (n >= static_cast<std::size_t>(cfg.max_iterations)) return "max_iterations";
  const auto w = static_cast<std::size_t>(cfg.plateau_window);
  if (w > 0 && n > w) {
    const double before = log.iterations[log.best_after[n - 1 - w]].final_kl();
    const double now = log.iterations[log.best_after[n - 1]].final_kl();
    if (before - now < cfg.plateau_tolerance * before) return "plateau";
  }
  return {};
}

AnsatzSpec default_spec(int blocks) {
  AnsatzSpec spec;
  for (int i = 0; i < blocks; ++i) {
    spec.blocks.push_back(i % 2 == 0 ? BlockKind::CzRxRy : BlockKind::CzOnly);
  }
  return spec;
}

std::unique_ptr<Proposer> make_proposer(const CampaignConfig& cfg) {
  if (cfg.proposer == ProposerKind::Heuristic) {
    return std::make_unique<HeuristicProposer>(cfg.seed, cfg.param_budget);
  }
  RemoteLlmOptions opts = cfg.llm;
  if (opts.api_key.empty() && !cfg.llm_api_key_env.empty()) {
    if (const char* key = std::getenv(cfg.llm_api_key_env.c_str())) opts.api_key = key;
  }
  return std::make_unique<RemoteLlmProposer>(std::move(opts));
}

CampaignLog run_campaign(const CampaignConfig& cfg, Proposer& proposer, CampaignLog log,
                         const CampaignHooks& hooks) {
  validate(cfg);
  log.config = cfg;
  log.best_after = best_history(log.iterations);
  if (!log.stop_reason.empty()) return log;

  const PromptTemplates templates =
      cfg.prompt_dir.empty() ? PromptTemplates::embedded() : PromptTemplates::from_directory(cfg.prompt_dir);
  const TargetDistribution target = discretize_target(cfg.target, cfg.n_qubits);
  const std::string task_prompt = render_task_prompt(cfg.n_qubits, cfg.blocks, templates);

  while ((log.stop_reason = stop_reason(cfg, log)).empty()) {
    const auto started = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.iteration = static_cast<int>(log.iterations.size()) + 1;

    const std::string prompt =
        log.iterations.empty() ? task_prompt : render_feedback_prompt(log.iterations.back().feedback, templates);

    Conversation sent;
    if (cfg.conversation == ConversationMode::Full || log.iterations.empty()) {
      sent = log.conversation();
    } else {
      sent.push_back({"user", task_prompt});
      const auto& prev = log.iterations.back().messages;
      sent.push_back(prev.back());
    }
    sent.push_back({"user", prompt});
    rec.messages.push_back(sent.back());

    std::string reply = proposer.propose(sent);
    rec.messages.push_back({"assistant", reply});
    std::optional<AnsatzSpec> spec;
    try {
      spec = parse_proposal(reply);
      rec.parse_outcome = ParseOutcome::Parsed;
    } catch (const Error& e) {
      rec.parse_errors.push_back(e.what());
      sent.push_back({"assistant", reply});
      sent.push_back({"user", render_retry_prompt(e.what())});
      rec.messages.push_back(sent.back());
      reply = proposer.propose(sent);
      rec.messages.push_back({"assistant", reply});
      try {
        spec = parse_proposal(reply);
        rec.parse_outcome = ParseOutcome::ParsedAfterRetry;
      } catch (const Error& e2) {
        rec.parse_errors.push_back(e2.what());
        rec.parse_outcome = ParseOutcome::Fallback;
        spec = log.best() ? log.best()->spec : default_spec(cfg.blocks);
      }
    }
    rec.spec = *spec;

    const Circuit circuit = build_circuit(rec.spec, cfg.n_qubits);
    rec.train_seed = iteration_seed(cfg.seed, rec.iteration);
    RepeatResult result = train_repeats(circuit, target, cfg.train, rec.train_seed, cfg.train.repeats);
    rec.summary = result.summary;
    for (const auto& t : result.traces) rec.repeat_final_kl.push_back(t.final_kl());

    TrainingTrace& median = result.traces[result.summary.median_index];
    rec.feedback.iteration = rec.iteration;
    rec.feedback.discriminator_loss_values = median.discriminator_loss;
    rec.feedback.generator_loss_values = median.generator_loss;
    rec.feedback.entropy_values = median.kl_divergence;
    rec.feedback.ks_values = median.ks_statistic;
    rec.feedback.ansatz_parameter_count = circuit_param_count(circuit);
    rec.feedback.ansatz_depth = circuit_depth(circuit);
    rec.final_theta = median.final_theta;
    rec.final_distribution = median.final_distribution;
    rec.discriminator = std::move(median.final_discriminator);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    log.iterations.push_back(std::move(rec));
    log.best_after = best_history(log.iterations);
    if (hooks.on_iteration) hooks.on_iteration(log);
  }
  return log;
}

CampaignLog run_campaign(const CampaignConfig& cfg) {
  auto proposer = make_proposer(cfg);
  return run_campaign(cfg, *proposer);
}

}  // namespace qas
