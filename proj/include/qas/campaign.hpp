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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qas/ansatz.hpp"
#include "qas/prompts.hpp"
#include "qas/proposer.hpp"
#include "qas/trainer.hpp"

namespace qas {

enum class ProposerKind { Heuristic, Llm };
enum class ConversationMode { Full, Stateless };

struct CampaignConfig {
  int n_qubits = 3;
  int blocks = 4;
  int max_iterations = 8;
  TargetFamily target = TargetFamily::lognormal(1.0, 1.0);
  TrainConfig train;
  std::uint64_t seed = 0;
  ProposerKind proposer = ProposerKind::Heuristic;
  RemoteLlmOptions llm;              // api_key is never persisted
  std::string llm_api_key_env = "OPENAI_API_KEY";
  ConversationMode conversation = ConversationMode::Full;
  /// Stop once the best final KL improves by less than plateau_tolerance
  /// (relative) across plateau_window iterations. A window of 0 disables it.
  int plateau_window = 3;
  double plateau_tolerance = 0.01;
  std::size_t param_budget = 0;      // heuristic only; 0 = n_qubits * blocks
  std::string prompt_dir;            // empty = compiled-in templates

  friend bool operator==(const CampaignConfig& a, const CampaignConfig& b);
};

/// Throws ConfigInvalid naming the offending field.
void validate(const CampaignConfig& cfg);

enum class ParseOutcome { Parsed, ParsedAfterRetry, Fallback };
std::string_view to_string(ParseOutcome outcome);
ParseOutcome parse_outcome_from_string(std::string_view s);

struct IterationRecord {
  int iteration = 0;  // 1-based
  AnsatzSpec spec;
  ParseOutcome parse_outcome = ParseOutcome::Parsed;
  std::vector<std::string> parse_errors;
  std::vector<Message> messages;  // prompts and replies added this iteration
  FeedbackRecord feedback;        // from the median-final-KL repeat
  std::vector<double> repeat_final_kl;
  RepeatSummary summary;
  std::uint64_t train_seed = 0;
  std::vector<double> final_theta;
  std::vector<double> final_distribution;
  Discriminator discriminator{DiscriminatorOptions{{1, 1}, 0.0}, 0};
  double seconds = 0.0;  // wall clock; excluded from determinism checks

  double final_kl() const;
};

bool operator==(const IterationRecord& a, const IterationRecord& b);

struct CampaignLog {
  CampaignConfig config;
  std::vector<IterationRecord> iterations;
  /// Index into `iterations` of the best record after each iteration.
  std::vector<std::size_t> best_after;
  std::string stop_reason;  // empty while running

  const IterationRecord* best() const;
  Conversation conversation() const;

  friend bool operator==(const CampaignLog&, const CampaignLog&) = default;
};

/// Lexicographic (final KL, parameter count, depth).
bool better_than(const IterationRecord& a, const IterationRecord& b);

/// Rebuilds best_after from the iteration list.
std::vector<std::size_t> best_history(const std::vector<IterationRecord>& iterations);

/// Empty when the campaign should continue, otherwise the stop reason.
std::string stop_reason(const CampaignConfig& cfg, const CampaignLog& log);

AnsatzSpec default_spec(int blocks);

std::unique_ptr<Proposer> make_proposer(const CampaignConfig& cfg);

struct CampaignHooks {
  /// Called after each completed iteration, before the stop rule is checked.
  std::function<void(const CampaignLog&)> on_iteration;
};

/// Runs (or continues, when `log` already holds iterations) the
/// propose -> train -> feedback loop until the stop rule fires.
CampaignLog run_campaign(const CampaignConfig& cfg, Proposer& proposer, CampaignLog log = {},
                         const CampaignHooks& hooks = {});

CampaignLog run_campaign(const CampaignConfig& cfg);

}  // namespace qas
