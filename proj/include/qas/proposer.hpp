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
#include <string>
#include <vector>

#include <json.hpp>

#include "qas/ansatz.hpp"

namespace qas {

struct Message {
  std::string role;  // "user" or "assistant"
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

using Conversation = std::vector<Message>;

class Proposer {
 public:
  virtual ~Proposer() = default;
  /// Reply text for the conversation so far; the last message is the newest
  /// prompt.
  virtual std::string propose(const Conversation& conversation) = 0;
};

/// Offline stand-in for the LLM: a pure function of the conversation text and
/// its seed.
///
/// The first reply alternates blocks [2,4,2,4,...]. Afterwards, when the
/// newest final KL did not improve on the previous one, a seeded random block
/// of the best spec seen so far is replaced. When it improved and the
/// parameter count exceeds the budget, the block with the most parameters
/// becomes a CZ-only block; otherwise the spec is kept.
class HeuristicProposer : public Proposer {
 public:
  /// `param_budget` of 0 means n_qubits * blocks, read from the task prompt.
  explicit HeuristicProposer(std::uint64_t seed, std::size_t param_budget = 0)
      : seed_(seed), param_budget_(param_budget) {}

  std::string propose(const Conversation& conversation) override;

 private:
  std::uint64_t seed_;
  std::size_t param_budget_;
};

struct RemoteLlmOptions {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key;
  double timeout_seconds = 120.0;
  int retries = 3;
  double backoff_seconds = 2.0;
};

/// Chat-completions client: POSTs {"model", "messages": [{"role", "content"}]}
/// and returns choices[0].message.content. Transport failures and non-2xx
/// replies are retried with exponential backoff, then raise
/// ProposerUnavailable.
class RemoteLlmProposer : public Proposer {
 public:
  explicit RemoteLlmProposer(RemoteLlmOptions options);
  std::string propose(const Conversation& conversation) override;

  static nlohmann::json request_body(const std::string& model, const Conversation& conversation);
  /// Throws InvalidArgument when the response has no message text.
  static std::string reply_text(const nlohmann::json& response);

 private:
  RemoteLlmOptions options_;
};

}  // namespace qas
