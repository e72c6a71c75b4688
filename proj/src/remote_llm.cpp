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

#include <chrono>
#include <cmath>
#include <regex>
#include <thread>

#include <httplib.h>

#include "qas/error.hpp"
#include "qas/proposer.hpp"

namespace qas {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, url_re)) {
    throw Error(ErrorCode::InvalidArgument, "endpoint must be an http(s) URL: " + url);
  }
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

RemoteLlmProposer::RemoteLlmProposer(RemoteLlmOptions options) : options_(std::move(options)) {
  split_url(options_.endpoint);
  if (options_.retries < 0) throw Error(ErrorCode::InvalidArgument, "retries must be >= 0");
}

nlohmann::json RemoteLlmProposer::request_body(const std::string& model,
                                               const Conversation& conversation) {
  nlohmann::json messages = nlohmann::json::array();
  for (const Message& m : conversation) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  return {{"model", model}, {"messages", std::move(messages)}};
}

std::string RemoteLlmProposer::reply_text(const nlohmann::json& response) {
  const auto choices = response.find("choices");
  if (choices == response.end() || !choices->is_array() || choices->empty()) {
    throw Error(ErrorCode::InvalidArgument, "response has no choices");
  }
  const auto& first = (*choices)[0];
  if (!first.contains("message") || !first["message"].contains("content") ||
      !first["message"]["content"].is_string()) {
    throw Error(ErrorCode::InvalidArgument, "first choice has no message text");
  }
  return first["message"]["content"].get<std::string>();
}

std::string RemoteLlmProposer::propose(const Conversation& conversation) {
  const Endpoint ep = split_url(options_.endpoint);
  const std::string body = request_body(options_.model, conversation).dump();
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  const auto timeout = std::chrono::duration<double>(options_.timeout_seconds);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);

  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0 && options_.backoff_seconds > 0.0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(
          options_.backoff_seconds * std::pow(2.0, attempt - 1)));
    }
    httplib::Client client(ep.origin);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(ep.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    const auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
      last_error = "response is not JSON";
      continue;
    }
    try {
      return reply_text(parsed);
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::ProposerUnavailable,
              options_.endpoint + " failed after " + std::to_string(options_.retries + 1) +
                  " attempt(s): " + last_error);
}

}  // namespace qas
