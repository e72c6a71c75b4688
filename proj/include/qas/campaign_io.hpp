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

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qas/campaign.hpp"

namespace qas {

inline constexpr std::string_view kSchemaVersion = "1";

/// Config files are `key = value` lines; `#` starts a comment. Unknown or
/// repeated keys are rejected. See README.md for the key list.
CampaignConfig parse_config(std::string_view text);
CampaignConfig load_config(const std::filesystem::path& path);
/// Every key, in a fixed order, with shortest round-trip numbers.
std::string save_config(const CampaignConfig& cfg);

nlohmann::json to_json(const CampaignConfig& cfg);
CampaignConfig campaign_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AnsatzSpec& spec);
AnsatzSpec ansatz_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FeedbackRecord& rec);
FeedbackRecord feedback_record_from_json(const nlohmann::json& j);
/// The discriminator is included inline; `include_timing` controls the
/// wall-clock field.
nlohmann::json to_json(const IterationRecord& rec, bool include_timing = true);
IterationRecord iteration_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CampaignLog& log, bool include_timing = true);

struct ManifestEntry {
  std::string record;      // iteration JSON file name
  std::string checkpoint;  // discriminator checkpoint file name
};

struct RunManifest {
  std::string schema_version{kSchemaVersion};
  CampaignConfig config;
  std::vector<ManifestEntry> iterations;
  std::string created;  // ISO-8601 UTC
  std::uint64_t master_seed = 0;
  std::string stop_reason;
};

struct PersistHooks {
  /// Runs after the temporary manifest is written and before it is renamed
  /// into place. Tests throw from here to simulate a crash.
  std::function<void()> before_manifest_rename;
};

/// Creates `dir` and an empty manifest. Refuses a directory that already
/// holds a manifest.
void init_log_dir(const std::filesystem::path& dir, const CampaignConfig& cfg);

/// Writes the iteration record and its checkpoint, then swaps in a manifest
/// listing it. Returns the record's file name.
std::string persist_iteration(const std::filesystem::path& dir, const IterationRecord& rec,
                              const PersistHooks& hooks = {});

void persist_stop_reason(const std::filesystem::path& dir, const std::string& reason,
                         const PersistHooks& hooks = {});

RunManifest read_manifest(const std::filesystem::path& dir);
CampaignLog load_log(const std::filesystem::path& dir);

struct ReportRow {
  int iteration = 0;
  std::string ansatz;
  double kl_mean = 0.0;
  double kl_min = 0.0;
  double kl_max = 0.0;
  std::size_t params = 0;
  std::size_t depth = 0;
  double seconds = 0.0;
};

struct ReportTable {
  std::vector<ReportRow> rows;
  int best_iteration = 0;
};

inline constexpr std::string_view kReportCsvHeader =
    "iteration,ansatz,kl_mean,kl_min,kl_max,params,depth,seconds";

enum class ReportFormat { Table, Csv };

ReportTable build_report(const CampaignLog& log);
std::string render_report(const ReportTable& table, ReportFormat format);
/// Throws EmptyCampaign when no iteration has completed.
std::string emit_report(const std::filesystem::path& dir, ReportFormat format);

}  // namespace qas
