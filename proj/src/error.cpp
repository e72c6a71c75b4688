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

#include "qas/error.hpp"

namespace qas {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidQubitCount: return "InvalidQubitCount";
    case ErrorCode::InvalidQubit: return "InvalidQubit";
    case ErrorCode::MissingParameter: return "MissingParameter";
    case ErrorCode::ParamLengthMismatch: return "ParamLengthMismatch";
    case ErrorCode::InvalidCircuit: return "InvalidCircuit";
    case ErrorCode::InvalidBlockIndex: return "InvalidBlockIndex";
    case ErrorCode::MissingTwoLocalConfig: return "MissingTwoLocalConfig";
    case ErrorCode::MalformedTwoLocalConfig: return "MalformedTwoLocalConfig";
    case ErrorCode::NoAnsatzList: return "NoAnsatzList";
    case ErrorCode::InvalidDiscriminatorOutput: return "InvalidDiscriminatorOutput";
    case ErrorCode::BatchTooSmall: return "BatchTooSmall";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ProposerUnavailable: return "ProposerUnavailable";
    case ErrorCode::ConfigNotFound: return "ConfigNotFound";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::PersistError: return "PersistError";
    case ErrorCode::UnknownSchemaVersion: return "UnknownSchemaVersion";
    case ErrorCode::EmptyCampaign: return "EmptyCampaign";
  }
  return "Unknown";
}

}  // namespace qas
