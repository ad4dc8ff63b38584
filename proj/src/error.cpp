/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The bletrack Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "bletrack/error.hpp"

namespace bletrack {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::EmptyInput: return "EmptyInput";
  case ErrorCode::MixedIdentity: return "MixedIdentity";
  case ErrorCode::EmptyWindow: return "EmptyWindow";
  case ErrorCode::DuplicateAnchor: return "DuplicateAnchor";
  case ErrorCode::UnknownAnchor: return "UnknownAnchor";
  case ErrorCode::EmptyFrame: return "EmptyFrame";
  case ErrorCode::NoInput: return "NoInput";
  case ErrorCode::InvalidConfig: return "InvalidConfig";
  case ErrorCode::InvalidScenario: return "InvalidScenario";
  case ErrorCode::Malformed: return "Malformed";
  case ErrorCode::Invalid: return "Invalid";
  case ErrorCode::VersionUnsupported: return "VersionUnsupported";
  case ErrorCode::IoFailure: return "IoFailure";
  case ErrorCode::BindFailure: return "BindFailure";
  case ErrorCode::Network: return "Network";
  }
  return "Unknown";
}

} // namespace bletrack
