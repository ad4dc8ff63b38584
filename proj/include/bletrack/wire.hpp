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
#pragma once

// Anchor-to-controller line protocol. One report per line, UTF-8, '\n'
// terminated:
//
//   {"v":1,"a":"A3","r":0,"g":"T1","s":-67.5,"t":1700000000000}
//
// v: format version, a: anchor id, r: receiver index, g: tag id,
// s: RSS in dBm with at most one fractional digit, t: anchor timestamp in ms.
// Unknown keys are ignored on input.

#include "bletrack/measurement.hpp"

#include <string>
#include <string_view>

namespace bletrack {

inline constexpr int kWireVersion = 1;
inline constexpr std::size_t kMaxWireLineBytes = 1024;

/// Throws Error with code Malformed, Invalid or VersionUnsupported. Never
/// aborts on arbitrary input.
RawReport parse_report(std::string_view line);

/// Canonical encoding without the trailing newline. RSS is rounded to 0.1 dB.
std::string format_report(const RawReport& report);

/// The report as it reads back after a round trip through the wire.
RawReport quantize_report(RawReport report);

} // namespace bletrack
