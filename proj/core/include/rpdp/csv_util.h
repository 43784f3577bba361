// Copyright 2026 The rpdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RPDP_CSV_UTIL_H_
#define RPDP_CSV_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace rpdp {

// Shortest round-trip representation is not stable enough for diffs across
// writers; every double is written with 17 significant digits.
std::string FormatDouble(double value);

// Splits one CSV line on commas. Quotes are not supported.
std::vector<std::string> SplitCsvLine(std::string_view line);

// Trims ASCII whitespace (and a trailing '\r') from both ends.
std::string_view Trim(std::string_view s);

// Parses a complete string as a double; returns false on any trailing junk.
bool ParseDouble(std::string_view s, double& out);

}  // namespace rpdp

#endif  // RPDP_CSV_UTIL_H_
