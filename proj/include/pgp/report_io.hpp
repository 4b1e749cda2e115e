/*
   Copyright 2026 The pgp Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <iosfwd>
#include <string>

#include "pgp/problem.hpp"
#include "pgp/solver.hpp"

namespace pgp {

inline constexpr const char* kCsvHeader = "epoch,wall_seconds,cost,cost_se,l2_error";
inline constexpr int kPolicyFormatVersion = 1;

// Header, one row per epoch, then "#key=value" summary lines. With
// timing=false the wall_seconds column is written as 0.
void write_report_csv(const RunReport& report, std::ostream& out, bool timing = true);
void write_report_csv(const RunReport& report, const std::string& path, bool timing = true);

// Text format "pgp-policy <version>": dimensions, per-step feature-map seeds
// (explicit weights when a map has no seed) and Theta in hexadecimal floats.
void save_policy(const PolicySequence& policy, std::ostream& out);
void save_policy(const PolicySequence& policy, const std::string& path);
PolicySequence load_policy(std::istream& in);
PolicySequence load_policy(const std::string& path);

std::string format_double(double v);  // 17 significant digits

}  // namespace pgp
