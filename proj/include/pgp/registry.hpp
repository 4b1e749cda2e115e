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

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pgp/benchmarks.hpp"
#include "pgp/solver.hpp"

namespace pgp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemEntry {
  std::string id;
  std::string description;
  RunConfig defaults;
  nlohmann::json default_params = nlohmann::json::object();
  std::vector<std::string> param_keys;  // accepted keys of the "params" object
  std::function<AnyProblem(const RunConfig&, const nlohmann::json& params)> build;
  // empty function when the problem has no closed-form control
  std::function<OracleControl(const RunConfig&, const nlohmann::json& params)> oracle;
};

class ProblemRegistry {
 public:
  void add(ProblemEntry entry);  // throws on duplicate id
  const ProblemEntry& at(const std::string& id) const;
  bool contains(const std::string& id) const { return entries_.count(id) != 0; }
  std::vector<std::string> ids() const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, ProblemEntry> entries_;
};

// lq100, hjb, interbank, meanvar, priceimpact, sine
ProblemRegistry register_all();

// Problem parameter helpers, shared with the CLI oracle command.
LqParams lq_params(const RunConfig& cfg, const nlohmann::json& params);
HjbParams hjb_params(const RunConfig& cfg, const nlohmann::json& params);
InterbankParams interbank_params(const RunConfig& cfg, const nlohmann::json& params);
MeanVarParams meanvar_params(const RunConfig& cfg, const nlohmann::json& params);
PriceImpactParams priceimpact_params(const RunConfig& cfg, const nlohmann::json& params);
SineParams sine_params(const RunConfig& cfg, const nlohmann::json& params);

}  // namespace pgp
