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

#include <string>

#include <json.hpp>

#include "pgp/registry.hpp"
#include "pgp/solver.hpp"

namespace pgp {

// A parsed experiment file: the run configuration with registry defaults
// filled in, plus the problem parameters.
struct Experiment {
  RunConfig config;
  nlohmann::json params = nlohmann::json::object();
};

// Throws ConfigError naming the offending key.
Experiment parse_experiment(const nlohmann::json& doc, const ProblemRegistry& registry);
Experiment parse_experiment_text(const std::string& text, const ProblemRegistry& registry);
Experiment load_experiment(const std::string& path, const ProblemRegistry& registry);

// Defaults of a registered problem as an experiment.
Experiment default_experiment(const std::string& problem_id, const ProblemRegistry& registry);

AnyProblem build_problem(const Experiment& ex, const ProblemRegistry& registry);
OracleControl build_oracle(const Experiment& ex, const ProblemRegistry& registry);  // nullptr if none

RunReport run_experiment(const Experiment& ex, const ProblemRegistry& registry, const SolveHooks& hooks = {});

// Unbiasedness probe on the experiment's problem with N steps, under the
// oracle feedback control when one exists and u = 0 otherwise. The
// experiment's M and seed become n_outer and the probe seed.
ProbeReport probe_experiment(const Experiment& ex, const ProblemRegistry& registry, int n_reference, int n_inner,
                             bool drop_dx_hamiltonian = false);

std::string to_string(Mode mode);
std::string to_string(YIndex y);

}  // namespace pgp
