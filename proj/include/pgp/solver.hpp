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

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pgp/engine.hpp"
#include "pgp/problem.hpp"
#include "pgp/randfeatures.hpp"

namespace pgp {

struct LearningSchedule {
  double rho0 = 0.4;
  double decay_power = 0.5;
  // rho_k = rho0 * k^(-decay_power), k >= 1
  double rate(int k) const;
};

enum class Mode { kSocp, kMfc };

using AnyProblem = std::variant<std::shared_ptr<const SocpProblem>, std::shared_ptr<const MfcProblem>>;

struct RunConfig {
  std::string problem_id;
  std::string case_id;
  Mode mode = Mode::kSocp;
  std::uint64_t seed = 1;
  int M = 1000;
  int N = 20;
  int K = 10;
  double T = 1.0;
  int hidden_size = 64;
  double ridge_lambda = 1e-8;
  LearningSchedule schedule;
  double clip_bound = kNoClip;
  YIndex y_index = YIndex::kNext;
  int eval_M = 0;        // 0 means M
  int final_eval_M = 0;  // 0 means eval_M
  Activation activation = Activation::kTanh;
  bool resample_features_each_epoch = false;
  std::string output_path;

  int effective_eval_M() const { return eval_M > 0 ? eval_M : M; }
  int effective_final_eval_M() const { return final_eval_M > 0 ? final_eval_M : effective_eval_M(); }
  double dt() const { return T / N; }
  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double wall_seconds = 0.0;
  double cost = std::numeric_limits<double>::quiet_NaN();
  double cost_se = std::numeric_limits<double>::quiet_NaN();
  double l2_error = std::numeric_limits<double>::quiet_NaN();
  std::string diagnostics;
};

struct RunReport {
  RunConfig config;
  std::vector<EpochRecord> epochs;
  PolicySequence policy;
  bool aborted = false;
  std::string abort_message;
  CostEstimate final_cost{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double final_l2_error = std::numeric_limits<double>::quiet_NaN();
  double initial_cost = std::numeric_limits<double>::quiet_NaN();  // J(u = 0) on the evaluation seeds
};

struct SolveHooks {
  std::function<void(const EpochRecord&)> on_epoch;  // progress reporting
};

// Projected gradient loop: per epoch simulate under u^k, solve the adjoint,
// form targets u^k(X_n) - rho_k dH/du and refit each step's model.
RunReport solve(const AnyProblem& problem, const RunConfig& config, const OracleControl& oracle = nullptr,
                const SolveHooks& hooks = {});

// Builds the per-step feature maps used by solve (seeded by step index).
std::vector<std::shared_ptr<const FeatureMap>> step_feature_maps(const RunConfig& config, int input_dim,
                                                                 std::uint64_t epoch = 0);

CostEstimate estimate_cost(const AnyProblem& problem, const ControlPolicy& policy, int M_eval,
                           const ForwardSeeds& seeds);
double control_l2_error(const ControlPolicy& policy, const OracleControl& oracle, const AnyProblem& problem,
                        int M_eval, const ForwardSeeds& seeds);
ProblemDims problem_dims(const AnyProblem& problem);
int problem_policy_input_dim(const AnyProblem& problem);

}  // namespace pgp
