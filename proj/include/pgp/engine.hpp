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
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgp/problem.hpp"
#include "pgp/stochastics.hpp"

namespace pgp {

// Raised when a state, adjoint or gradient becomes non-finite.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& phase, int step)
      : std::runtime_error("non-finite values in " + phase + " pass at step " + std::to_string(step)),
        phase_(phase),
        step_(step) {}
  const std::string& phase() const { return phase_; }
  int step() const { return step_; }

 private:
  std::string phase_;
  int step_;
};

enum class YIndex { kCurrent, kNext };  // config values "n" and "n_plus_1"

struct ForwardSeeds {
  std::uint64_t master_seed = 0;
  std::uint64_t initial_substream = substream_tag(Purpose::kTrainInitial, 0);
  std::uint64_t brownian_substream = substream_tag(Purpose::kTrainBrownian, 0);

  static ForwardSeeds train(std::uint64_t master, std::uint64_t epoch);
  static ForwardSeeds eval(std::uint64_t master, std::uint64_t epoch);
  static ForwardSeeds final_eval(std::uint64_t master);
};

struct ParticleEnsemble {
  int particles = 0;
  int steps = 0;
  double dt = 0.0;
  int d = 0, m = 0, d1 = 0;
  std::vector<RowMatrix> X;   // steps+1 blocks, particles x d
  std::vector<RowMatrix> U;   // steps blocks, particles x d1
  BrownianIncrements dW;
  std::vector<RowMatrix> Y;   // steps+1 blocks, particles x d
  std::vector<RowMatrix> Z;   // steps blocks, particles x (d*m); filled only on request
  std::vector<RowMatrix> G;   // steps blocks, particles x d1: control gradient
  std::vector<MeasureSummary> mu_path;  // steps+1, MFC only

  double time(int n) const { return static_cast<double>(n) * dt; }
};

struct BackwardOptions {
  YIndex y_index = YIndex::kNext;  // which Y enters the control gradient
  bool store_z = false;
  bool compute_gradient = true;
  bool drop_dx_hamiltonian = false;  // test-only negative control
};

ParticleEnsemble simulate_forward(const SocpProblem& p, const ControlPolicy& policy, int M, const ForwardSeeds& seeds);
ParticleEnsemble simulate_forward(const MfcProblem& p, const ControlPolicy& policy, int M, const ForwardSeeds& seeds);

void backward_adjoint_socp(const SocpProblem& p, ParticleEnsemble& e, const BackwardOptions& opt = {});
void backward_adjoint_mfc(const MfcProblem& p, ParticleEnsemble& e, const BackwardOptions& opt = {});

// Z[i, n] = Y[i, n+1] dW[i, n]^T / dt as a row-major d x m block.
void sample_z(CSpan y_next, CSpan dw, double dt, Span z);

struct CostEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// Streams a fresh forward simulation and averages the Riemann-sum cost.
CostEstimate estimate_cost(const SocpProblem& p, const ControlPolicy& policy, int M_eval, const ForwardSeeds& seeds);
CostEstimate estimate_cost(const MfcProblem& p, const ControlPolicy& policy, int M_eval, const ForwardSeeds& seeds);

using OracleControl = std::function<void(double t, CSpan x, const MeasureSummary& mu, Span u)>;

// sqrt of the mean over steps and particles of |u_n(X_n) - u*(t_n, X_n, mu_n)|^2
// along paths simulated under `policy`.
double control_l2_error(const ControlPolicy& policy, const OracleControl& oracle, const MfcProblem& p, int M_eval,
                        const ForwardSeeds& seeds);
double control_l2_error(const ControlPolicy& policy, const OracleControl& oracle, const SocpProblem& p, int M_eval,
                        const ForwardSeeds& seeds);

// Cost and, when an oracle is given, control error from one forward pass;
// the values equal the separate estimate_cost / control_l2_error calls.
struct PolicyEvaluation {
  CostEstimate cost;
  double l2_error = std::numeric_limits<double>::quiet_NaN();
};
PolicyEvaluation evaluate_policy(const SocpProblem& p, const ControlPolicy& policy, int M_eval, const ForwardSeeds& seeds,
                                 const OracleControl& oracle = nullptr);
PolicyEvaluation evaluate_policy(const MfcProblem& p, const ControlPolicy& policy, int M_eval, const ForwardSeeds& seeds,
                                 const OracleControl& oracle = nullptr);

struct ProbeConfig {
  int n_outer = 100000;
  int n_reference = 2000;
  int n_inner = 200;
  std::uint64_t seed = 1;
  bool drop_dx_hamiltonian = false;
};

struct ProbeStatistic {
  double sample_mean = 0.0;  // sample-wise adjoint
  double sample_se = 0.0;
  double nested_mean = 0.0;  // nested Monte-Carlo conditional-expectation scheme
  double nested_se = 0.0;
  double gap = 0.0;
  double combined_se = 0.0;
  double gap_in_se = 0.0;
};

struct ProbeReport {
  ProbeStatistic level;   // E[Y_0]
  ProbeStatistic moment;  // E[Y_0 X_0]
  double max_gap_in_se = 0.0;
  bool passed = false;  // every |gap| <= 3 combined SE
};

// Compares E[Y_0] and E[Y_0 X_0] from the sample-wise adjoint with a nested
// Monte-Carlo evaluation of the conditional-expectation recursion, which uses
// n_inner children per node. For MFC the empirical measures and the law
// forcing terms come from the outer ensemble. Requires d = m = 1.
ProbeReport unbiasedness_probe(const SocpProblem& p, const ControlPolicy& policy, const ProbeConfig& cfg);
ProbeReport unbiasedness_probe(const MfcProblem& p, const ControlPolicy& policy, const ProbeConfig& cfg);

}  // namespace pgp
