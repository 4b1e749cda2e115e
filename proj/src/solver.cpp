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

#include "pgp/solver.hpp"

#include <chrono>
#include <type_traits>
#include <stdexcept>

#include "pgp/parallel.hpp"

namespace pgp {
namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

RowMatrix policy_inputs(const ProblemBase& p, const RowMatrix& X) {
  RowMatrix in(X.rows(), p.policy_input_dim());
  parallel_chunks(static_cast<std::size_t>(X.rows()), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      p.policy_input(CSpan(X.row(r).data(), static_cast<std::size_t>(X.cols())),
                     Span(in.row(r).data(), static_cast<std::size_t>(in.cols())));
    }
  });
  return in;
}

// One epoch of the projected gradient update; returns u^{k+1}.
template <class P>
PolicySequence gradient_step(const P& p, const PolicySequence& policy, const RunConfig& cfg, int k,
                             const std::vector<std::shared_ptr<const FeatureMap>>& maps) {
  ParticleEnsemble e = simulate_forward(p, policy, cfg.M, ForwardSeeds::train(cfg.seed, static_cast<std::uint64_t>(k)));
  BackwardOptions opt;
  opt.y_index = cfg.y_index;
  if constexpr (std::is_base_of_v<SocpProblem, P>)
    backward_adjoint_socp(p, e, opt);
  else
    backward_adjoint_mfc(p, e, opt);
  const double rho = cfg.schedule.rate(k);
  std::vector<RandomFeatureModel> models;
  std::vector<double> times;
  models.reserve(static_cast<std::size_t>(cfg.N));
  for (int n = 0; n < cfg.N; ++n) {
    const RowMatrix inputs = policy_inputs(p, e.X[static_cast<std::size_t>(n)]);
    const RowMatrix targets = e.U[static_cast<std::size_t>(n)] - rho * e.G[static_cast<std::size_t>(n)];
    models.push_back(project_l2(inputs, targets, maps[static_cast<std::size_t>(n)], RidgeSpec{cfg.ridge_lambda},
                                cfg.clip_bound));
    times.push_back(e.time(n));
  }
  return PolicySequence(std::move(models), std::move(times));
}

template <class P>
RunReport solve_typed(const P& p, const RunConfig& cfg, const OracleControl& oracle,
                      const SolveHooks& hooks) {
  const ProblemDims dm = p.dims();
  if (std::abs(dm.T - cfg.T) > 1e-12 * std::max(1.0, cfg.T))
    throw std::invalid_argument("solve: problem horizon differs from config T");
  RunReport rep;
  rep.config = cfg;
  const int pin = p.policy_input_dim();
  auto maps = step_feature_maps(cfg, pin);
  PolicySequence policy = PolicySequence::zero(maps, dm.d1, cfg.T);
  const ForwardSeeds eval_seeds = ForwardSeeds::eval(cfg.seed, 0);
  rep.initial_cost = estimate_cost(p, policy, cfg.effective_eval_M(), eval_seeds).mean;

  using Clock = std::chrono::steady_clock;
  for (int k = 1; k <= cfg.K; ++k) {
    const auto start = Clock::now();
    EpochRecord rec;
    rec.epoch = k;
    try {
      if (cfg.resample_features_each_epoch) maps = step_feature_maps(cfg, pin, static_cast<std::uint64_t>(k));
      PolicySequence next = gradient_step(p, policy, cfg, k, maps);
      const PolicyEvaluation ev = evaluate_policy(p, next, cfg.effective_eval_M(), eval_seeds, oracle);
      rec.cost = ev.cost.mean;
      rec.cost_se = ev.cost.se;
      rec.l2_error = ev.l2_error;
      policy = std::move(next);
    } catch (const NumericalError& err) {
      rec.diagnostics = std::string("epoch ") + std::to_string(k) + ": " + err.what();
    } catch (const FitError& err) {
      rec.diagnostics = std::string("epoch ") + std::to_string(k) + ": " + err.what();
    }
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    rep.epochs.push_back(rec);
    if (hooks.on_epoch) hooks.on_epoch(rec);
    if (!rec.diagnostics.empty()) {
      rep.aborted = true;
      rep.abort_message = rec.diagnostics;
      break;
    }
  }
  rep.policy = policy;
  try {
    const ForwardSeeds final_seeds = ForwardSeeds::final_eval(cfg.seed);
    const PolicyEvaluation ev = evaluate_policy(p, policy, cfg.effective_final_eval_M(), final_seeds, oracle);
    rep.final_cost = ev.cost;
    rep.final_l2_error = ev.l2_error;
  } catch (const NumericalError& err) {
    if (!rep.aborted) {
      rep.aborted = true;
      rep.abort_message = std::string("final evaluation: ") + err.what();
    }
  }
  return rep;
}

}  // namespace

double LearningSchedule::rate(int k) const {
  if (k < 1) throw std::invalid_argument("LearningSchedule: k is 1-based");
  return rho0 * std::pow(static_cast<double>(k), -decay_power);
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid config: " + what); };
  if (M < 1) fail("M must be >= 1");
  if (N < 1) fail("N must be >= 1");
  if (K < 1) fail("K must be >= 1");
  if (!(T > 0.0)) fail("T must be positive");
  if (hidden_size < 1) fail("hidden_size must be >= 1");
  if (!(ridge_lambda >= 0.0)) fail("ridge_lambda must be >= 0");
  if (!(schedule.rho0 >= 0.0)) fail("rho0 must be >= 0");
  if (!(schedule.decay_power >= 0.0 && schedule.decay_power <= 1.0)) fail("decay_power must lie in [0, 1]");
  if (!(clip_bound > 0.0)) fail("clip_bound must be positive");
  if (eval_M < 0) fail("eval_M must be >= 0");
  if (final_eval_M < 0) fail("final_eval_M must be >= 0");
}

std::vector<std::shared_ptr<const FeatureMap>> step_feature_maps(const RunConfig& config, int input_dim,
                                                                 std::uint64_t epoch) {
  std::vector<std::shared_ptr<const FeatureMap>> maps;
  maps.reserve(static_cast<std::size_t>(config.N));
  for (int n = 0; n < config.N; ++n)
    maps.push_back(new_feature_map(SeedSpec{config.seed, static_cast<std::uint64_t>(n),
                                            substream_tag(Purpose::kFeatures, epoch)},
                                   input_dim, config.hidden_size, config.activation));
  return maps;
}

ProblemDims problem_dims(const AnyProblem& problem) {
  return std::visit([](const auto& p) { return p->dims(); }, problem);
}

int problem_policy_input_dim(const AnyProblem& problem) {
  return std::visit([](const auto& p) { return p->policy_input_dim(); }, problem);
}

CostEstimate estimate_cost(const AnyProblem& problem, const ControlPolicy& policy, int M_eval,
                           const ForwardSeeds& seeds) {
  return std::visit([&](const auto& p) { return estimate_cost(*p, policy, M_eval, seeds); }, problem);
}

double control_l2_error(const ControlPolicy& policy, const OracleControl& oracle, const AnyProblem& problem,
                        int M_eval, const ForwardSeeds& seeds) {
  return std::visit([&](const auto& p) { return control_l2_error(policy, oracle, *p, M_eval, seeds); }, problem);
}

RunReport solve(const AnyProblem& problem, const RunConfig& config, const OracleControl& oracle,
                const SolveHooks& hooks) {
  config.validate();
  return std::visit(
      Overloaded{
          [&](const std::shared_ptr<const SocpProblem>& p) {
            if (config.mode == Mode::kMfc) {
              const SocpAsMfc view(p);
              return solve_typed(view, config, oracle, hooks);
            }
            return solve_typed(*p, config, oracle, hooks);
          },
          [&](const std::shared_ptr<const MfcProblem>& p) {
            if (config.mode == Mode::kSocp)
              throw std::invalid_argument("invalid config: mode socp requested for a mean-field problem");
            return solve_typed(*p, config, oracle, hooks);
          }},
      problem);
}

}  // namespace pgp
