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

#include <algorithm>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pgp/randfeatures.hpp"
#include "pgp/stochastics.hpp"

namespace pgp {

using CSpan = std::span<const double>;
using Span = std::span<double>;

struct ProblemDims {
  int d = 1;    // state
  int m = 1;    // Brownian motion
  int d1 = 1;   // control
  double T = 1.0;
};

// Empirical summaries of the particle law at one time step.
struct MeasureSummary {
  Eigen::VectorXd mean_state;
  Eigen::VectorXd interaction_b;
  Eigen::VectorXd interaction_f;
  Eigen::VectorXd mean_control;  // empty until controls are known
  std::vector<std::pair<std::string, double>> custom;
};

class ProblemBase {
 public:
  virtual ~ProblemBase() = default;

  virtual std::string id() const = 0;
  virtual ProblemDims dims() const = 0;
  virtual void sample_initial(RandomStream& rng, Span x0) const = 0;

  // Regression inputs of the feedback policy; the identity unless overridden.
  virtual int policy_input_dim() const { return dims().d; }
  virtual void policy_input(CSpan x, Span out) const;

  // False lets the engine skip forming Z (the d x m outer product) when no
  // partial reads it.
  virtual bool uses_z() const { return true; }
};

class SocpProblem : public ProblemBase {
 public:
  virtual void drift(double t, CSpan x, CSpan u, Span out) const = 0;
  virtual void diffusion(double t, CSpan x, CSpan u, Span out) const = 0;  // d x m row-major
  // out = sigma(t, x, u) dw
  virtual void apply_diffusion(double t, CSpan x, CSpan u, CSpan dw, Span out) const;
  virtual double running_cost(double t, CSpan x, CSpan u) const = 0;
  virtual double terminal_cost(CSpan x) const = 0;
  virtual void terminal_gradient(CSpan x, Span out) const = 0;
  virtual void dx_hamiltonian(double t, CSpan x, CSpan y, CSpan z, CSpan u, Span out) const = 0;
  virtual void du_hamiltonian(double t, CSpan x, CSpan y, CSpan z, CSpan u, Span out) const = 0;
};

// Mean-field control with scalar interactions. The Lions-derivative terms are
// supplied in factorized form kernel(j)(x_i) = basis(x_i) * factors(j), which
// the engine averages over j in O(M). A problem may instead return false from
// lions_factorized() and override the *_kernel methods; the engine then runs
// the O(M^2) double loop.
class MfcProblem : public ProblemBase {
 public:
  virtual int interaction_b_dim() const { return 0; }
  virtual int interaction_f_dim() const { return 0; }
  virtual void interactions(CSpan x, Span b_out, Span f_out) const;

  virtual void drift(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const = 0;
  virtual void diffusion(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const = 0;
  virtual void apply_diffusion(double t, CSpan x, const MeasureSummary& mu, CSpan u, CSpan dw, Span out) const;
  virtual double running_cost(double t, CSpan x, const MeasureSummary& mu, CSpan u) const = 0;
  virtual double terminal_cost(CSpan x, const MeasureSummary& mu) const = 0;
  virtual void terminal_gradient(CSpan x, const MeasureSummary& mu, Span out) const = 0;
  virtual void dx_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                              Span out) const = 0;
  virtual void du_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                              Span out) const = 0;

  virtual bool lions_factorized() const { return true; }

  // d_mu H(t, x_j, mu, y_j, z_j, u_j)(x_i)
  virtual int lions_rank() const { return 0; }
  virtual void lions_factors(double t, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan zj, CSpan uj,
                             Span out) const;
  virtual void lions_basis(double t, CSpan xi, const MeasureSummary& mu, Span out) const;  // d x rank
  virtual void lions_kernel(double t, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan zj, CSpan uj, CSpan xi,
                            Span out) const;

  // d_mu g(x_j, mu)(x_i)
  virtual int terminal_lions_rank() const { return 0; }
  virtual void terminal_lions_factors(CSpan xj, const MeasureSummary& mu, Span out) const;
  virtual void terminal_lions_basis(CSpan xi, const MeasureSummary& mu, Span out) const;  // d x rank
  virtual void terminal_lions_kernel(CSpan xj, const MeasureSummary& mu, CSpan xi, Span out) const;

  // d_nu H(t, x_j, mu, y_j, z_j, u_j)(x_i, u_i), added to the control gradient
  virtual int control_law_rank() const { return 0; }
  virtual void control_law_factors(double t, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan zj, CSpan uj,
                                   Span out) const;
  virtual void control_law_basis(double t, CSpan xi, const MeasureSummary& mu, CSpan ui,
                                 Span out) const;  // d1 x rank
  virtual void control_law_kernel(double t, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan zj, CSpan uj,
                                  CSpan xi, CSpan ui, Span out) const;
};

// Views an SOCP as an MFC problem with no measure dependence.
class SocpAsMfc final : public MfcProblem {
 public:
  explicit SocpAsMfc(std::shared_ptr<const SocpProblem> inner) : inner_(std::move(inner)) {}

  const SocpProblem& inner() const { return *inner_; }

  std::string id() const override { return inner_->id(); }
  ProblemDims dims() const override { return inner_->dims(); }
  void sample_initial(RandomStream& rng, Span x0) const override { inner_->sample_initial(rng, x0); }
  int policy_input_dim() const override { return inner_->policy_input_dim(); }
  void policy_input(CSpan x, Span out) const override { inner_->policy_input(x, out); }
  bool uses_z() const override { return inner_->uses_z(); }

  void drift(double t, CSpan x, const MeasureSummary&, CSpan u, Span out) const override {
    inner_->drift(t, x, u, out);
  }
  void diffusion(double t, CSpan x, const MeasureSummary&, CSpan u, Span out) const override {
    inner_->diffusion(t, x, u, out);
  }
  void apply_diffusion(double t, CSpan x, const MeasureSummary&, CSpan u, CSpan dw, Span out) const override {
    inner_->apply_diffusion(t, x, u, dw, out);
  }
  double running_cost(double t, CSpan x, const MeasureSummary&, CSpan u) const override {
    return inner_->running_cost(t, x, u);
  }
  double terminal_cost(CSpan x, const MeasureSummary&) const override { return inner_->terminal_cost(x); }
  void terminal_gradient(CSpan x, const MeasureSummary&, Span out) const override {
    inner_->terminal_gradient(x, out);
  }
  void dx_hamiltonian(double t, CSpan x, const MeasureSummary&, CSpan y, CSpan z, CSpan u,
                      Span out) const override {
    inner_->dx_hamiltonian(t, x, y, z, u, out);
  }
  void du_hamiltonian(double t, CSpan x, const MeasureSummary&, CSpan y, CSpan z, CSpan u,
                      Span out) const override {
    inner_->du_hamiltonian(t, x, y, z, u, out);
  }

 private:
  std::shared_ptr<const SocpProblem> inner_;
};

// H = b.y + tr(sigma^T z) + f
double hamiltonian(const SocpProblem& p, double t, CSpan x, CSpan y, CSpan z, CSpan u);
double hamiltonian(const MfcProblem& p, double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u);

struct PartialCheckReport {
  double max_dx_deviation = 0.0;
  double max_du_deviation = 0.0;
  double max_deviation() const { return std::max(max_dx_deviation, max_du_deviation); }
};

// Central finite differences of H in x and u against the analytic partials,
// at n_points random (t, x, y, z, u) (and a random measure summary for MFC).
PartialCheckReport hamiltonian_partial_check(const SocpProblem& p, int n_points, double eps, std::uint64_t seed);
PartialCheckReport hamiltonian_partial_check(const MfcProblem& p, int n_points, double eps, std::uint64_t seed);

// Plain particle averages; controls may have zero rows.
MeasureSummary measure_summary(const Eigen::Ref<const RowMatrix>& states, const Eigen::Ref<const RowMatrix>& controls,
                               const MfcProblem& p);
Eigen::VectorXd column_means(const Eigen::Ref<const RowMatrix>& rows);

// Feedback control used by the engine. `inputs` are the problem's policy
// inputs, `states` the raw states of the same rows.
class ControlPolicy {
 public:
  virtual ~ControlPolicy() = default;
  virtual int steps() const = 0;
  virtual int control_dim() const = 0;
  virtual void controls(int step, double t, const Eigen::Ref<const RowMatrix>& inputs,
                        const Eigen::Ref<const RowMatrix>& states, const MeasureSummary& mu,
                        RowMatrix& out) const = 0;
};

// One random-feature model per time step; u_t = u_{t_n} on [t_n, t_{n+1}).
class PolicySequence final : public ControlPolicy {
 public:
  PolicySequence() = default;
  PolicySequence(std::vector<RandomFeatureModel> models, std::vector<double> times);

  static PolicySequence zero(const std::vector<std::shared_ptr<const FeatureMap>>& maps, int control_dim,
                             double horizon);

  int steps() const override { return static_cast<int>(models_.size()); }
  int control_dim() const override { return models_.empty() ? 0 : models_.front().output_dim(); }
  void controls(int step, double t, const Eigen::Ref<const RowMatrix>& inputs,
                const Eigen::Ref<const RowMatrix>& states, const MeasureSummary& mu, RowMatrix& out) const override;

  const std::vector<RandomFeatureModel>& models() const { return models_; }
  const std::vector<double>& times() const { return times_; }
  const RandomFeatureModel& model(int n) const { return models_.at(static_cast<std::size_t>(n)); }
  int step_index(double t) const;

 private:
  std::vector<RandomFeatureModel> models_;
  std::vector<double> times_;
};

using FeedbackFn = std::function<void(double t, CSpan x, const MeasureSummary& mu, Span u)>;

// Closed-form feedback u(t, x, mu) evaluated on raw states (oracle injection).
class FeedbackPolicy final : public ControlPolicy {
 public:
  FeedbackPolicy(FeedbackFn fn, int steps, int control_dim) : fn_(std::move(fn)), steps_(steps), d1_(control_dim) {}
  int steps() const override { return steps_; }
  int control_dim() const override { return d1_; }
  void controls(int step, double t, const Eigen::Ref<const RowMatrix>& inputs,
                const Eigen::Ref<const RowMatrix>& states, const MeasureSummary& mu, RowMatrix& out) const override;

 private:
  FeedbackFn fn_;
  int steps_;
  int d1_;
};

}  // namespace pgp
