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
#include <string>
#include <vector>

#include "pgp/engine.hpp"
#include "pgp/problem.hpp"

namespace pgp {

// One-dimensional initial law with known first two moments.
struct InitialLaw {
  std::string name;
  std::function<double(RandomStream&)> sample;
  double mean = 0.0;
  double variance = 0.0;
};

InitialLaw gaussian_law(double mean, double variance);
// Equal-weight mixture of N(m1, v) and N(m2, v).
InitialLaw mixture_law(double m1, double m2, double component_variance);
// center + jump (1{U > 1 - p_up} - 1{U < p_down}) + noise_sd xi
InitialLaw ternary_law(double center, double jump, double p_down, double p_up, double noise_sd);

// ---------------------------------------------------------------- LQ

struct LqParams {
  int d = 100;
  double a = 1.0;   // drift A = a I
  double b = 1.0;   // control matrix B = b I
  double c = 1.0;   // diffusion C = c I
  double q = 2.0;
  double r = 2.0;
  double s = 1.0;
  double T = 1.0;
  std::vector<double> x0;  // empty means the zero vector
};

class LqProblem final : public SocpProblem {
 public:
  explicit LqProblem(LqParams params);
  const LqParams& params() const { return p_; }

  std::string id() const override { return "lq100"; }
  ProblemDims dims() const override { return {p_.d, p_.d, p_.d, p_.T}; }
  bool uses_z() const override { return false; }
  void sample_initial(RandomStream& rng, Span x0) const override;
  void drift(double t, CSpan x, CSpan u, Span out) const override;
  void diffusion(double t, CSpan x, CSpan u, Span out) const override;
  void apply_diffusion(double t, CSpan x, CSpan u, CSpan dw, Span out) const override;
  double running_cost(double t, CSpan x, CSpan u) const override;
  double terminal_cost(CSpan x) const override;
  void terminal_gradient(CSpan x, Span out) const override;
  void dx_hamiltonian(double t, CSpan x, CSpan y, CSpan z, CSpan u, Span out) const override;
  void du_hamiltonian(double t, CSpan x, CSpan y, CSpan z, CSpan u, Span out) const override;

 private:
  LqParams p_;
};

// p_t solving p' = -q - 2 a p + (b^2 / r) p^2, p_T = s, in closed form.
double riccati_lq(const LqParams& params, double t);
double riccati_lq(double t);  // default parameters
double riccati_lq_rk4(const LqParams& params, double t, int steps);
// u*(t, x) = -(b / r) p_t x
OracleControl lq_oracle(const LqParams& params);

// ---------------------------------------------------------------- HJB

enum class HjbTerminal { kG1, kG2 };

struct HjbParams {
  int d = 100;
  double lambda = 1.0;
  double T = 1.0;
  HjbTerminal g = HjbTerminal::kG1;
  std::vector<double> x0;  // empty means the zero vector
};

double hjb_terminal(HjbTerminal g, CSpan x);
void hjb_terminal_gradient(HjbTerminal g, CSpan x, Span out);

class HjbProblem final : public SocpProblem {
 public:
  explicit HjbProblem(HjbParams params);
  const HjbParams& params() const { return p_; }

  std::string id() const override { return "hjb"; }
  ProblemDims dims() const override { return {p_.d, p_.d, p_.d, p_.T}; }
  bool uses_z() const override { return false; }
  void sample_initial(RandomStream& rng, Span x0) const override;
  void drift(double t, CSpan x, CSpan u, Span out) const override;
  void diffusion(double t, CSpan x, CSpan u, Span out) const override;
  void apply_diffusion(double t, CSpan x, CSpan u, CSpan dw, Span out) const override;
  double running_cost(double t, CSpan x, CSpan u) const override;
  double terminal_cost(CSpan x) const override;
  void terminal_gradient(CSpan x, Span out) const override;
  void dx_hamiltonian(double t, CSpan x, CSpan y, CSpan z, CSpan u, Span out) const override;
  void du_hamiltonian(double t, CSpan x, CSpan y, CSpan z, CSpan u, Span out) const override;

 private:
  HjbParams p_;
  double drift_scale_;
};

// v(t, x) = -(1/lambda) ln E[exp(-lambda g(x + sqrt(2) W_{T-t}))], log-sum-exp
// stabilized; the standard error comes from the delta method on the log.
CostEstimate cole_hopf_value(double t, CSpan x, double lambda, HjbTerminal g, double T, int n_mc,
                             std::uint64_t seed);

// ---------------------------------------------------------------- inter-bank

struct InterbankParams {
  double kappa = 0.6;
  double q = 0.8;
  double eta = 2.0;
  double c = 2.0;
  double sigma = 1.0;
  double T = 0.2;
  InitialLaw law = gaussian_law(0.0, 0.25);
};

InitialLaw interbank_case_law(const std::string& case_id);

class InterbankProblem final : public MfcProblem {
 public:
  explicit InterbankProblem(InterbankParams params);
  const InterbankParams& params() const { return p_; }

  std::string id() const override { return "interbank"; }
  ProblemDims dims() const override { return {1, 1, 1, p_.T}; }
  bool uses_z() const override { return false; }
  void sample_initial(RandomStream& rng, Span x0) const override;
  void drift(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const override;
  void diffusion(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const override;
  double running_cost(double t, CSpan x, const MeasureSummary& mu, CSpan u) const override;
  double terminal_cost(CSpan x, const MeasureSummary& mu) const override;
  void terminal_gradient(CSpan x, const MeasureSummary& mu, Span out) const override;
  void dx_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                      Span out) const override;
  void du_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                      Span out) const override;
  int lions_rank() const override { return 1; }
  void lions_factors(double t, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan zj, CSpan uj,
                     Span out) const override;
  void lions_basis(double t, CSpan xi, const MeasureSummary& mu, Span out) const override;
  int terminal_lions_rank() const override { return 1; }
  void terminal_lions_factors(CSpan xj, const MeasureSummary& mu, Span out) const override;
  void terminal_lions_basis(CSpan xi, const MeasureSummary& mu, Span out) const override;

 private:
  InterbankParams p_;
};

// Same model with the law terms declared non-factorized, so the engine runs
// the O(M^2) kernel loop. Used to cross-check the fast path.
class InterbankKernelProblem final : public MfcProblem {
 public:
  explicit InterbankKernelProblem(InterbankParams params) : inner_(std::move(params)) {}
  std::string id() const override { return "interbank"; }
  ProblemDims dims() const override { return inner_.dims(); }
  bool uses_z() const override { return false; }
  void sample_initial(RandomStream& rng, Span x0) const override { inner_.sample_initial(rng, x0); }
  void drift(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const override {
    inner_.drift(t, x, mu, u, out);
  }
  void diffusion(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const override {
    inner_.diffusion(t, x, mu, u, out);
  }
  double running_cost(double t, CSpan x, const MeasureSummary& mu, CSpan u) const override {
    return inner_.running_cost(t, x, mu, u);
  }
  double terminal_cost(CSpan x, const MeasureSummary& mu) const override { return inner_.terminal_cost(x, mu); }
  void terminal_gradient(CSpan x, const MeasureSummary& mu, Span out) const override {
    inner_.terminal_gradient(x, mu, out);
  }
  void dx_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                      Span out) const override {
    inner_.dx_hamiltonian(t, x, mu, y, z, u, out);
  }
  void du_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                      Span out) const override {
    inner_.du_hamiltonian(t, x, mu, y, z, u, out);
  }
  bool lions_factorized() const override { return false; }
  int lions_rank() const override { return 1; }
  void lions_kernel(double t, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan zj, CSpan uj, CSpan xi,
                    Span out) const override;
  int terminal_lions_rank() const override { return 1; }
  void terminal_lions_kernel(CSpan xj, const MeasureSummary& mu, CSpan xi, Span out) const override;

 private:
  InterbankProblem inner_;
};

// P_t of the inter-bank Riccati equation P' = 2(kappa+q)P + 2P^2 + (q^2-eta)/2,
// P_T = c/2, in closed form; throws when kappa^2 + 2 kappa q + eta < 0.
double riccati_interbank(const InterbankParams& params, double t);
double riccati_interbank_rk4(const InterbankParams& params, double t, int steps);
// integral of P over [t, T]
double riccati_interbank_integral(const InterbankParams& params, double t);
// P_0 Var(mu_0) + sigma^2 int_0^T P
double interbank_value(const InterbankParams& params);
// alpha*(t, x, mu) = -(2 P_t + q)(x - mean)
OracleControl interbank_oracle(const InterbankParams& params);

// ---------------------------------------------------------------- mean-variance

struct MeanVarParams {
  double T = 0.2;
  double r = 0.0;
  double rho = 0.1;
  double theta = 0.4;
  double eta = 1.0;
  InitialLaw law = gaussian_law(0.1, 0.04);
};

InitialLaw meanvar_case_law(const std::string& case_id);

class MeanVarProblem final : public MfcProblem {
 public:
  explicit MeanVarProblem(MeanVarParams params);
  const MeanVarParams& params() const { return p_; }

  std::string id() const override { return "meanvar"; }
  ProblemDims dims() const override { return {1, 1, 1, p_.T}; }
  void sample_initial(RandomStream& rng, Span x0) const override;
  void drift(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const override;
  void diffusion(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const override;
  double running_cost(double t, CSpan x, const MeasureSummary& mu, CSpan u) const override;
  double terminal_cost(CSpan x, const MeasureSummary& mu) const override;
  void terminal_gradient(CSpan x, const MeasureSummary& mu, Span out) const override;
  void dx_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                      Span out) const override;
  void du_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                      Span out) const override;
  int terminal_lions_rank() const override { return 1; }
  void terminal_lions_factors(CSpan xj, const MeasureSummary& mu, Span out) const override;
  void terminal_lions_basis(CSpan xi, const MeasureSummary& mu, Span out) const override;

 private:
  MeanVarParams p_;
};

double meanvar_oracle_control(const MeanVarParams& params, double t, double x, double mean_x);
OracleControl meanvar_oracle(const MeanVarParams& params);
// V(t, x0, mu_0) for a law with the given mean
double meanvar_value_function(const MeanVarParams& params, double t, double x0, double mean_x0);
// expectation of V(0, X_0, mu_0) from the law's moments
double meanvar_value_exact(const MeanVarParams& params);
// Monte-Carlo average of V(0, X_0, mu_0) with the sample mean in place of E[X_0]
CostEstimate meanvar_oracle_value(const MeanVarParams& params, int n_mc, std::uint64_t seed);

// ---------------------------------------------------------------- price impact

struct PriceImpactParams {
  double T = 1.0;
  double c_alpha = 2.0;
  double c_x = 2.0;
  double gamma = 1.0;
  double c_g = 0.3;
  double sigma = 0.5;
  double x0_mean = 5.0;
  double x0_var = 0.3;
};

class PriceImpactProblem final : public MfcProblem {
 public:
  explicit PriceImpactProblem(PriceImpactParams params);
  const PriceImpactParams& params() const { return p_; }

  std::string id() const override { return "priceimpact"; }
  ProblemDims dims() const override { return {1, 1, 1, p_.T}; }
  bool uses_z() const override { return false; }
  void sample_initial(RandomStream& rng, Span x0) const override;
  void drift(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const override;
  void diffusion(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const override;
  double running_cost(double t, CSpan x, const MeasureSummary& mu, CSpan u) const override;
  double terminal_cost(CSpan x, const MeasureSummary& mu) const override;
  void terminal_gradient(CSpan x, const MeasureSummary& mu, Span out) const override;
  void dx_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                      Span out) const override;
  void du_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                      Span out) const override;
  int control_law_rank() const override { return 1; }
  void control_law_factors(double t, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan zj, CSpan uj,
                           Span out) const override;
  void control_law_basis(double t, CSpan xi, const MeasureSummary& mu, CSpan ui, Span out) const override;

 private:
  PriceImpactParams p_;
};

// Affine decoupling Y_t = eta_t X_t + chi_t E[X_t] of the price-impact
// adjoint, integrated backward with RK4 on a fine grid and interpolated by
// cubic Hermite splines. Also carries the optimal mean and variance paths.
class PriceImpactOracle {
 public:
  explicit PriceImpactOracle(PriceImpactParams params, int fine_steps = 20000);

  double eta(double t) const;
  double chi(double t) const;
  double mean(double t) const;
  double variance(double t) const;
  // alpha*(t, x, m) = -(eta_t x + (chi_t - gamma) m) / c_alpha
  double control(double t, double x, double mean_x) const;
  OracleControl as_oracle() const;

 private:
  static double interp(const std::vector<double>& v, const std::vector<double>& dv, double h, double t);

  PriceImpactParams p_;
  int steps_;
  double h_;
  std::vector<double> eta_, deta_, chi_, dchi_, mean_, dmean_, var_, dvar_;
};

// ---------------------------------------------------------------- sine

struct SineParams {
  double T = 0.5;
  double sigma = 0.05;
  double lo = -6.283185307179586;
  double hi = 3.141592653589793;
};

// State (x1, x2) with x2 = sin(x1) at time 0; the control moves x1 and the
// terminal cost penalizes (x1 - x2)^2 / 2. The policy sees x1 only.
class SineProblem final : public MfcProblem {
 public:
  explicit SineProblem(SineParams params);
  const SineParams& params() const { return p_; }

  std::string id() const override { return "sine"; }
  ProblemDims dims() const override { return {2, 2, 1, p_.T}; }
  bool uses_z() const override { return false; }
  int policy_input_dim() const override { return 1; }
  void policy_input(CSpan x, Span out) const override { out[0] = x[0]; }
  void sample_initial(RandomStream& rng, Span x0) const override;
  void drift(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const override;
  void diffusion(double t, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const override;
  void apply_diffusion(double t, CSpan x, const MeasureSummary& mu, CSpan u, CSpan dw, Span out) const override;
  double running_cost(double t, CSpan x, const MeasureSummary& mu, CSpan u) const override;
  double terminal_cost(CSpan x, const MeasureSummary& mu) const override;
  void terminal_gradient(CSpan x, const MeasureSummary& mu, Span out) const override;
  void dx_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                      Span out) const override;
  void du_hamiltonian(double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u,
                      Span out) const override;

 private:
  SineParams p_;
};

// Classical RK4 for a scalar ODE y' = f(t, y) from (t0, y0) to t1.
double rk4_scalar(const std::function<double(double, double)>& f, double t0, double y0, double t1, int steps);

}  // namespace pgp
