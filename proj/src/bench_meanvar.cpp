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

#include <cmath>
#include <stdexcept>

#include "pgp/benchmarks.hpp"

namespace pgp {

InitialLaw meanvar_case_law(const std::string& case_id) {
  const double m4 = 0.1 - std::sqrt(3.0) / 10.0;
  if (case_id.empty() || case_id == "default" || case_id == "case1") return gaussian_law(0.1, 0.04);
  if (case_id == "case2") return gaussian_law(0.2, 0.025 * 0.025);
  if (case_id == "case3") return gaussian_law(0.3, 0.025 * 0.025);
  // the two listed components are mixed with weight 1/2 each
  if (case_id == "case4") return mixture_law(m4, m4, 0.01);
  if (case_id == "case5") return mixture_law(-0.05, -0.05, 0.01);
  if (case_id == "case6") return ternary_law(0.2, 0.3, 0.4, 0.4, 0.07);
  throw std::invalid_argument("unknown meanvar case_id '" + case_id + "'");
}

MeanVarProblem::MeanVarProblem(MeanVarParams params) : p_(std::move(params)) {
  if (!(p_.theta > 0.0)) throw std::invalid_argument("meanvar: theta must be positive");
  if (!(p_.T > 0.0)) throw std::invalid_argument("meanvar: T must be positive");
  if (!p_.law.sample) throw std::invalid_argument("meanvar: missing initial law");
}

void MeanVarProblem::sample_initial(RandomStream& rng, Span x0) const { x0[0] = p_.law.sample(rng); }

void MeanVarProblem::drift(double, CSpan x, const MeasureSummary&, CSpan u, Span out) const {
  out[0] = p_.r * x[0] + p_.rho * u[0];
}

void MeanVarProblem::diffusion(double, CSpan, const MeasureSummary&, CSpan u, Span out) const {
  out[0] = p_.theta * u[0];
}

double MeanVarProblem::running_cost(double, CSpan, const MeasureSummary&, CSpan) const { return 0.0; }

double MeanVarProblem::terminal_cost(CSpan x, const MeasureSummary& mu) const {
  const double m = mu.mean_state(0);
  return 0.5 * p_.eta * x[0] * x[0] - x[0] - 0.5 * p_.eta * m * m;
}

void MeanVarProblem::terminal_gradient(CSpan x, const MeasureSummary&, Span out) const {
  out[0] = p_.eta * x[0] - 1.0;
}

void MeanVarProblem::dx_hamiltonian(double, CSpan, const MeasureSummary&, CSpan y, CSpan, CSpan, Span out) const {
  out[0] = p_.r * y[0];
}

void MeanVarProblem::du_hamiltonian(double, CSpan, const MeasureSummary&, CSpan y, CSpan z, CSpan, Span out) const {
  out[0] = p_.rho * y[0] + p_.theta * z[0];
}

void MeanVarProblem::terminal_lions_factors(CSpan, const MeasureSummary& mu, Span out) const {
  out[0] = -p_.eta * mu.mean_state(0);
}

void MeanVarProblem::terminal_lions_basis(CSpan, const MeasureSummary&, Span out) const { out[0] = 1.0; }

double meanvar_oracle_control(const MeanVarParams& p, double t, double x, double mean_x) {
  // exp(+a (T - t)): the optimum of the cost, and the control whose cost
  // equals meanvar_value_function
  const double a = p.rho * p.rho / (p.theta * p.theta);
  return -(p.rho / (p.theta * p.theta)) * (x - mean_x - std::exp(a * (p.T - t)) / p.eta);
}

OracleControl meanvar_oracle(const MeanVarParams& params) {
  return [params](double t, CSpan x, const MeasureSummary& mu, Span u) {
    u[0] = meanvar_oracle_control(params, t, x[0], mu.mean_state(0));
  };
}

double meanvar_value_function(const MeanVarParams& p, double t, double x0, double mean_x0) {
  const double a = p.rho * p.rho / (p.theta * p.theta);
  const double dev = x0 - mean_x0;
  return 0.5 * p.eta * std::exp(-a * (p.T - t)) * dev * dev - x0 - (std::exp(a * (p.T - t)) - 1.0) / (2.0 * p.eta);
}

double meanvar_value_exact(const MeanVarParams& p) {
  const double a = p.rho * p.rho / (p.theta * p.theta);
  return 0.5 * p.eta * std::exp(-a * p.T) * p.law.variance - p.law.mean - (std::exp(a * p.T) - 1.0) / (2.0 * p.eta);
}

CostEstimate meanvar_oracle_value(const MeanVarParams& p, int n_mc, std::uint64_t seed) {
  if (n_mc < 2) throw std::invalid_argument("meanvar_oracle_value: n_mc must be >= 2");
  std::vector<double> x(static_cast<std::size_t>(n_mc));
  for (std::size_t i = 0; i < x.size(); ++i) {
    RandomStream rng(SeedSpec{seed, i, substream_tag(Purpose::kOracle, 2)});
    x[i] = p.law.sample(rng);
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n_mc;
  double s = 0.0;
  for (double& v : x) {
    v = meanvar_value_function(p, 0.0, v, mean);
    s += v;
  }
  const double avg = s / n_mc;
  double ss = 0.0;
  for (double v : x) ss += (v - avg) * (v - avg);
  return {avg, std::sqrt(ss / (n_mc - 1.0) / n_mc)};
}

}  // namespace pgp
