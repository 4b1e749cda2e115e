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

InitialLaw interbank_case_law(const std::string& case_id) {
  const double s3 = std::sqrt(3.0) / 10.0;
  if (case_id.empty() || case_id == "default") return gaussian_law(0.0, 0.25);
  if (case_id == "case1") return gaussian_law(0.1, 0.04);
  if (case_id == "case2") return gaussian_law(0.2, 0.0025);
  if (case_id == "case3") return gaussian_law(0.3, 0.0025);
  if (case_id == "case4") return mixture_law(0.1 - s3, 0.1 + s3, 0.01);
  if (case_id == "case5") return mixture_law(-0.2, 0.3, 0.01);
  if (case_id == "case6") return ternary_law(0.2, 0.3, 1.0 / 3.0, 1.0 / 3.0, 0.07);
  throw std::invalid_argument("unknown interbank case_id '" + case_id + "'");
}

InterbankProblem::InterbankProblem(InterbankParams params) : p_(std::move(params)) {
  if (!(p_.T > 0.0)) throw std::invalid_argument("interbank: T must be positive");
  if (!p_.law.sample) throw std::invalid_argument("interbank: missing initial law");
}

void InterbankProblem::sample_initial(RandomStream& rng, Span x0) const { x0[0] = p_.law.sample(rng); }

void InterbankProblem::drift(double, CSpan x, const MeasureSummary& mu, CSpan u, Span out) const {
  out[0] = p_.kappa * (mu.mean_state(0) - x[0]) + u[0];
}

void InterbankProblem::diffusion(double, CSpan, const MeasureSummary&, CSpan, Span out) const { out[0] = p_.sigma; }

double InterbankProblem::running_cost(double, CSpan x, const MeasureSummary& mu, CSpan u) const {
  const double gap = mu.mean_state(0) - x[0];
  return 0.5 * u[0] * u[0] - p_.q * u[0] * gap + 0.5 * p_.eta * gap * gap;
}

double InterbankProblem::terminal_cost(CSpan x, const MeasureSummary& mu) const {
  const double gap = mu.mean_state(0) - x[0];
  return 0.5 * p_.c * gap * gap;
}

void InterbankProblem::terminal_gradient(CSpan x, const MeasureSummary& mu, Span out) const {
  out[0] = p_.c * (x[0] - mu.mean_state(0));
}

void InterbankProblem::dx_hamiltonian(double, CSpan x, const MeasureSummary& mu, CSpan y, CSpan, CSpan u,
                                      Span out) const {
  out[0] = -p_.kappa * y[0] + p_.q * u[0] + p_.eta * (x[0] - mu.mean_state(0));
}

void InterbankProblem::du_hamiltonian(double, CSpan x, const MeasureSummary& mu, CSpan y, CSpan, CSpan u,
                                      Span out) const {
  out[0] = y[0] + u[0] - p_.q * (mu.mean_state(0) - x[0]);
}

void InterbankProblem::lions_factors(double, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan, CSpan uj,
                                     Span out) const {
  out[0] = p_.kappa * yj[0] - p_.q * uj[0] + p_.eta * (mu.mean_state(0) - xj[0]);
}

void InterbankProblem::lions_basis(double, CSpan, const MeasureSummary&, Span out) const { out[0] = 1.0; }

void InterbankProblem::terminal_lions_factors(CSpan xj, const MeasureSummary& mu, Span out) const {
  out[0] = p_.c * (mu.mean_state(0) - xj[0]);
}

void InterbankProblem::terminal_lions_basis(CSpan, const MeasureSummary&, Span out) const { out[0] = 1.0; }

void InterbankKernelProblem::lions_kernel(double t, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan zj, CSpan uj,
                                          CSpan, Span out) const {
  inner_.lions_factors(t, xj, mu, yj, zj, uj, out);
}

void InterbankKernelProblem::terminal_lions_kernel(CSpan xj, const MeasureSummary& mu, CSpan, Span out) const {
  inner_.terminal_lions_factors(xj, mu, out);
}

namespace {

struct InterbankRoots {
  double r1, r2, gamma;
};

InterbankRoots interbank_roots(const InterbankParams& p) {
  const double disc = p.kappa * p.kappa + 2.0 * p.kappa * p.q + p.eta;
  if (disc < 0.0) throw std::invalid_argument("parameters violate kappa^2+2 kappa q+eta >= 0");
  const double g = std::sqrt(disc);
  return {0.5 * (-(p.kappa + p.q) + g), 0.5 * (-(p.kappa + p.q) - g), g};
}

constexpr double kRepeatedRoot = 1e-10;

}  // namespace

double riccati_interbank(const InterbankParams& p, double t) {
  const InterbankRoots r = interbank_roots(p);
  const double pt = 0.5 * p.c;
  const double tau = p.T - t;
  if (r.gamma < kRepeatedRoot) {
    // P' = 2 (P - r)^2
    if (pt == r.r1) return pt;
    return r.r1 + 1.0 / (1.0 / (pt - r.r1) + 2.0 * tau);
  }
  if (pt == r.r2) return pt;
  const double C = (pt - r.r1) / (pt - r.r2);
  const double e = C * std::exp(-2.0 * r.gamma * tau);
  return (r.r1 - r.r2 * e) / (1.0 - e);
}

double riccati_interbank_rk4(const InterbankParams& p, double t, int steps) {
  return rk4_scalar(
      [&](double, double v) { return 2.0 * (p.kappa + p.q) * v + 2.0 * v * v + 0.5 * (p.q * p.q - p.eta); }, p.T,
      0.5 * p.c, t, steps);
}

double riccati_interbank_integral(const InterbankParams& p, double t) {
  const InterbankRoots r = interbank_roots(p);
  const double pt = 0.5 * p.c;
  const double tau = p.T - t;
  if (r.gamma < kRepeatedRoot) {
    if (pt == r.r1) return pt * tau;
    const double a = 1.0 / (pt - r.r1);
    return r.r1 * tau + 0.5 * std::log((a + 2.0 * tau) / a);
  }
  if (pt == r.r2) return pt * tau;
  const double C = (pt - r.r1) / (pt - r.r2);
  return r.r1 * tau + 0.5 * std::log((1.0 - C * std::exp(-2.0 * r.gamma * tau)) / (1.0 - C));
}

double interbank_value(const InterbankParams& p) {
  return riccati_interbank(p, 0.0) * p.law.variance + p.sigma * p.sigma * riccati_interbank_integral(p, 0.0);
}

OracleControl interbank_oracle(const InterbankParams& params) {
  return [params](double t, CSpan x, const MeasureSummary& mu, Span u) {
    const double P = riccati_interbank(params, std::min(std::max(t, 0.0), params.T));
    u[0] = -(2.0 * P + params.q) * (x[0] - mu.mean_state(0));
  };
}

}  // namespace pgp
