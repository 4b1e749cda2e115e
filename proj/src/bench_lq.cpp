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

LqProblem::LqProblem(LqParams params) : p_(std::move(params)) {
  if (p_.d < 1) throw std::invalid_argument("lq: d must be >= 1");
  if (!(p_.r > 0.0) || !(p_.T > 0.0)) throw std::invalid_argument("lq: r and T must be positive");
  if (p_.x0.empty()) p_.x0.assign(static_cast<std::size_t>(p_.d), 0.0);
  if (static_cast<int>(p_.x0.size()) != p_.d) throw std::invalid_argument("lq: x0 has wrong dimension");
}

void LqProblem::sample_initial(RandomStream&, Span x0) const { std::copy(p_.x0.begin(), p_.x0.end(), x0.begin()); }

void LqProblem::drift(double, CSpan x, CSpan u, Span out) const {
  for (int i = 0; i < p_.d; ++i) out[i] = p_.a * x[i] + p_.b * u[i];
}

void LqProblem::diffusion(double, CSpan, CSpan, Span out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < p_.d; ++i) out[static_cast<std::size_t>(i * p_.d + i)] = p_.c;
}

void LqProblem::apply_diffusion(double, CSpan, CSpan, CSpan dw, Span out) const {
  for (int i = 0; i < p_.d; ++i) out[i] = p_.c * dw[i];
}

double LqProblem::running_cost(double, CSpan x, CSpan u) const {
  double xx = 0.0, uu = 0.0;
  for (int i = 0; i < p_.d; ++i) {
    xx += x[i] * x[i];
    uu += u[i] * u[i];
  }
  return 0.5 * (p_.q * xx + p_.r * uu);
}

double LqProblem::terminal_cost(CSpan x) const {
  double xx = 0.0;
  for (int i = 0; i < p_.d; ++i) xx += x[i] * x[i];
  return 0.5 * p_.s * xx;
}

void LqProblem::terminal_gradient(CSpan x, Span out) const {
  for (int i = 0; i < p_.d; ++i) out[i] = p_.s * x[i];
}

void LqProblem::dx_hamiltonian(double, CSpan x, CSpan y, CSpan, CSpan, Span out) const {
  for (int i = 0; i < p_.d; ++i) out[i] = p_.a * y[i] + p_.q * x[i];
}

void LqProblem::du_hamiltonian(double, CSpan, CSpan y, CSpan, CSpan u, Span out) const {
  for (int i = 0; i < p_.d; ++i) out[i] = p_.b * y[i] + p_.r * u[i];
}

double riccati_lq(const LqParams& p, double t) {
  if (t < 0.0 || t > p.T) throw std::invalid_argument("riccati_lq: t outside [0, T]");
  const double k = p.b * p.b / p.r;
  if (k == 0.0) {
    // linear ODE p' = -q - 2 a p
    if (p.a == 0.0) return p.s + p.q * (p.T - t);
    const double e = std::exp(2.0 * p.a * (p.T - t));
    return (p.s + p.q / (2.0 * p.a)) * e - p.q / (2.0 * p.a);
  }
  const double root = std::sqrt(p.a * p.a + k * p.q);
  const double p1 = (p.a + root) / k;
  const double p2 = (p.a - root) / k;
  const double g = (p.s - p1) / (p.s - p2);
  const double e = g * std::exp(k * (p1 - p2) * (t - p.T));
  return (p1 - p2 * e) / (1.0 - e);
}

double riccati_lq(double t) { return riccati_lq(LqParams{}, t); }

double riccati_lq_rk4(const LqParams& p, double t, int steps) {
  const double k = p.b * p.b / p.r;
  return rk4_scalar([&](double, double v) { return -p.q - 2.0 * p.a * v + k * v * v; }, p.T, p.s, t, steps);
}

OracleControl lq_oracle(const LqParams& params) {
  return [params](double t, CSpan x, const MeasureSummary&, Span u) {
    const double gain = -(params.b / params.r) * riccati_lq(params, std::min(std::max(t, 0.0), params.T));
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = gain * x[i];
  };
}

}  // namespace pgp
