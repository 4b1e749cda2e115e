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
#include <numbers>
#include <stdexcept>

#include "pgp/benchmarks.hpp"

namespace pgp {

double hjb_terminal(HjbTerminal g, CSpan x) {
  if (g == HjbTerminal::kG1) {
    double xx = 0.0;
    for (double v : x) xx += v * v;
    return std::log(0.5 * (1.0 + xx));
  }
  double s = 0.0;
  for (double v : x) s += std::sin(v - 0.5 * std::numbers::pi) + std::sin(1.0 / (0.1 * std::numbers::pi + v * v));
  return s / static_cast<double>(x.size());
}

void hjb_terminal_gradient(HjbTerminal g, CSpan x, Span out) {
  if (g == HjbTerminal::kG1) {
    double xx = 0.0;
    for (double v : x) xx += v * v;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2.0 * x[i] / (1.0 + xx);
    return;
  }
  const double inv_d = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = 0.1 * std::numbers::pi + x[i] * x[i];
    out[i] = inv_d * (std::cos(x[i] - 0.5 * std::numbers::pi) - std::cos(1.0 / a) * 2.0 * x[i] / (a * a));
  }
}

HjbProblem::HjbProblem(HjbParams params) : p_(std::move(params)) {
  if (p_.d < 1) throw std::invalid_argument("hjb: d must be >= 1");
  if (!(p_.lambda > 0.0) || !(p_.T > 0.0)) throw std::invalid_argument("hjb: lambda and T must be positive");
  if (p_.x0.empty()) p_.x0.assign(static_cast<std::size_t>(p_.d), 0.0);
  if (static_cast<int>(p_.x0.size()) != p_.d) throw std::invalid_argument("hjb: x0 has wrong dimension");
  drift_scale_ = 2.0 * std::sqrt(p_.lambda);
}

void HjbProblem::sample_initial(RandomStream&, Span x0) const { std::copy(p_.x0.begin(), p_.x0.end(), x0.begin()); }

void HjbProblem::drift(double, CSpan, CSpan u, Span out) const {
  for (int i = 0; i < p_.d; ++i) out[i] = drift_scale_ * u[i];
}

void HjbProblem::diffusion(double, CSpan, CSpan, Span out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < p_.d; ++i) out[static_cast<std::size_t>(i * p_.d + i)] = std::numbers::sqrt2;
}

void HjbProblem::apply_diffusion(double, CSpan, CSpan, CSpan dw, Span out) const {
  for (int i = 0; i < p_.d; ++i) out[i] = std::numbers::sqrt2 * dw[i];
}

double HjbProblem::running_cost(double, CSpan, CSpan u) const {
  double uu = 0.0;
  for (int i = 0; i < p_.d; ++i) uu += u[i] * u[i];
  return uu;
}

double HjbProblem::terminal_cost(CSpan x) const { return hjb_terminal(p_.g, x); }

void HjbProblem::terminal_gradient(CSpan x, Span out) const { hjb_terminal_gradient(p_.g, x, out); }

void HjbProblem::dx_hamiltonian(double, CSpan, CSpan, CSpan, CSpan, Span out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

void HjbProblem::du_hamiltonian(double, CSpan, CSpan y, CSpan, CSpan u, Span out) const {
  for (int i = 0; i < p_.d; ++i) out[i] = 2.0 * u[i] + drift_scale_ * y[i];
}

}  // namespace pgp
