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

PriceImpactProblem::PriceImpactProblem(PriceImpactParams params) : p_(params) {
  if (!(p_.c_alpha > 0.0)) throw std::invalid_argument("priceimpact: c_alpha must be positive");
  if (!(p_.T > 0.0)) throw std::invalid_argument("priceimpact: T must be positive");
  if (!(p_.x0_var >= 0.0)) throw std::invalid_argument("priceimpact: x0_var must be >= 0");
}

void PriceImpactProblem::sample_initial(RandomStream& rng, Span x0) const {
  x0[0] = p_.x0_mean + std::sqrt(p_.x0_var) * rng.normal();
}

void PriceImpactProblem::drift(double, CSpan, const MeasureSummary&, CSpan u, Span out) const { out[0] = u[0]; }

void PriceImpactProblem::diffusion(double, CSpan, const MeasureSummary&, CSpan, Span out) const {
  out[0] = p_.sigma;
}

double PriceImpactProblem::running_cost(double, CSpan x, const MeasureSummary& mu, CSpan u) const {
  return 0.5 * p_.c_alpha * u[0] * u[0] + 0.5 * p_.c_x * x[0] * x[0] - p_.gamma * x[0] * mu.mean_control(0);
}

double PriceImpactProblem::terminal_cost(CSpan x, const MeasureSummary&) const { return 0.5 * p_.c_g * x[0] * x[0]; }

void PriceImpactProblem::terminal_gradient(CSpan x, const MeasureSummary&, Span out) const {
  out[0] = p_.c_g * x[0];
}

void PriceImpactProblem::dx_hamiltonian(double, CSpan x, const MeasureSummary& mu, CSpan, CSpan, CSpan,
                                        Span out) const {
  out[0] = p_.c_x * x[0] - p_.gamma * mu.mean_control(0);
}

void PriceImpactProblem::du_hamiltonian(double, CSpan, const MeasureSummary&, CSpan y, CSpan, CSpan u,
                                        Span out) const {
  out[0] = y[0] + p_.c_alpha * u[0];
}

void PriceImpactProblem::control_law_factors(double, CSpan xj, const MeasureSummary&, CSpan, CSpan, CSpan,
                                             Span out) const {
  out[0] = -p_.gamma * xj[0];
}

void PriceImpactProblem::control_law_basis(double, CSpan, const MeasureSummary&, CSpan, Span out) const {
  out[0] = 1.0;
}

PriceImpactOracle::PriceImpactOracle(PriceImpactParams params, int fine_steps) : p_(params) {
  if (fine_steps < 2 || fine_steps % 2 != 0) throw std::invalid_argument("PriceImpactOracle: fine_steps must be even");
  if (!(p_.c_alpha > 0.0)) throw std::invalid_argument("PriceImpactOracle: c_alpha must be positive");
  steps_ = fine_steps;
  h_ = p_.T / steps_;
  const double ca = p_.c_alpha, cx = p_.c_x, g = p_.gamma;
  auto deta = [&](double e) { return e * e / ca - cx; };
  auto dchi = [&](double e, double c) { return (c - g) * (2.0 * e + c - g) / ca; };

  const auto n = static_cast<std::size_t>(steps_ + 1);
  eta_.assign(n, 0.0);
  chi_.assign(n, 0.0);
  eta_[n - 1] = p_.c_g;
  chi_[n - 1] = 0.0;
  for (std::size_t k = n - 1; k > 0; --k) {
    // backward RK4 step of size -h for the coupled (eta, chi) system
    const double hh = -h_;
    const double e = eta_[k], c = chi_[k];
    const double k1e = deta(e), k1c = dchi(e, c);
    const double k2e = deta(e + 0.5 * hh * k1e), k2c = dchi(e + 0.5 * hh * k1e, c + 0.5 * hh * k1c);
    const double k3e = deta(e + 0.5 * hh * k2e), k3c = dchi(e + 0.5 * hh * k2e, c + 0.5 * hh * k2c);
    const double k4e = deta(e + hh * k3e), k4c = dchi(e + hh * k3e, c + hh * k3c);
    eta_[k - 1] = e + hh * (k1e + 2.0 * k2e + 2.0 * k3e + k4e) / 6.0;
    chi_[k - 1] = c + hh * (k1c + 2.0 * k2c + 2.0 * k3c + k4c) / 6.0;
    if (!std::isfinite(eta_[k - 1]) || !std::isfinite(chi_[k - 1]))
      throw std::runtime_error("PriceImpactOracle: ODE integration failed");
  }
  deta_.resize(n);
  dchi_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    deta_[k] = deta(eta_[k]);
    dchi_[k] = dchi(eta_[k], chi_[k]);
  }

  // mean and variance on the even nodes (step 2h, odd nodes give exact midpoints)
  const auto nc = static_cast<std::size_t>(steps_ / 2 + 1);
  auto dmean = [&](std::size_t k, double m) { return -(eta_[k] + chi_[k] - g) * m / ca; };
  auto dvar = [&](std::size_t k, double v) { return -2.0 * eta_[k] / ca * v + p_.sigma * p_.sigma; };
  mean_.assign(nc, 0.0);
  var_.assign(nc, 0.0);
  mean_[0] = p_.x0_mean;
  var_[0] = p_.x0_var;
  const double H = 2.0 * h_;
  for (std::size_t j = 0; j + 1 < nc; ++j) {
    const std::size_t k = 2 * j;
    const double m = mean_[j], v = var_[j];
    const double k1m = dmean(k, m), k1v = dvar(k, v);
    const double k2m = dmean(k + 1, m + 0.5 * H * k1m), k2v = dvar(k + 1, v + 0.5 * H * k1v);
    const double k3m = dmean(k + 1, m + 0.5 * H * k2m), k3v = dvar(k + 1, v + 0.5 * H * k2v);
    const double k4m = dmean(k + 2, m + H * k3m), k4v = dvar(k + 2, v + H * k3v);
    mean_[j + 1] = m + H * (k1m + 2.0 * k2m + 2.0 * k3m + k4m) / 6.0;
    var_[j + 1] = v + H * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0;
  }
  dmean_.resize(nc);
  dvar_.resize(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    dmean_[j] = dmean(2 * j, mean_[j]);
    dvar_[j] = dvar(2 * j, var_[j]);
  }
}

double PriceImpactOracle::interp(const std::vector<double>& v, const std::vector<double>& dv, double h, double t) {
  const auto last = static_cast<double>(v.size() - 1);
  const double s = std::min(std::max(t / h, 0.0), last);
  auto k = static_cast<std::size_t>(std::floor(s));
  if (k + 1 >= v.size()) k = v.size() - 2;
  const double u = s - static_cast<double>(k);
  const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
  const double h10 = u * (1.0 - u) * (1.0 - u);
  const double h01 = u * u * (3.0 - 2.0 * u);
  const double h11 = u * u * (u - 1.0);
  return h00 * v[k] + h10 * h * dv[k] + h01 * v[k + 1] + h11 * h * dv[k + 1];
}

double PriceImpactOracle::eta(double t) const { return interp(eta_, deta_, h_, t); }
double PriceImpactOracle::chi(double t) const { return interp(chi_, dchi_, h_, t); }
double PriceImpactOracle::mean(double t) const { return interp(mean_, dmean_, 2.0 * h_, t); }
double PriceImpactOracle::variance(double t) const { return interp(var_, dvar_, 2.0 * h_, t); }

double PriceImpactOracle::control(double t, double x, double mean_x) const {
  return -(eta(t) * x + (chi(t) - p_.gamma) * mean_x) / p_.c_alpha;
}

OracleControl PriceImpactOracle::as_oracle() const {
  return [self = *this](double t, CSpan x, const MeasureSummary& mu, Span u) {
    u[0] = self.control(t, x[0], mu.mean_state(0));
  };
}

}  // namespace pgp
