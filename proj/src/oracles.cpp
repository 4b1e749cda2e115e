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
#include "pgp/parallel.hpp"

namespace pgp {

InitialLaw gaussian_law(double mean, double variance) {
  if (!(variance >= 0.0)) throw std::invalid_argument("gaussian_law: negative variance");
  const double sd = std::sqrt(variance);
  InitialLaw law;
  law.name = "gaussian";
  law.mean = mean;
  law.variance = variance;
  law.sample = [mean, sd](RandomStream& rng) { return mean + sd * rng.normal(); };
  return law;
}

InitialLaw mixture_law(double m1, double m2, double component_variance) {
  const double sd = std::sqrt(component_variance);
  InitialLaw law;
  law.name = "mixture";
  law.mean = 0.5 * (m1 + m2);
  law.variance = component_variance + 0.25 * (m1 - m2) * (m1 - m2);
  law.sample = [m1, m2, sd](RandomStream& rng) {
    const double pick = rng.uniform();
    return (pick < 0.5 ? m1 : m2) + sd * rng.normal();
  };
  return law;
}

InitialLaw ternary_law(double center, double jump, double p_down, double p_up, double noise_sd) {
  InitialLaw law;
  law.name = "ternary";
  law.mean = center + jump * (p_up - p_down);
  const double second = jump * jump * (p_up + p_down);
  const double shift = jump * (p_up - p_down);
  law.variance = second - shift * shift + noise_sd * noise_sd;
  law.sample = [=](RandomStream& rng) {
    const double u = rng.uniform();
    const double s = (u > 1.0 - p_up ? 1.0 : 0.0) - (u < p_down ? 1.0 : 0.0);
    return center + jump * s + noise_sd * rng.normal();
  };
  return law;
}

double rk4_scalar(const std::function<double(double, double)>& f, double t0, double y0, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  double y = y0;
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * h;
    const double k1 = f(t, y);
    const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = f(t + h, y + h * k3);
    y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  }
  return y;
}

CostEstimate cole_hopf_value(double t, CSpan x, double lambda, HjbTerminal g, double T, int n_mc,
                             std::uint64_t seed) {
  if (!(lambda > 0.0)) throw std::invalid_argument("cole_hopf_value: lambda must be positive");
  if (t > T) throw std::invalid_argument("cole_hopf_value: t must not exceed T");
  if (t == T) return {hjb_terminal(g, x), 0.0};
  if (n_mc < 2) throw std::invalid_argument("cole_hopf_value: n_mc must be >= 2");
  const std::size_t d = x.size();
  const double scale = std::sqrt(2.0 * (T - t));
  std::vector<double> a(static_cast<std::size_t>(n_mc));
  parallel_chunks(a.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> pt(d);
    for (std::size_t r = begin; r < end; ++r) {
      const RandomStream rng(SeedSpec{seed, r, substream_tag(Purpose::kOracle, 1)});
      rng.normals(0, static_cast<int>(d), scale, pt.data());
      for (std::size_t k = 0; k < d; ++k) pt[k] += x[k];
      a[r] = -lambda * hjb_terminal(g, pt);
    }
  });
  double amax = a[0];
  for (double v : a) amax = std::max(amax, v);
  double s = 0.0, s2 = 0.0;
  for (double v : a) {
    const double w = std::exp(v - amax);
    s += w;
    s2 += w * w;
  }
  const double n = n_mc;
  const double mean_w = s / n;
  const double var_w = std::max(0.0, (s2 / n - mean_w * mean_w) * n / (n - 1.0));
  const double value = -(amax + std::log(mean_w)) / lambda;
  const double se = std::sqrt(var_w / n) / mean_w / lambda;
  return {value, se};
}

}  // namespace pgp
