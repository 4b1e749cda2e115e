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

#include <string>

#include "pgp/problem.hpp"

namespace pgp::testing {

// Scalar SOCP with
//   b = a x + bu u + b0,  sigma = s0 + sx x,
//   f = q x^2 / 2 + r u^2 / 2 + f0,  g = gl x + gq x^2 / 2 + g0,
//   X_0 ~ N(x0, x0_sd^2).
struct ToyParams {
  double a = 0.0, bu = 0.0, b0 = 0.0;
  double s0 = 0.0, sx = 0.0;
  double q = 0.0, r = 0.0, f0 = 0.0;
  double gl = 0.0, gq = 0.0, g0 = 0.0;
  double x0 = 0.0, x0_sd = 0.0;
  double T = 1.0;
  double du_offset = 0.0;  // corrupts du_hamiltonian when nonzero
};

class ToyProblem final : public SocpProblem {
 public:
  explicit ToyProblem(ToyParams p) : p_(p) {}
  std::string id() const override { return "toy"; }
  ProblemDims dims() const override { return {1, 1, 1, p_.T}; }
  void sample_initial(RandomStream& rng, Span x0) const override {
    x0[0] = p_.x0 + (p_.x0_sd > 0.0 ? p_.x0_sd * rng.normal() : 0.0);
  }
  void drift(double, CSpan x, CSpan u, Span out) const override { out[0] = p_.a * x[0] + p_.bu * u[0] + p_.b0; }
  void diffusion(double, CSpan x, CSpan, Span out) const override { out[0] = p_.s0 + p_.sx * x[0]; }
  double running_cost(double, CSpan x, CSpan u) const override {
    return 0.5 * p_.q * x[0] * x[0] + 0.5 * p_.r * u[0] * u[0] + p_.f0;
  }
  double terminal_cost(CSpan x) const override { return p_.gl * x[0] + 0.5 * p_.gq * x[0] * x[0] + p_.g0; }
  void terminal_gradient(CSpan x, Span out) const override { out[0] = p_.gl + p_.gq * x[0]; }
  void dx_hamiltonian(double, CSpan x, CSpan y, CSpan z, CSpan, Span out) const override {
    out[0] = p_.a * y[0] + p_.sx * z[0] + p_.q * x[0];
  }
  void du_hamiltonian(double, CSpan, CSpan y, CSpan, CSpan u, Span out) const override {
    out[0] = p_.bu * y[0] + p_.r * u[0] + p_.du_offset;
  }

 private:
  ToyParams p_;
};

}  // namespace pgp::testing
