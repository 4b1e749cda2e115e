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

SineProblem::SineProblem(SineParams params) : p_(params) {
  if (!(p_.sigma >= 0.0)) throw std::invalid_argument("sine: sigma must be >= 0");
  if (!(p_.hi > p_.lo)) throw std::invalid_argument("sine: empty domain");
  if (!(p_.T > 0.0)) throw std::invalid_argument("sine: T must be positive");
}

void SineProblem::sample_initial(RandomStream& rng, Span x0) const {
  x0[0] = p_.lo + (p_.hi - p_.lo) * rng.uniform();
  x0[1] = std::sin(x0[0]);
}

void SineProblem::drift(double, CSpan, const MeasureSummary&, CSpan u, Span out) const {
  out[0] = u[0];
  out[1] = 0.0;
}

void SineProblem::diffusion(double, CSpan, const MeasureSummary&, CSpan, Span out) const {
  out[0] = p_.sigma;
  out[1] = 0.0;
  out[2] = 0.0;
  out[3] = p_.sigma;
}

void SineProblem::apply_diffusion(double, CSpan, const MeasureSummary&, CSpan, CSpan dw, Span out) const {
  out[0] = p_.sigma * dw[0];
  out[1] = p_.sigma * dw[1];
}

double SineProblem::running_cost(double, CSpan, const MeasureSummary&, CSpan) const { return 0.0; }

double SineProblem::terminal_cost(CSpan x, const MeasureSummary&) const {
  const double gap = x[0] - x[1];
  return 0.5 * gap * gap;
}

void SineProblem::terminal_gradient(CSpan x, const MeasureSummary&, Span out) const {
  out[0] = x[0] - x[1];
  out[1] = x[1] - x[0];
}

void SineProblem::dx_hamiltonian(double, CSpan, const MeasureSummary&, CSpan, CSpan, CSpan, Span out) const {
  out[0] = 0.0;
  out[1] = 0.0;
}

void SineProblem::du_hamiltonian(double, CSpan, const MeasureSummary&, CSpan y, CSpan, CSpan, Span out) const {
  out[0] = y[0];
}

}  // namespace pgp
