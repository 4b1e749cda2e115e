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

#include "pgp/problem.hpp"

#include <cmath>
#include <stdexcept>

#include "pgp/parallel.hpp"

namespace pgp {

void ProblemBase::policy_input(CSpan x, Span out) const { std::copy(x.begin(), x.end(), out.begin()); }

void SocpProblem::apply_diffusion(double t, CSpan x, CSpan u, CSpan dw, Span out) const {
  const ProblemDims dm = dims();
  std::vector<double> sigma(static_cast<std::size_t>(dm.d * dm.m));
  diffusion(t, x, u, sigma);
  for (int i = 0; i < dm.d; ++i) {
    double s = 0.0;
    for (int j = 0; j < dm.m; ++j) s += sigma[static_cast<std::size_t>(i * dm.m + j)] * dw[j];
    out[i] = s;
  }
}

void MfcProblem::interactions(CSpan, Span, Span) const {}

void MfcProblem::apply_diffusion(double t, CSpan x, const MeasureSummary& mu, CSpan u, CSpan dw,
                                 Span out) const {
  const ProblemDims dm = dims();
  std::vector<double> sigma(static_cast<std::size_t>(dm.d * dm.m));
  diffusion(t, x, mu, u, sigma);
  for (int i = 0; i < dm.d; ++i) {
    double s = 0.0;
    for (int j = 0; j < dm.m; ++j) s += sigma[static_cast<std::size_t>(i * dm.m + j)] * dw[j];
    out[i] = s;
  }
}

void MfcProblem::lions_factors(double, CSpan, const MeasureSummary&, CSpan, CSpan, CSpan, Span) const {}
void MfcProblem::lions_basis(double, CSpan, const MeasureSummary&, Span) const {}
void MfcProblem::terminal_lions_factors(CSpan, const MeasureSummary&, Span) const {}
void MfcProblem::terminal_lions_basis(CSpan, const MeasureSummary&, Span) const {}
void MfcProblem::control_law_factors(double, CSpan, const MeasureSummary&, CSpan, CSpan, CSpan, Span) const {}
void MfcProblem::control_law_basis(double, CSpan, const MeasureSummary&, CSpan, Span) const {}

namespace {

void contract(CSpan basis, CSpan factors, int rows, Span out) {
  const int k = static_cast<int>(factors.size());
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int c = 0; c < k; ++c) s += basis[static_cast<std::size_t>(r * k + c)] * factors[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = s;
  }
}

}  // namespace

void MfcProblem::lions_kernel(double t, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan zj, CSpan uj, CSpan xi,
                              Span out) const {
  const int k = lions_rank();
  const int d = dims().d;
  std::vector<double> f(static_cast<std::size_t>(k)), b(static_cast<std::size_t>(d * k));
  lions_factors(t, xj, mu, yj, zj, uj, f);
  lions_basis(t, xi, mu, b);
  contract(b, f, d, out);
}

void MfcProblem::terminal_lions_kernel(CSpan xj, const MeasureSummary& mu, CSpan xi, Span out) const {
  const int k = terminal_lions_rank();
  const int d = dims().d;
  std::vector<double> f(static_cast<std::size_t>(k)), b(static_cast<std::size_t>(d * k));
  terminal_lions_factors(xj, mu, f);
  terminal_lions_basis(xi, mu, b);
  contract(b, f, d, out);
}

void MfcProblem::control_law_kernel(double t, CSpan xj, const MeasureSummary& mu, CSpan yj, CSpan zj, CSpan uj,
                                    CSpan xi, CSpan ui, Span out) const {
  const int k = control_law_rank();
  const int d1 = dims().d1;
  std::vector<double> f(static_cast<std::size_t>(k)), b(static_cast<std::size_t>(d1 * k));
  control_law_factors(t, xj, mu, yj, zj, uj, f);
  control_law_basis(t, xi, mu, ui, b);
  contract(b, f, d1, out);
}

namespace {

template <class DiffusionFn, class DriftFn, class CostFn>
double assemble_h(const ProblemDims& dm, CSpan y, CSpan z, DriftFn drift_fn, DiffusionFn diff_fn, CostFn cost_fn) {
  std::vector<double> b(static_cast<std::size_t>(dm.d)), s(static_cast<std::size_t>(dm.d * dm.m));
  drift_fn(Span(b));
  diff_fn(Span(s));
  double h = cost_fn();
  for (int i = 0; i < dm.d; ++i) h += b[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  for (std::size_t k = 0; k < s.size(); ++k) h += s[k] * z[k];
  return h;
}

}  // namespace

double hamiltonian(const SocpProblem& p, double t, CSpan x, CSpan y, CSpan z, CSpan u) {
  return assemble_h(
      p.dims(), y, z, [&](Span b) { p.drift(t, x, u, b); }, [&](Span s) { p.diffusion(t, x, u, s); },
      [&] { return p.running_cost(t, x, u); });
}

double hamiltonian(const MfcProblem& p, double t, CSpan x, const MeasureSummary& mu, CSpan y, CSpan z, CSpan u) {
  return assemble_h(
      p.dims(), y, z, [&](Span b) { p.drift(t, x, mu, u, b); }, [&](Span s) { p.diffusion(t, x, mu, u, s); },
      [&] { return p.running_cost(t, x, mu, u); });
}

namespace {

template <class HFn, class DxFn, class DuFn>
PartialCheckReport check_partials(const ProblemDims& dm, int n_points, double eps, std::uint64_t seed,
                                  const std::function<void(RandomStream&)>& prepare, HFn h, DxFn dx, DuFn du) {
  PartialCheckReport rep;
  RandomStream rng(SeedSpec{seed, 0, substream_tag(Purpose::kTest, 1)});
  std::vector<double> x(static_cast<std::size_t>(dm.d)), y(x.size()), z(static_cast<std::size_t>(dm.d * dm.m)),
      u(static_cast<std::size_t>(dm.d1)), gx(x.size()), gu(u.size());
  for (int p = 0; p < n_points; ++p) {
    prepare(rng);
    const double t = dm.T * rng.uniform();
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = rng.normal();
    for (auto& v : z) v = rng.normal();
    for (auto& v : u) v = rng.normal();
    dx(t, x, y, z, u, Span(gx));
    du(t, x, y, z, u, Span(gu));
    for (int i = 0; i < dm.d; ++i) {
      std::vector<double> xp = x, xm = x;
      xp[static_cast<std::size_t>(i)] += eps;
      xm[static_cast<std::size_t>(i)] -= eps;
      const double fd = (h(t, xp, y, z, u) - h(t, xm, y, z, u)) / (2.0 * eps);
      rep.max_dx_deviation = std::max(rep.max_dx_deviation, std::abs(fd - gx[static_cast<std::size_t>(i)]));
    }
    for (int i = 0; i < dm.d1; ++i) {
      std::vector<double> up = u, um = u;
      up[static_cast<std::size_t>(i)] += eps;
      um[static_cast<std::size_t>(i)] -= eps;
      const double fd = (h(t, x, y, z, up) - h(t, x, y, z, um)) / (2.0 * eps);
      rep.max_du_deviation = std::max(rep.max_du_deviation, std::abs(fd - gu[static_cast<std::size_t>(i)]));
    }
  }
  return rep;
}

}  // namespace

PartialCheckReport hamiltonian_partial_check(const SocpProblem& p, int n_points, double eps, std::uint64_t seed) {
  return check_partials(
      p.dims(), n_points, eps, seed, [](RandomStream&) {},
      [&](double t, CSpan x, CSpan y, CSpan z, CSpan u) { return hamiltonian(p, t, x, y, z, u); },
      [&](double t, CSpan x, CSpan y, CSpan z, CSpan u, Span o) { p.dx_hamiltonian(t, x, y, z, u, o); },
      [&](double t, CSpan x, CSpan y, CSpan z, CSpan u, Span o) { p.du_hamiltonian(t, x, y, z, u, o); });
}

PartialCheckReport hamiltonian_partial_check(const MfcProblem& p, int n_points, double eps, std::uint64_t seed) {
  const ProblemDims dm = p.dims();
  MeasureSummary mu;
  auto prepare = [&](RandomStream& rng) {
    mu.mean_state.resize(dm.d);
    for (int i = 0; i < dm.d; ++i) mu.mean_state(i) = rng.normal();
    mu.mean_control.resize(dm.d1);
    for (int i = 0; i < dm.d1; ++i) mu.mean_control(i) = rng.normal();
    mu.interaction_b.resize(p.interaction_b_dim());
    for (Eigen::Index i = 0; i < mu.interaction_b.size(); ++i) mu.interaction_b(i) = rng.normal();
    mu.interaction_f.resize(p.interaction_f_dim());
    for (Eigen::Index i = 0; i < mu.interaction_f.size(); ++i) mu.interaction_f(i) = rng.normal();
  };
  return check_partials(
      dm, n_points, eps, seed, prepare,
      [&](double t, CSpan x, CSpan y, CSpan z, CSpan u) { return hamiltonian(p, t, x, mu, y, z, u); },
      [&](double t, CSpan x, CSpan y, CSpan z, CSpan u, Span o) { p.dx_hamiltonian(t, x, mu, y, z, u, o); },
      [&](double t, CSpan x, CSpan y, CSpan z, CSpan u, Span o) { p.du_hamiltonian(t, x, mu, y, z, u, o); });
}

Eigen::VectorXd column_means(const Eigen::Ref<const RowMatrix>& rows) {
  const auto n = static_cast<std::size_t>(rows.rows());
  if (n == 0) return Eigen::VectorXd();
  const std::size_t chunks = chunk_count(n);
  std::vector<Eigen::VectorXd> partial(chunks);
  parallel_chunks(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(rows.cols());
    for (std::size_t i = begin; i < end; ++i) s += rows.row(static_cast<Eigen::Index>(i)).transpose();
    partial[c] = std::move(s);
  });
  Eigen::VectorXd total = Eigen::VectorXd::Zero(rows.cols());
  for (const auto& s : partial) total += s;
  return total / static_cast<double>(n);
}

MeasureSummary measure_summary(const Eigen::Ref<const RowMatrix>& states, const Eigen::Ref<const RowMatrix>& controls,
                               const MfcProblem& p) {
  if (states.rows() < 1) throw std::invalid_argument("measure_summary: need at least one particle");
  MeasureSummary mu;
  mu.mean_state = column_means(states);
  const int nb = p.interaction_b_dim();
  const int nf = p.interaction_f_dim();
  if (nb + nf > 0) {
    RowMatrix vals(states.rows(), nb + nf);
    parallel_chunks(static_cast<std::size_t>(states.rows()), [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        double* v = vals.row(r).data();
        p.interactions(CSpan(states.row(r).data(), static_cast<std::size_t>(states.cols())),
                       Span(v, static_cast<std::size_t>(nb)), Span(v + nb, static_cast<std::size_t>(nf)));
      }
    });
    const Eigen::VectorXd m = column_means(vals);
    mu.interaction_b = m.head(nb);
    mu.interaction_f = m.tail(nf);
  } else {
    mu.interaction_b.resize(0);
    mu.interaction_f.resize(0);
  }
  if (controls.rows() > 0) mu.mean_control = column_means(controls);
  return mu;
}

PolicySequence::PolicySequence(std::vector<RandomFeatureModel> models, std::vector<double> times)
    : models_(std::move(models)), times_(std::move(times)) {
  if (models_.size() != times_.size()) throw std::invalid_argument("PolicySequence: models/times size mismatch");
}

PolicySequence PolicySequence::zero(const std::vector<std::shared_ptr<const FeatureMap>>& maps, int control_dim,
                                    double horizon) {
  std::vector<RandomFeatureModel> models;
  std::vector<double> times;
  const double dt = horizon / static_cast<double>(maps.size());
  for (std::size_t n = 0; n < maps.size(); ++n) {
    models.push_back(RandomFeatureModel::zero(maps[n], control_dim));
    times.push_back(static_cast<double>(n) * dt);
  }
  return PolicySequence(std::move(models), std::move(times));
}

int PolicySequence::step_index(double t) const {
  int n = 0;
  while (n + 1 < steps() && times_[static_cast<std::size_t>(n + 1)] <= t) ++n;
  return n;
}

void PolicySequence::controls(int step, double, const Eigen::Ref<const RowMatrix>& inputs,
                              const Eigen::Ref<const RowMatrix>&, const MeasureSummary&, RowMatrix& out) const {
  models_.at(static_cast<std::size_t>(step)).evaluate(inputs, out);
}

void FeedbackPolicy::controls(int, double t, const Eigen::Ref<const RowMatrix>&,
                              const Eigen::Ref<const RowMatrix>& states, const MeasureSummary& mu,
                              RowMatrix& out) const {
  out.resize(states.rows(), d1_);
  for (Eigen::Index r = 0; r < states.rows(); ++r)
    fn_(t, CSpan(states.row(r).data(), static_cast<std::size_t>(states.cols())), mu,
        Span(out.row(r).data(), static_cast<std::size_t>(d1_)));
}

}  // namespace pgp
