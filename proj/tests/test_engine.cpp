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
#include <cstring>
#include <limits>
#include <memory>

#include <doctest.h>

#include "pgp/benchmarks.hpp"
#include "pgp/engine.hpp"
#include "pgp/parallel.hpp"
#include "toy_problems.hpp"

using namespace pgp;
using pgp::testing::ToyParams;
using pgp::testing::ToyProblem;

namespace {

FeedbackPolicy linear_policy(double k, int steps) {
  return FeedbackPolicy([k](double, CSpan x, const MeasureSummary&, Span u) { u[0] = k * x[0]; }, steps, 1);
}

FeedbackPolicy oracle_policy(const OracleControl& fn, int steps, int d1) { return FeedbackPolicy(fn, steps, d1); }

double max_abs_diff(const std::vector<RowMatrix>& a, const std::vector<RowMatrix>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, (a[n] - b[n]).cwiseAbs().maxCoeff());
  return m;
}

bool bitwise_equal(const std::vector<RowMatrix>& a, const std::vector<RowMatrix>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (a[n].rows() != b[n].rows() || a[n].cols() != b[n].cols() ||
        std::memcmp(a[n].data(), b[n].data(), sizeof(double) * static_cast<std::size_t>(a[n].size())) != 0)
      return false;
  return true;
}

}  // namespace

TEST_CASE("zero drift and diffusion keep the state fixed") {
  ToyParams p;
  p.x0 = 0.7;
  const ToyProblem toy(p);
  const ParticleEnsemble e = simulate_forward(toy, linear_policy(0.0, 8), 5, ForwardSeeds::train(1, 0));
  REQUIRE(e.X.size() == 9);
  for (const RowMatrix& X : e.X) CHECK((X.array() == 0.7).all());
}

TEST_CASE("unit drift moves the state by t") {
  ToyParams p;
  p.x0 = -0.25;
  p.b0 = 1.0;
  p.T = 2.0;
  const ParticleEnsemble e = simulate_forward(ToyProblem(p), linear_policy(0.0, 16), 4, ForwardSeeds::train(1, 0));
  for (int n = 0; n <= 16; ++n) CHECK((e.X[static_cast<std::size_t>(n)].array() + 0.25 - e.time(n)).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("geometric martingale keeps its mean") {
  ToyParams p;
  p.x0 = 1.0;
  p.sx = 1.0;
  const int N = 10, M = 100000;
  const ParticleEnsemble e = simulate_forward(ToyProblem(p), linear_policy(0.0, N), M, ForwardSeeds::train(4, 0));
  const RowMatrix& XT = e.X.back();
  const double mean = XT.mean();
  // Euler variance of prod (1 + dW) is (1 + dt)^N - 1
  const double var = std::pow(1.0 + 1.0 / N, N) - 1.0;
  CHECK(std::abs(mean - 1.0) <= 4.0 * std::sqrt(var / M));
  const double sample_var = (XT.array() - mean).square().sum() / (M - 1);
  CHECK(sample_var == doctest::Approx(var).epsilon(0.05));
}

TEST_CASE("adjoint is constant when the x partial vanishes") {
  ToyParams p;
  p.x0 = 0.3;
  p.x0_sd = 1.0;
  p.s0 = 0.5;
  p.bu = 1.0;
  p.r = 1.0;
  p.gl = 1.75;
  const ToyProblem toy(p);
  ParticleEnsemble e = simulate_forward(toy, linear_policy(-0.5, 6), 50, ForwardSeeds::train(2, 0));
  backward_adjoint_socp(toy, e);
  for (const RowMatrix& Y : e.Y) CHECK((Y.array() == 1.75).all());
  for (int n = 0; n < 6; ++n) {
    const RowMatrix expect = 1.75 + e.U[static_cast<std::size_t>(n)].array();
    CHECK((e.G[static_cast<std::size_t>(n)] - expect).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("one step with three particles matches the hand recursion") {
  ToyParams p;
  p.a = 0.4;
  p.bu = 1.5;
  p.b0 = -0.2;
  p.s0 = 0.3;
  p.sx = 0.6;
  p.q = 0.8;
  p.r = 1.2;
  p.gl = 0.5;
  p.gq = 2.0;
  p.x0 = 0.1;
  p.x0_sd = 1.0;
  p.T = 0.5;
  const ToyProblem toy(p);
  const double k = -0.7;
  for (YIndex yi : {YIndex::kNext, YIndex::kCurrent}) {
    ParticleEnsemble e = simulate_forward(toy, linear_policy(k, 1), 3, ForwardSeeds::train(9, 3));
    BackwardOptions opt;
    opt.y_index = yi;
    opt.store_z = true;
    backward_adjoint_socp(toy, e, opt);
    const double dt = 0.5;
    for (int i = 0; i < 3; ++i) {
      const double x0 = e.X[0](i, 0), dw = e.dW.values[0](i, 0);
      const double u = k * x0;
      const double x1 = x0 + (p.a * x0 + p.bu * u + p.b0) * dt + (p.s0 + p.sx * x0) * dw;
      const double y1 = p.gl + p.gq * x1;
      const double z = y1 * dw / dt;
      const double y0 = y1 + (p.a * y1 + p.sx * z + p.q * x0) * dt;
      const double g = p.bu * (yi == YIndex::kNext ? y1 : y0) + p.r * u;
      CHECK(e.U[0](i, 0) == doctest::Approx(u).epsilon(1e-14));
      CHECK(e.X[1](i, 0) == doctest::Approx(x1).epsilon(1e-14));
      CHECK(e.Y[1](i, 0) == doctest::Approx(y1).epsilon(1e-14));
      CHECK(e.Z[0](i, 0) == doctest::Approx(z).epsilon(1e-14));
      CHECK(e.Y[0](i, 0) == doctest::Approx(y0).epsilon(1e-14));
      CHECK(e.G[0](i, 0) == doctest::Approx(g).epsilon(1e-14));
    }
  }
}

TEST_CASE("sample_z is the outer product over dt") {
  const std::vector<double> y = {1.0, -2.0}, dw = {0.5, 0.25, -1.0};
  std::vector<double> z(6);
  sample_z(y, dw, 0.5, z);
  const std::vector<double> expect = {1.0, 0.5, -2.0, -2.0, -1.0, 4.0};
  CHECK(z == expect);
}

TEST_CASE("one-dimensional LQ adjoint at time zero is the value gradient") {
  LqParams lp;
  lp.d = 1;
  lp.x0 = {1.0};
  const LqProblem lq(lp);
  const int N = 100, M = 100000;
  ParticleEnsemble e = simulate_forward(lq, oracle_policy(lq_oracle(lp), N, 1), M, ForwardSeeds::train(5, 0));
  backward_adjoint_socp(lq, e);
  const double mean = e.Y[0].mean();
  const double se = std::sqrt((e.Y[0].array() - mean).square().sum() / (M - 1) / M);
  const double p0 = riccati_lq(lp, 0.0);
  // Euler bias is O(dt); allow 2% plus sampling noise
  CHECK(std::abs(mean - p0) <= 0.02 * p0 + 4.0 * se);
}

TEST_CASE("SOCP through the MFC path is bitwise identical") {
  LqParams lp;
  lp.d = 3;
  lp.x0 = {0.5, -0.5, 1.0};
  const auto lq = std::make_shared<LqProblem>(lp);
  const SocpAsMfc view(lq);
  const FeedbackPolicy pol = oracle_policy(lq_oracle(lp), 7, 3);
  const ForwardSeeds seeds = ForwardSeeds::train(11, 2);
  ParticleEnsemble a = simulate_forward(*lq, pol, 700, seeds);
  ParticleEnsemble b = simulate_forward(static_cast<const MfcProblem&>(view), pol, 700, seeds);
  backward_adjoint_socp(*lq, a);
  backward_adjoint_mfc(view, b);
  CHECK(bitwise_equal(a.X, b.X));
  CHECK(bitwise_equal(a.U, b.U));
  CHECK(bitwise_equal(a.Y, b.Y));
  CHECK(bitwise_equal(a.G, b.G));
  const CostEstimate ca = estimate_cost(*lq, pol, 700, seeds);
  const CostEstimate cb = estimate_cost(static_cast<const MfcProblem&>(view), pol, 700, seeds);
  CHECK(ca.mean == cb.mean);
  CHECK(ca.se == cb.se);
}

TEST_CASE("uncoupled inter-bank adjoint is the centred terminal gradient") {
  InterbankParams ip;
  ip.kappa = 0.0;
  ip.q = 0.0;
  ip.eta = 0.0;
  const InterbankProblem ib(ip);
  ParticleEnsemble e = simulate_forward(ib, linear_policy(-0.3, 5), 200, ForwardSeeds::train(3, 0));
  backward_adjoint_mfc(ib, e);
  const RowMatrix& XT = e.X.back();
  const double m = e.mu_path.back().mean_state(0);
  const RowMatrix expect = ip.c * (XT.array() - m);
  for (const RowMatrix& Y : e.Y) CHECK((Y - expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("inter-bank two steps three particles against a hand-rolled reference") {
  InterbankParams ip;
  ip.law = gaussian_law(0.1, 0.3);
  const InterbankProblem ib(ip);
  const int N = 2, M = 3;
  const double k = -0.9;
  const FeedbackPolicy pol([k](double t, CSpan x, const MeasureSummary& mu, Span u) {
    u[0] = k * (x[0] - mu.mean_state(0)) + t;
  }, N, 1);
  ParticleEnsemble e = simulate_forward(ib, pol, M, ForwardSeeds::train(21, 1));
  backward_adjoint_mfc(ib, e);

  const double dt = ip.T / N;
  double X[3][3], U[2][3], Y[3][3], G[2][3], m[3];
  for (int i = 0; i < M; ++i) X[0][i] = e.X[0](i, 0);
  for (int n = 0; n < N; ++n) {
    m[n] = (X[n][0] + X[n][1] + X[n][2]) / 3.0;
    for (int i = 0; i < M; ++i) {
      U[n][i] = k * (X[n][i] - m[n]) + n * dt;
      X[n + 1][i] = X[n][i] + (ip.kappa * (m[n] - X[n][i]) + U[n][i]) * dt + ip.sigma * e.dW.values[static_cast<std::size_t>(n)](i, 0);
    }
  }
  m[N] = (X[N][0] + X[N][1] + X[N][2]) / 3.0;
  double law = 0.0;
  for (int j = 0; j < M; ++j) law += ip.c * (m[N] - X[N][j]) / M;
  for (int i = 0; i < M; ++i) Y[N][i] = ip.c * (X[N][i] - m[N]) + law;
  for (int n = N - 1; n >= 0; --n) {
    law = 0.0;
    for (int j = 0; j < M; ++j) law += (ip.kappa * Y[n + 1][j] - ip.q * U[n][j] + ip.eta * (m[n] - X[n][j])) / M;
    for (int i = 0; i < M; ++i) {
      const double dx = -ip.kappa * Y[n + 1][i] + ip.q * U[n][i] + ip.eta * (X[n][i] - m[n]);
      Y[n][i] = Y[n + 1][i] + (dx + law) * dt;
      G[n][i] = Y[n + 1][i] + U[n][i] - ip.q * (m[n] - X[n][i]);
    }
  }
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i < M; ++i) {
      CHECK(std::abs(e.X[static_cast<std::size_t>(n)](i, 0) - X[n][i]) <= 1e-12);
      CHECK(std::abs(e.Y[static_cast<std::size_t>(n)](i, 0) - Y[n][i]) <= 1e-12);
      if (n < N) {
        CHECK(std::abs(e.U[static_cast<std::size_t>(n)](i, 0) - U[n][i]) <= 1e-12);
        CHECK(std::abs(e.G[static_cast<std::size_t>(n)](i, 0) - G[n][i]) <= 1e-12);
      }
    }
}

TEST_CASE("kernel path matches the factorized path") {
  InterbankParams ip;
  const InterbankProblem fast(ip);
  const InterbankKernelProblem slow(ip);
  const FeedbackPolicy pol = oracle_policy(interbank_oracle(ip), 6, 1);
  const ForwardSeeds seeds = ForwardSeeds::train(8, 0);
  ParticleEnsemble a = simulate_forward(fast, pol, 300, seeds);
  ParticleEnsemble b = simulate_forward(slow, pol, 300, seeds);
  backward_adjoint_mfc(fast, a);
  backward_adjoint_mfc(slow, b);
  CHECK(max_abs_diff(a.Y, b.Y) <= 1e-12);
  CHECK(max_abs_diff(a.G, b.G) <= 1e-12);
}

TEST_CASE("backward pass is permutation equivariant") {
  InterbankParams ip;
  const InterbankProblem ib(ip);
  const FeedbackPolicy pol = oracle_policy(interbank_oracle(ip), 4, 1);
  const int M = 1500;
  ParticleEnsemble a = simulate_forward(ib, pol, M, ForwardSeeds::train(6, 0));
  ParticleEnsemble b = a;
  auto perm = [M](const RowMatrix& src) {
    RowMatrix out(src.rows(), src.cols());
    for (int i = 0; i < M; ++i) out.row(i) = src.row((i * 11 + 5) % M);
    return out;
  };
  for (auto& X : b.X) X = perm(X);
  for (auto& U : b.U) U = perm(U);
  for (auto& W : b.dW.values) W = perm(W);
  backward_adjoint_mfc(ib, a);
  backward_adjoint_mfc(ib, b);
  for (std::size_t n = 0; n < a.Y.size(); ++n) CHECK((perm(a.Y[n]) - b.Y[n]).cwiseAbs().maxCoeff() <= 1e-12);
  for (std::size_t n = 0; n < a.G.size(); ++n) CHECK((perm(a.G[n]) - b.G[n]).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("results do not depend on the thread count") {
  InterbankParams ip;
  const InterbankProblem ib(ip);
  const FeedbackPolicy pol = oracle_policy(interbank_oracle(ip), 5, 1);
  const ForwardSeeds seeds = ForwardSeeds::train(12, 4);
  set_num_threads(1);
  ParticleEnsemble a = simulate_forward(ib, pol, 3000, seeds);
  backward_adjoint_mfc(ib, a);
  const CostEstimate ca = estimate_cost(ib, pol, 3000, seeds);
  set_num_threads(4);
  ParticleEnsemble b = simulate_forward(ib, pol, 3000, seeds);
  backward_adjoint_mfc(ib, b);
  const CostEstimate cb = estimate_cost(ib, pol, 3000, seeds);
  set_num_threads(0);
  CHECK(bitwise_equal(a.X, b.X));
  CHECK(bitwise_equal(a.Y, b.Y));
  CHECK(bitwise_equal(a.G, b.G));
  CHECK(ca.mean == cb.mean);
  CHECK(ca.se == cb.se);
}

TEST_CASE("evaluate_policy equals the separate estimators") {
  InterbankParams ip;
  const InterbankProblem ib(ip);
  const OracleControl oracle = interbank_oracle(ip);
  const FeedbackPolicy pol = linear_policy(-1.0, 5);
  const ForwardSeeds seeds = ForwardSeeds::eval(2, 1);
  const PolicyEvaluation ev = evaluate_policy(ib, pol, 1000, seeds, oracle);
  CHECK(ev.cost.mean == estimate_cost(ib, pol, 1000, seeds).mean);
  CHECK(ev.l2_error == control_l2_error(pol, oracle, ib, 1000, seeds));
  CHECK(std::isnan(evaluate_policy(ib, pol, 1000, seeds).l2_error));
}

TEST_CASE("non-finite values abort with the phase and step") {
  ToyParams p;
  p.x0 = 1.0;
  const ToyProblem toy(p);
  const FeedbackPolicy bad([](double t, CSpan, const MeasureSummary&, Span u) {
    u[0] = t > 0.3 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  }, 4, 1);
  try {
    (void)simulate_forward(toy, bad, 10, ForwardSeeds::train(1, 0));
    FAIL("expected NumericalError");
  } catch (const NumericalError& err) {
    CHECK(err.phase() == "control");
    CHECK(err.step() == 2);
  }
  ToyParams big;
  big.x0 = 1e200;
  big.gq = 1e200;
  const ToyProblem huge(big);
  ParticleEnsemble e = simulate_forward(huge, linear_policy(0.0, 2), 4, ForwardSeeds::train(1, 0));
  CHECK_THROWS_AS(backward_adjoint_socp(huge, e), NumericalError);
}

TEST_CASE("forward pass validates its inputs") {
  ToyParams p;
  const ToyProblem toy(p);
  CHECK_THROWS_AS(simulate_forward(toy, linear_policy(0.0, 2), 0, ForwardSeeds{}), std::invalid_argument);
  const FeedbackPolicy two([](double, CSpan, const MeasureSummary&, Span u) { u[0] = u[1] = 0.0; }, 2, 2);
  CHECK_THROWS_AS(simulate_forward(toy, two, 3, ForwardSeeds{}), std::invalid_argument);
}
