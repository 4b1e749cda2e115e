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

#include "pgp/engine.hpp"
#include "pgp/parallel.hpp"

namespace pgp {
namespace {

std::shared_ptr<const SocpProblem> borrow(const SocpProblem& p) {
  return std::shared_ptr<const SocpProblem>(&p, [](const SocpProblem*) {});
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

ProbeStatistic compare(const std::vector<double>& sample, const std::vector<double>& nested) {
  ProbeStatistic st;
  const MeanSe a = mean_se(sample);
  const MeanSe b = mean_se(nested);
  st.sample_mean = a.mean;
  st.sample_se = a.se;
  st.nested_mean = b.mean;
  st.nested_se = b.se;
  st.gap = a.mean - b.mean;
  st.combined_se = std::sqrt(a.se * a.se + b.se * b.se);
  if (st.combined_se > 0.0) {
    st.gap_in_se = std::abs(st.gap) / st.combined_se;
  } else {
    st.gap_in_se = std::abs(st.gap) <= 1e-10 * (1.0 + std::abs(a.mean)) ? 0.0 : INFINITY;
  }
  return st;
}

// Law forcing terms, averaged over the outer ensemble.
struct Forcing {
  std::vector<double> running;  // rank per step, flattened
  std::vector<double> terminal;
  int rank = 0;
  int terminal_rank = 0;
};

Forcing outer_forcing(const MfcProblem& p, const ParticleEnsemble& e) {
  Forcing f;
  f.rank = p.lions_rank();
  f.terminal_rank = p.terminal_lions_rank();
  if ((f.rank > 0 || f.terminal_rank > 0) && !p.lions_factorized())
    throw std::invalid_argument("unbiasedness_probe: law terms must be factorized");
  const int M = e.particles;
  const std::size_t dz = static_cast<std::size_t>(e.d * e.m);
  f.running.assign(static_cast<std::size_t>(e.steps * f.rank), 0.0);
  f.terminal.assign(static_cast<std::size_t>(f.terminal_rank), 0.0);
  std::vector<double> buf(static_cast<std::size_t>(std::max(f.rank, f.terminal_rank)));
  for (int n = 0; n < e.steps && f.rank > 0; ++n) {
    RowMatrix vals(M, f.rank);
    for (int j = 0; j < M; ++j) {
      p.lions_factors(e.time(n), CSpan(e.X[n].row(j).data(), 1), e.mu_path[n], CSpan(e.Y[n + 1].row(j).data(), 1),
                      CSpan(e.Z[n].row(j).data(), dz), CSpan(e.U[n].row(j).data(), static_cast<std::size_t>(e.d1)),
                      Span(vals.row(j).data(), static_cast<std::size_t>(f.rank)));
    }
    const Eigen::VectorXd mean = column_means(vals);
    for (int k = 0; k < f.rank; ++k) f.running[static_cast<std::size_t>(n * f.rank + k)] = mean(k);
  }
  if (f.terminal_rank > 0) {
    RowMatrix vals(M, f.terminal_rank);
    for (int j = 0; j < M; ++j)
      p.terminal_lions_factors(CSpan(e.X[e.steps].row(j).data(), 1), e.mu_path[e.steps],
                               Span(vals.row(j).data(), static_cast<std::size_t>(f.terminal_rank)));
    const Eigen::VectorXd mean = column_means(vals);
    for (int k = 0; k < f.terminal_rank; ++k) f.terminal[static_cast<std::size_t>(k)] = mean(k);
  }
  return f;
}

double contract(const std::vector<double>& basis, const double* factors, int rank) {
  double s = 0.0;
  for (int k = 0; k < rank; ++k) s += basis[static_cast<std::size_t>(k)] * factors[k];
  return s;
}

// Y^N_0(x0) of the conditional-expectation scheme on one tree with n_inner
// children per node.
double nested_value(const MfcProblem& p, const ControlPolicy& policy, const ProbeConfig& cfg,
                    const std::vector<MeasureSummary>& mu_path, const Forcing& forcing, std::uint64_t tree,
                    double x0) {
  const ProblemDims dm = p.dims();
  const int N = policy.steps();
  const double dt = dm.T / N;
  const int K = cfg.n_inner;
  const MeasureSummary empty;
  auto mu_at = [&](int n) -> const MeasureSummary& { return mu_path.empty() ? empty : mu_path[static_cast<std::size_t>(n)]; };

  std::vector<RowMatrix> X(static_cast<std::size_t>(N + 1)), U(static_cast<std::size_t>(N)),
      dW(static_cast<std::size_t>(N));
  X[0] = RowMatrix::Constant(1, 1, x0);
  for (int n = 0; n < N; ++n) {
    const RowMatrix& Xn = X[static_cast<std::size_t>(n)];
    const Eigen::Index nodes = Xn.rows();
    RowMatrix inputs(nodes, p.policy_input_dim());
    for (Eigen::Index k = 0; k < nodes; ++k)
      p.policy_input(CSpan(Xn.row(k).data(), 1),
                     Span(inputs.row(k).data(), static_cast<std::size_t>(inputs.cols())));
    policy.controls(n, n * dt, inputs, Xn, mu_at(n), U[static_cast<std::size_t>(n)]);
    const RowMatrix& Un = U[static_cast<std::size_t>(n)];
    RowMatrix& W = dW[static_cast<std::size_t>(n)];
    W.resize(nodes * K, 1);
    const RandomStream rng(SeedSpec{cfg.seed, tree, substream_tag(Purpose::kProbe, 100 + static_cast<std::uint64_t>(n))});
    rng.normals(0, static_cast<int>(nodes * K), std::sqrt(dt), W.data());
    RowMatrix& Xc = X[static_cast<std::size_t>(n + 1)];
    Xc.resize(nodes * K, 1);
    double drift = 0.0, noise = 0.0;
    for (Eigen::Index k = 0; k < nodes; ++k) {
      const CSpan x(Xn.row(k).data(), 1);
      const CSpan u(Un.row(k).data(), static_cast<std::size_t>(dm.d1));
      p.drift(n * dt, x, mu_at(n), u, Span(&drift, 1));
      for (int c = 0; c < K; ++c) {
        const Eigen::Index child = k * K + c;
        p.apply_diffusion(n * dt, x, mu_at(n), u, CSpan(W.row(child).data(), 1), Span(&noise, 1));
        Xc(child, 0) = Xn(k, 0) + drift * dt + noise;
      }
    }
  }

  std::vector<double> basis(static_cast<std::size_t>(std::max({forcing.rank, forcing.terminal_rank, 1})));
  Eigen::VectorXd V(X[static_cast<std::size_t>(N)].rows());
  for (Eigen::Index k = 0; k < V.size(); ++k) {
    const CSpan x(X[static_cast<std::size_t>(N)].row(k).data(), 1);
    double g = 0.0;
    p.terminal_gradient(x, mu_at(N), Span(&g, 1));
    if (forcing.terminal_rank > 0) {
      p.terminal_lions_basis(x, mu_at(N), basis);
      g += contract(basis, forcing.terminal.data(), forcing.terminal_rank);
    }
    V(k) = g;
  }
  for (int n = N - 1; n >= 0; --n) {
    const RowMatrix& Xn = X[static_cast<std::size_t>(n)];
    const RowMatrix& W = dW[static_cast<std::size_t>(n)];
    Eigen::VectorXd Vn(Xn.rows());
    for (Eigen::Index k = 0; k < Xn.rows(); ++k) {
      double y = 0.0, z = 0.0;
      for (int c = 0; c < K; ++c) {
        y += V(k * K + c);
        z += V(k * K + c) * W(k * K + c, 0);
      }
      y /= K;
      z /= K * dt;
      const CSpan x(Xn.row(k).data(), 1);
      double dxh = 0.0;
      p.dx_hamiltonian(n * dt, x, mu_at(n), CSpan(&y, 1), CSpan(&z, 1),
                       CSpan(U[static_cast<std::size_t>(n)].row(k).data(), static_cast<std::size_t>(dm.d1)),
                       Span(&dxh, 1));
      if (forcing.rank > 0) {
        p.lions_basis(n * dt, x, mu_at(n), basis);
        dxh += contract(basis, forcing.running.data() + static_cast<std::ptrdiff_t>(n) * forcing.rank, forcing.rank);
      }
      Vn(k) = y + dxh * dt;
    }
    V = std::move(Vn);
  }
  return V(0);
}

template <class Backward>
ProbeReport probe_core(const MfcProblem& p, const ControlPolicy& policy, const ProbeConfig& cfg, bool measure,
                       Backward&& backward) {
  const ProblemDims dm = p.dims();
  if (dm.d != 1 || dm.m != 1) throw std::invalid_argument("unbiasedness_probe: requires d = m = 1");
  if (cfg.n_outer < 2 || cfg.n_reference < 2 || cfg.n_inner < 1)
    throw std::invalid_argument("unbiasedness_probe: sample counts too small");

  const ForwardSeeds outer_seeds{cfg.seed, substream_tag(Purpose::kProbe, 2), substream_tag(Purpose::kProbe, 3)};
  ParticleEnsemble e = backward(outer_seeds);
  std::vector<double> sample_level(static_cast<std::size_t>(cfg.n_outer)), sample_moment(sample_level.size());
  for (int i = 0; i < cfg.n_outer; ++i) {
    sample_level[static_cast<std::size_t>(i)] = e.Y[0](i, 0);
    sample_moment[static_cast<std::size_t>(i)] = e.Y[0](i, 0) * e.X[0](i, 0);
  }

  Forcing forcing;
  if (measure) forcing = outer_forcing(p, e);
  const std::vector<MeasureSummary> mu_path = measure ? e.mu_path : std::vector<MeasureSummary>{};
  e = ParticleEnsemble{};

  std::vector<double> nested_level(static_cast<std::size_t>(cfg.n_reference)), nested_moment(nested_level.size());
  parallel_tasks(static_cast<std::size_t>(cfg.n_reference), [&](std::size_t r) {
    RandomStream rng(SeedSpec{cfg.seed, r, substream_tag(Purpose::kProbe, 1)});
    double x0 = 0.0;
    p.sample_initial(rng, Span(&x0, 1));
    const double v = nested_value(p, policy, cfg, mu_path, forcing, r, x0);
    nested_level[r] = v;
    nested_moment[r] = v * x0;
  });

  ProbeReport rep;
  rep.level = compare(sample_level, nested_level);
  rep.moment = compare(sample_moment, nested_moment);
  rep.max_gap_in_se = std::max(rep.level.gap_in_se, rep.moment.gap_in_se);
  rep.passed = rep.max_gap_in_se <= 3.0;
  return rep;
}

}  // namespace

ProbeReport unbiasedness_probe(const SocpProblem& p, const ControlPolicy& policy, const ProbeConfig& cfg) {
  const SocpAsMfc view(borrow(p));
  return probe_core(view, policy, cfg, false, [&](const ForwardSeeds& seeds) {
    ParticleEnsemble e = simulate_forward(p, policy, cfg.n_outer, seeds);
    BackwardOptions opt;
    opt.compute_gradient = false;
    opt.drop_dx_hamiltonian = cfg.drop_dx_hamiltonian;
    backward_adjoint_socp(p, e, opt);
    return e;
  });
}

ProbeReport unbiasedness_probe(const MfcProblem& p, const ControlPolicy& policy, const ProbeConfig& cfg) {
  return probe_core(p, policy, cfg, true, [&](const ForwardSeeds& seeds) {
    ParticleEnsemble e = simulate_forward(p, policy, cfg.n_outer, seeds);
    BackwardOptions opt;
    opt.compute_gradient = false;
    opt.store_z = true;
    opt.drop_dx_hamiltonian = cfg.drop_dx_hamiltonian;
    backward_adjoint_mfc(p, e, opt);
    return e;
  });
}

}  // namespace pgp
