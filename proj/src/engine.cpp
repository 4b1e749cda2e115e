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

#include "pgp/engine.hpp"

#include <cmath>
#include <stdexcept>

#include "pgp/parallel.hpp"

namespace pgp {
namespace {

std::shared_ptr<const SocpProblem> borrow(const SocpProblem& p) {
  return std::shared_ptr<const SocpProblem>(&p, [](const SocpProblem*) {});
}

inline CSpan row_span(const RowMatrix& a, Eigen::Index r) {
  return CSpan(a.row(r).data(), static_cast<std::size_t>(a.cols()));
}
inline Span row_span(RowMatrix& a, Eigen::Index r) { return Span(a.row(r).data(), static_cast<std::size_t>(a.cols())); }

void check_finite(const RowMatrix& a, const char* phase, int step) {
  if (!a.allFinite()) throw NumericalError(phase, step);
}

// Forward Euler-Maruyama over the MFC interface. on_step(n, t, X_n, U_n,
// dW_n, mu_n) runs before the state is advanced; on_terminal(X_N, mu_N) at
// the end. SOCP problems come through SocpAsMfc with measure = false.
template <class OnStep, class OnTerminal>
void forward_core(const MfcProblem& p, const ControlPolicy& policy, int M, const ForwardSeeds& seeds, bool measure,
                  OnStep&& on_step, OnTerminal&& on_terminal) {
  const ProblemDims dm = p.dims();
  const int N = policy.steps();
  if (M < 1) throw std::invalid_argument("simulate_forward: M must be >= 1");
  if (N < 1) throw std::invalid_argument("simulate_forward: policy has no steps");
  if (policy.control_dim() != dm.d1) throw std::invalid_argument("simulate_forward: policy control dimension mismatch");
  const double dt = dm.T / N;
  const int pin = p.policy_input_dim();
  const auto rows = static_cast<std::size_t>(M);

  RowMatrix X(M, dm.d), Xn(M, dm.d), U(M, dm.d1), dW(M, dm.m), inputs(M, pin);
  parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng(SeedSpec{seeds.master_seed, i, seeds.initial_substream});
      p.sample_initial(rng, row_span(X, static_cast<Eigen::Index>(i)));
    }
  });
  check_finite(X, "forward", 0);

  const SeedSpec brownian{seeds.master_seed, 0, seeds.brownian_substream};
  const MeasureSummary empty;
  for (int n = 0; n < N; ++n) {
    const double t = n * dt;
    MeasureSummary mu = measure ? measure_summary(X, RowMatrix(0, dm.d1), p) : empty;
    parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
      const auto b = static_cast<Eigen::Index>(begin);
      const auto cnt = static_cast<Eigen::Index>(end - begin);
      for (Eigen::Index i = b; i < b + cnt; ++i) p.policy_input(row_span(X, i), row_span(inputs, i));
      RowMatrix out;
      policy.controls(n, t, inputs.middleRows(b, cnt), X.middleRows(b, cnt), mu, out);
      if (out.rows() != cnt || out.cols() != dm.d1) throw std::logic_error("policy returned wrong control shape");
      U.middleRows(b, cnt) = out;
    });
    check_finite(U, "control", n);
    if (measure) mu.mean_control = column_means(U);
    parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
      const auto b = static_cast<Eigen::Index>(begin);
      fill_increments(brownian, n, dm.m, dt, static_cast<int>(begin), static_cast<int>(end - begin),
                      dW.row(b).data());
      std::vector<double> drift(static_cast<std::size_t>(dm.d)), noise(static_cast<std::size_t>(dm.d));
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        p.drift(t, row_span(X, r), mu, row_span(U, r), drift);
        p.apply_diffusion(t, row_span(X, r), mu, row_span(U, r), row_span(dW, r), noise);
        for (int k = 0; k < dm.d; ++k)
          Xn(r, k) = X(r, k) + drift[static_cast<std::size_t>(k)] * dt + noise[static_cast<std::size_t>(k)];
      }
    });
    check_finite(Xn, "forward", n + 1);
    on_step(n, t, X, U, dW, mu);
    X.swap(Xn);
  }
  on_terminal(X, measure ? measure_summary(X, RowMatrix(0, dm.d1), p) : empty);
}

ParticleEnsemble forward_store(const MfcProblem& p, const ControlPolicy& policy, int M, const ForwardSeeds& seeds,
                               bool measure) {
  const ProblemDims dm = p.dims();
  ParticleEnsemble e;
  e.particles = M;
  e.steps = policy.steps();
  e.dt = dm.T / e.steps;
  e.d = dm.d;
  e.m = dm.m;
  e.d1 = dm.d1;
  e.dW.particles = M;
  e.dW.steps = e.steps;
  e.dW.dim = dm.m;
  e.dW.dt = e.dt;
  forward_core(
      p, policy, M, seeds, measure,
      [&](int, double, const RowMatrix& X, const RowMatrix& U, const RowMatrix& dW, const MeasureSummary& mu) {
        e.X.push_back(X);
        e.U.push_back(U);
        e.dW.values.push_back(dW);
        if (measure) e.mu_path.push_back(mu);
      },
      [&](const RowMatrix& X, const MeasureSummary& mu) {
        e.X.push_back(X);
        if (measure) e.mu_path.push_back(mu);
      });
  return e;
}

struct ParticleSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Mean and standard error of per-particle values with a fixed-order reduction.
CostEstimate mean_and_se(const std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t chunks = chunk_count(n);
  std::vector<double> partial(chunks, 0.0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t i = c * kChunkRows; i < std::min(n, (c + 1) * kChunkRows); ++i) partial[c] += v[i];
  double total = 0.0;
  for (double s : partial) total += s;
  const double mean = total / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    double s = 0.0;
    for (std::size_t i = c * kChunkRows; i < std::min(n, (c + 1) * kChunkRows); ++i) s += (v[i] - mean) * (v[i] - mean);
    ss += s;
  }
  const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

PolicyEvaluation eval_core(const MfcProblem& p, const ControlPolicy& policy, int M, const ForwardSeeds& seeds,
                           bool measure, const OracleControl* oracle) {
  const int N = policy.steps();
  const int d1 = p.dims().d1;
  std::vector<double> running(static_cast<std::size_t>(M), 0.0), total(static_cast<std::size_t>(M), 0.0);
  std::vector<double> sq(oracle ? static_cast<std::size_t>(M) : 0, 0.0);
  const double dt = p.dims().T / N;
  forward_core(
      p, policy, M, seeds, measure,
      [&](int, double t, const RowMatrix& X, const RowMatrix& U, const RowMatrix&, const MeasureSummary& mu) {
        parallel_chunks(static_cast<std::size_t>(M), [&](std::size_t, std::size_t begin, std::size_t end) {
          std::vector<double> target(static_cast<std::size_t>(d1));
          for (std::size_t i = begin; i < end; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            running[i] += p.running_cost(t, row_span(X, r), mu, row_span(U, r));
            if (!oracle) continue;
            (*oracle)(t, row_span(X, r), mu, target);
            for (int k = 0; k < d1; ++k) {
              const double diff = U(r, k) - target[static_cast<std::size_t>(k)];
              sq[i] += diff * diff;
            }
          }
        });
      },
      [&](const RowMatrix& X, const MeasureSummary& mu) {
        parallel_chunks(static_cast<std::size_t>(M), [&](std::size_t, std::size_t begin, std::size_t end) {
          for (std::size_t i = begin; i < end; ++i)
            total[i] = running[i] * dt + p.terminal_cost(row_span(X, static_cast<Eigen::Index>(i)), mu);
        });
      });
  for (double v : total)
    if (!std::isfinite(v)) throw NumericalError("cost", N);
  PolicyEvaluation ev;
  ev.cost = mean_and_se(total);
  if (oracle) ev.l2_error = std::sqrt(mean_and_se(sq).mean / N);
  return ev;
}

}  // namespace

ForwardSeeds ForwardSeeds::train(std::uint64_t master, std::uint64_t epoch) {
  return {master, substream_tag(Purpose::kTrainInitial, epoch), substream_tag(Purpose::kTrainBrownian, epoch)};
}
ForwardSeeds ForwardSeeds::eval(std::uint64_t master, std::uint64_t epoch) {
  return {master, substream_tag(Purpose::kEvalInitial, epoch), substream_tag(Purpose::kEvalBrownian, epoch)};
}
ForwardSeeds ForwardSeeds::final_eval(std::uint64_t master) {
  return {master, substream_tag(Purpose::kFinalInitial, 0), substream_tag(Purpose::kFinalBrownian, 0)};
}

void sample_z(CSpan y_next, CSpan dw, double dt, Span z) {
  const std::size_t m = dw.size();
  for (std::size_t i = 0; i < y_next.size(); ++i)
    for (std::size_t j = 0; j < m; ++j) z[i * m + j] = y_next[i] * dw[j] / dt;
}

ParticleEnsemble simulate_forward(const SocpProblem& p, const ControlPolicy& policy, int M, const ForwardSeeds& seeds) {
  return forward_store(SocpAsMfc(borrow(p)), policy, M, seeds, false);
}

ParticleEnsemble simulate_forward(const MfcProblem& p, const ControlPolicy& policy, int M, const ForwardSeeds& seeds) {
  return forward_store(p, policy, M, seeds, true);
}

namespace {

void prepare_backward(ParticleEnsemble& e, const BackwardOptions& opt, int d1) {
  if (static_cast<int>(e.X.size()) != e.steps + 1 || static_cast<int>(e.U.size()) != e.steps)
    throw std::invalid_argument("backward: forward pass incomplete");
  e.Y.assign(static_cast<std::size_t>(e.steps + 1), RowMatrix(e.particles, e.d));
  if (opt.store_z)
    e.Z.assign(static_cast<std::size_t>(e.steps), RowMatrix(e.particles, e.d * e.m));
  else
    e.Z.clear();
  if (opt.compute_gradient)
    e.G.assign(static_cast<std::size_t>(e.steps), RowMatrix(e.particles, d1));
  else
    e.G.clear();
}

}  // namespace

void backward_adjoint_socp(const SocpProblem& p, ParticleEnsemble& e, const BackwardOptions& opt) {
  const ProblemDims dm = p.dims();
  prepare_backward(e, opt, dm.d1);
  const int N = e.steps;
  const auto rows = static_cast<std::size_t>(e.particles);
  const bool need_z = p.uses_z() || opt.store_z;

  parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      p.terminal_gradient(row_span(e.X[N], r), row_span(e.Y[N], r));
    }
  });
  check_finite(e.Y[N], "backward", N);

  for (int n = N - 1; n >= 0; --n) {
    const double t = e.time(n);
    const RowMatrix& X = e.X[n];
    const RowMatrix& U = e.U[n];
    const RowMatrix& dW = e.dW.values[n];
    const RowMatrix& Ynext = e.Y[n + 1];
    RowMatrix& Y = e.Y[n];
    parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
      std::vector<double> z(need_z ? static_cast<std::size_t>(dm.d * dm.m) : 0), dxh(static_cast<std::size_t>(dm.d));
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        if (need_z) sample_z(row_span(Ynext, r), row_span(dW, r), e.dt, z);
        p.dx_hamiltonian(t, row_span(X, r), row_span(Ynext, r), z, row_span(U, r), dxh);
        for (int k = 0; k < dm.d; ++k)
          Y(r, k) = opt.drop_dx_hamiltonian ? Ynext(r, k) : Ynext(r, k) + dxh[static_cast<std::size_t>(k)] * e.dt;
        if (opt.store_z) std::copy(z.begin(), z.end(), e.Z[n].row(r).data());
        if (opt.compute_gradient) {
          const RowMatrix& Yg = opt.y_index == YIndex::kNext ? Ynext : Y;
          p.du_hamiltonian(t, row_span(X, r), row_span(Yg, r), z, row_span(U, r), row_span(e.G[n], r));
        }
      }
    });
    check_finite(Y, "backward", n);
    if (opt.compute_gradient) check_finite(e.G[n], "gradient", n);
  }
}

namespace {

// (1/M) sum_j kernel(j)(x_i) added to out_i for every i, through the factor
// mean when the problem factorizes and the double loop otherwise.
template <class FactorFn, class BasisFn, class KernelFn>
void add_law_term(const MfcProblem& p, int M, int rank, int out_dim, double scale, RowMatrix& out,
                  FactorFn&& factors, BasisFn&& basis, KernelFn&& kernel) {
  if (rank == 0) return;
  const auto rows = static_cast<std::size_t>(M);
  if (p.lions_factorized()) {
    RowMatrix f(M, rank);
    parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) factors(static_cast<Eigen::Index>(j), row_span(f, static_cast<Eigen::Index>(j)));
    });
    const Eigen::VectorXd fbar = column_means(f);
    parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
      std::vector<double> b(static_cast<std::size_t>(out_dim * rank));
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        basis(r, Span(b));
        for (int k = 0; k < out_dim; ++k) {
          double s = 0.0;
          for (int c = 0; c < rank; ++c) s += b[static_cast<std::size_t>(k * rank + c)] * fbar(c);
          out(r, k) += s * scale;
        }
      }
    });
  } else {
    parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
      std::vector<double> v(static_cast<std::size_t>(out_dim)), acc(static_cast<std::size_t>(out_dim));
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        std::fill(acc.begin(), acc.end(), 0.0);
        for (Eigen::Index j = 0; j < M; ++j) {
          kernel(j, r, Span(v));
          for (int k = 0; k < out_dim; ++k) acc[static_cast<std::size_t>(k)] += v[static_cast<std::size_t>(k)];
        }
        for (int k = 0; k < out_dim; ++k) out(r, k) += acc[static_cast<std::size_t>(k)] / M * scale;
      }
    });
  }
}

}  // namespace

void backward_adjoint_mfc(const MfcProblem& p, ParticleEnsemble& e, const BackwardOptions& opt) {
  const ProblemDims dm = p.dims();
  prepare_backward(e, opt, dm.d1);
  if (static_cast<int>(e.mu_path.size()) != e.steps + 1)
    throw std::invalid_argument("backward_adjoint_mfc: ensemble has no measure path");
  const int N = e.steps;
  const int M = e.particles;
  const auto rows = static_cast<std::size_t>(M);
  const bool need_z = p.uses_z() || opt.store_z;
  const int dz = need_z ? dm.d * dm.m : 0;

  {
    const MeasureSummary& mu = e.mu_path[N];
    const RowMatrix& X = e.X[N];
    RowMatrix& Y = e.Y[N];
    parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        p.terminal_gradient(row_span(X, r), mu, row_span(Y, r));
      }
    });
    add_law_term(
        p, M, p.terminal_lions_rank(), dm.d, 1.0, Y,
        [&](Eigen::Index j, Span out) { p.terminal_lions_factors(row_span(X, j), mu, out); },
        [&](Eigen::Index i, Span out) { p.terminal_lions_basis(row_span(X, i), mu, out); },
        [&](Eigen::Index j, Eigen::Index i, Span out) {
          p.terminal_lions_kernel(row_span(X, j), mu, row_span(X, i), out);
        });
    check_finite(Y, "backward", N);
  }

  RowMatrix Zs(M, dz);
  for (int n = N - 1; n >= 0; --n) {
    const double t = e.time(n);
    const MeasureSummary& mu = e.mu_path[n];
    const RowMatrix& X = e.X[n];
    const RowMatrix& U = e.U[n];
    const RowMatrix& dW = e.dW.values[n];
    const RowMatrix& Ynext = e.Y[n + 1];
    RowMatrix& Y = e.Y[n];
    if (need_z) {
      parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const auto r = static_cast<Eigen::Index>(i);
          sample_z(row_span(Ynext, r), row_span(dW, r), e.dt, row_span(Zs, r));
        }
      });
      if (opt.store_z) e.Z[n] = Zs;
    }
    auto zrow = [&](Eigen::Index r) { return CSpan(Zs.row(r).data(), static_cast<std::size_t>(dz)); };

    // Y_n = Y_{n+1} + dxH dt + (1/M) sum_j dmuH(j)(x_i) dt
    RowMatrix dxh(M, dm.d);
    parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        p.dx_hamiltonian(t, row_span(X, r), mu, row_span(Ynext, r), zrow(r), row_span(U, r), row_span(dxh, r));
      }
    });
    if (opt.drop_dx_hamiltonian) dxh.setZero();
    add_law_term(
        p, M, p.lions_rank(), dm.d, 1.0, dxh,
        [&](Eigen::Index j, Span out) {
          p.lions_factors(t, row_span(X, j), mu, row_span(Ynext, j), zrow(j), row_span(U, j), out);
        },
        [&](Eigen::Index i, Span out) { p.lions_basis(t, row_span(X, i), mu, out); },
        [&](Eigen::Index j, Eigen::Index i, Span out) {
          p.lions_kernel(t, row_span(X, j), mu, row_span(Ynext, j), zrow(j), row_span(U, j), row_span(X, i), out);
        });
    Y = Ynext + dxh * e.dt;
    check_finite(Y, "backward", n);

    if (opt.compute_gradient) {
      const RowMatrix& Yg = opt.y_index == YIndex::kNext ? Ynext : Y;
      RowMatrix& G = e.G[n];
      parallel_chunks(rows, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const auto r = static_cast<Eigen::Index>(i);
          p.du_hamiltonian(t, row_span(X, r), mu, row_span(Yg, r), zrow(r), row_span(U, r), row_span(G, r));
        }
      });
      add_law_term(
          p, M, p.control_law_rank(), dm.d1, 1.0, G,
          [&](Eigen::Index j, Span out) {
            p.control_law_factors(t, row_span(X, j), mu, row_span(Yg, j), zrow(j), row_span(U, j), out);
          },
          [&](Eigen::Index i, Span out) { p.control_law_basis(t, row_span(X, i), mu, row_span(U, i), out); },
          [&](Eigen::Index j, Eigen::Index i, Span out) {
            p.control_law_kernel(t, row_span(X, j), mu, row_span(Yg, j), zrow(j), row_span(U, j), row_span(X, i),
                                 row_span(U, i), out);
          });
      check_finite(G, "gradient", n);
    }
  }
}

CostEstimate estimate_cost(const SocpProblem& p, const ControlPolicy& policy, int M_eval, const ForwardSeeds& seeds) {
  return eval_core(SocpAsMfc(borrow(p)), policy, M_eval, seeds, false, nullptr).cost;
}

CostEstimate estimate_cost(const MfcProblem& p, const ControlPolicy& policy, int M_eval, const ForwardSeeds& seeds) {
  return eval_core(p, policy, M_eval, seeds, true, nullptr).cost;
}

double control_l2_error(const ControlPolicy& policy, const OracleControl& oracle, const MfcProblem& p, int M_eval,
                        const ForwardSeeds& seeds) {
  return eval_core(p, policy, M_eval, seeds, true, &oracle).l2_error;
}

PolicyEvaluation evaluate_policy(const SocpProblem& p, const ControlPolicy& policy, int M_eval, const ForwardSeeds& seeds,
                                 const OracleControl& oracle) {
  return eval_core(SocpAsMfc(borrow(p)), policy, M_eval, seeds, false, oracle ? &oracle : nullptr);
}

PolicyEvaluation evaluate_policy(const MfcProblem& p, const ControlPolicy& policy, int M_eval, const ForwardSeeds& seeds,
                                 const OracleControl& oracle) {
  return eval_core(p, policy, M_eval, seeds, true, oracle ? &oracle : nullptr);
}

double control_l2_error(const ControlPolicy& policy, const OracleControl& oracle, const SocpProblem& p, int M_eval,
                        const ForwardSeeds& seeds) {
  return eval_core(SocpAsMfc(borrow(p)), policy, M_eval, seeds, false, &oracle).l2_error;
}

}  // namespace pgp
