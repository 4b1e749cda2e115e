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

// pgp: experiment runner for the particle gradient projection solver.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgp/benchmarks.hpp"
#include "pgp/config.hpp"
#include "pgp/parallel.hpp"
#include "pgp/registry.hpp"
#include "pgp/report_io.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct OracleArgs {
  std::vector<std::string> query;
  double lambda = 1.0;
  int nmc = 1000000;
  std::uint64_t seed = 1;
  int d = 100;
  double T = -1.0;  // < 0 keeps the problem default
  std::string g = "g1";
  std::string case_id;
};

double to_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw pgp::ConfigError("not a number: " + s);
  return v;
}

void need(const std::vector<std::string>& q, std::size_t n, const char* usage) {
  if (q.size() != n) throw pgp::ConfigError(std::string("usage: oracle ") + usage);
}

int run_oracle(const OracleArgs& a) {
  using pgp::format_double;
  if (a.query.empty()) throw pgp::ConfigError("oracle: missing problem id");
  const std::string& prob = a.query[0];
  const std::string what = a.query.size() > 1 ? a.query[1] : "";
  const std::vector<std::string>& q = a.query;

  if (prob == "lq" || prob == "lq100") {
    pgp::LqParams p;
    if (a.T > 0) p.T = a.T;
    if (what == "p_t") {
      need(q, 3, "lq p_t <t>");
      std::cout << "p_t=" << format_double(pgp::riccati_lq(p, to_real(q[2]))) << '\n';
      return 0;
    }
    throw pgp::ConfigError("oracle lq: queries are p_t");
  }
  if (prob == "interbank") {
    pgp::InterbankParams p;
    if (a.T > 0) p.T = a.T;
    if (what == "P_t") {
      need(q, 3, "interbank P_t <t>");
      std::cout << "P_t=" << format_double(pgp::riccati_interbank(p, to_real(q[2]))) << '\n';
      return 0;
    }
    if (what == "value") {
      need(q, 3, "interbank value <caseN|default>");
      p.law = pgp::interbank_case_law(q[2]);
      std::cout << "value=" << format_double(pgp::interbank_value(p)) << '\n';
      return 0;
    }
    throw pgp::ConfigError("oracle interbank: queries are P_t, value");
  }
  if (prob == "meanvar") {
    if (what == "value") {
      need(q, 3, "meanvar value <caseN>");
      pgp::MeanVarParams p;
      if (a.T > 0) p.T = a.T;
      p.law = pgp::meanvar_case_law(q[2]);
      const pgp::CostEstimate mc = pgp::meanvar_oracle_value(p, a.nmc, a.seed);
      std::cout << "value=" << format_double(mc.mean) << " se=" << format_double(mc.se) << '\n'
                << "exact=" << format_double(pgp::meanvar_value_exact(p)) << '\n';
      return 0;
    }
    throw pgp::ConfigError("oracle meanvar: queries are value");
  }
  if (prob == "hjb") {
    if (what == "v") {
      need(q, 4, "hjb v <t> <a> [--lambda L] [--nmc N] [--seed S] [--g g1|g2] [--d D] [--T T]");
      const double T = a.T > 0 ? a.T : 1.0;
      pgp::HjbTerminal g;
      if (a.g == "g1")
        g = pgp::HjbTerminal::kG1;
      else if (a.g == "g2")
        g = pgp::HjbTerminal::kG2;
      else
        throw pgp::ConfigError("--g must be g1 or g2");
      const std::vector<double> x(static_cast<std::size_t>(a.d), to_real(q[3]));
      const pgp::CostEstimate v = pgp::cole_hopf_value(to_real(q[2]), x, a.lambda, g, T, a.nmc, a.seed);
      std::cout << "value=" << format_double(v.mean) << " se=" << format_double(v.se) << '\n';
      return 0;
    }
    throw pgp::ConfigError("oracle hjb: queries are v");
  }
  if (prob == "priceimpact") {
    pgp::PriceImpactParams p;
    if (a.T > 0) p.T = a.T;
    const pgp::PriceImpactOracle o(p);
    if (what == "u") {
      need(q, 4, "priceimpact u <t> <x>");
      const double t = to_real(q[2]);
      std::cout << "u=" << format_double(o.control(t, to_real(q[3]), o.mean(t))) << '\n';
      return 0;
    }
    if (what == "eta" || what == "chi" || what == "mean" || what == "variance") {
      need(q, 3, "priceimpact eta|chi|mean|variance <t>");
      const double t = to_real(q[2]);
      const double v = what == "eta" ? o.eta(t) : what == "chi" ? o.chi(t) : what == "mean" ? o.mean(t) : o.variance(t);
      std::cout << what << '=' << format_double(v) << '\n';
      return 0;
    }
    throw pgp::ConfigError("oracle priceimpact: queries are u, eta, chi, mean, variance");
  }
  throw pgp::ConfigError("oracle: unknown problem '" + prob + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle gradient projection solver for stochastic and mean-field control"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = PGP_THREADS or hardware)")->check(CLI::NonNegativeNumber);

  std::string config_path;
  std::string out_path;
  std::string policy_path;
  std::uint64_t seed = 0;
  bool no_timing = false;
  bool quiet = false;
  auto* solve = app.add_subcommand("solve", "run the solver on an experiment file");
  solve->add_option("config", config_path, "experiment JSON file")->required();
  auto* seed_opt = solve->add_option("--seed", seed, "override the master seed");
  solve->add_option("--out", out_path, "CSV report path (default: output_path or <problem>.csv)");
  solve->add_option("--policy-out", policy_path, "policy file path (default: <csv>.policy)");
  solve->add_flag("--no-timing", no_timing, "write 0 in the wall_seconds column");
  solve->add_flag("--quiet", quiet, "no per-epoch progress on stderr");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "print reference values");
  oracle->add_option("query", oa.query, "problem and query, e.g. 'lq p_t 0.5'")->required();
  oracle->add_option("--lambda", oa.lambda, "HJB lambda");
  oracle->add_option("--nmc", oa.nmc, "Monte-Carlo sample size")->check(CLI::PositiveNumber);
  oracle->add_option("--seed", oa.seed, "Monte-Carlo seed");
  oracle->add_option("--d", oa.d, "HJB dimension")->check(CLI::PositiveNumber);
  oracle->add_option("--T", oa.T, "horizon");
  oracle->add_option("--g", oa.g, "HJB terminal cost g1|g2");

  std::string probe_path;
  std::uint64_t probe_seed = 0;
  int n_reference = 2000;
  int n_inner = 200;
  bool drop_dxh = false;
  auto* probe = app.add_subcommand("probe-unbiasedness", "compare the sample-wise adjoint with nested Monte Carlo");
  probe->add_option("config", probe_path, "experiment JSON file (M = outer sample size)")->required();
  auto* probe_seed_opt = probe->add_option("--seed", probe_seed, "override the seed");
  probe->add_option("--reference", n_reference, "nested-tree roots")->check(CLI::PositiveNumber);
  probe->add_option("--inner", n_inner, "children per tree node")->check(CLI::PositiveNumber);
  probe->add_flag("--drop-dxh", drop_dxh, "negative control: omit the dx Hamiltonian term");

  app.add_subcommand("list-problems", "list registered problems and their defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  pgp::set_num_threads(pgp::resolve_threads_from_env(threads));
  const pgp::ProblemRegistry registry = pgp::register_all();

  try {
    if (*solve) {
      pgp::Experiment ex = pgp::load_experiment(config_path, registry);
      if (*seed_opt) ex.config.seed = seed;
      std::string csv = out_path.empty() ? ex.config.output_path : out_path;
      if (csv.empty()) csv = ex.config.problem_id + (ex.config.case_id.empty() ? "" : "_" + ex.config.case_id) + ".csv";
      const std::string pol = policy_path.empty() ? csv + ".policy" : policy_path;
      pgp::SolveHooks hooks;
      if (!quiet)
        hooks.on_epoch = [&](const pgp::EpochRecord& r) {
          std::fprintf(stderr, "epoch %d cost %.6g se %.2g l2 %.4g (%.2fs)\n", r.epoch, r.cost, r.cost_se, r.l2_error,
                       r.wall_seconds);
        };
      const pgp::RunReport rep = pgp::run_experiment(ex, registry, hooks);
      pgp::write_report_csv(rep, csv, !no_timing);
      pgp::save_policy(rep.policy, pol);
      std::cout << "cost=" << pgp::format_double(rep.final_cost.mean)
                << " se=" << pgp::format_double(rep.final_cost.se) << '\n'
                << "csv=" << csv << "\npolicy=" << pol << '\n';
      if (rep.aborted) {
        std::cerr << "aborted: " << rep.abort_message << '\n';
        return kExitNumeric;
      }
      return 0;
    }
    if (*oracle) return run_oracle(oa);
    if (*probe) {
      pgp::Experiment ex = pgp::load_experiment(probe_path, registry);
      if (*probe_seed_opt) ex.config.seed = probe_seed;
      const pgp::ProbeReport r = pgp::probe_experiment(ex, registry, n_reference, n_inner, drop_dxh);
      auto line = [](const char* name, const pgp::ProbeStatistic& s) {
        std::cout << name << ": sample=" << pgp::format_double(s.sample_mean) << " (se "
                  << pgp::format_double(s.sample_se) << ") nested=" << pgp::format_double(s.nested_mean) << " (se "
                  << pgp::format_double(s.nested_se) << ") gap/se=" << pgp::format_double(s.gap_in_se) << '\n';
      };
      line("E[Y0]", r.level);
      line("E[Y0*X0]", r.moment);
      std::cout << (r.passed ? "PASS" : "FAIL") << " max gap " << pgp::format_double(r.max_gap_in_se)
                << " combined SE (threshold 3)\n";
      return r.passed ? 0 : kExitFail;
    }
    for (const auto& id : registry.ids()) {
      const pgp::ProblemEntry& e = registry.at(id);
      const pgp::RunConfig& c = e.defaults;
      std::cout << id << "  " << e.description << "\n    mode=" << pgp::to_string(c.mode) << " M=" << c.M
                << " N=" << c.N << " K=" << c.K << " T=" << c.T << " hidden=" << c.hidden_size
                << " rho=" << c.schedule.rho0 << "*k^-" << c.schedule.decay_power
                << " ridge=" << c.ridge_lambda << " oracle=" << (e.oracle ? "yes" : "no") << '\n';
    }
    return 0;
  } catch (const pgp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const pgp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
