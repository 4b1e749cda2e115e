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

#include "pgp/registry.hpp"

#include <cmath>
#include <stdexcept>

namespace pgp {
namespace {

using nlohmann::json;

double num(const json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  const json& v = params.at(key);
  if (!v.is_number()) throw ConfigError(std::string("params.") + key + " must be a number");
  return v.get<double>();
}

// A number a means a * 1_d; an array gives the vector itself.
std::vector<double> vector_param(const json& params, const char* key, int d) {
  if (!params.contains(key)) return {};
  const json& v = params.at(key);
  if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(d), v.get<double>());
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(std::string("params.") + key + " must hold numbers");
      out.push_back(e.get<double>());
    }
    if (static_cast<int>(out.size()) != d)
      throw ConfigError(std::string("params.") + key + " must have length " + std::to_string(d));
    return out;
  }
  throw ConfigError(std::string("params.") + key + " must be a number or an array");
}

int dim_param(const json& params, int fallback) {
  if (!params.contains("d")) return fallback;
  const json& v = params.at("d");
  if (!v.is_number_integer() || v.get<int>() < 1) throw ConfigError("params.d must be a positive integer");
  return v.get<int>();
}

RunConfig base(const std::string& id, Mode mode) {
  RunConfig c;
  c.problem_id = id;
  c.mode = mode;
  c.seed = 1;
  return c;
}

ProblemEntry lq_entry() {
  ProblemEntry e;
  e.id = "lq100";
  e.description = "100-d linear-quadratic control with a closed-form Riccati solution";
  RunConfig c = base(e.id, Mode::kSocp);
  c.M = 4000;
  c.N = 20;
  c.K = 100;
  c.T = 1.0;
  c.hidden_size = 256;
  c.schedule = {0.4, 0.5};
  c.eval_M = 4000;
  e.defaults = c;
  e.param_keys = {"d", "a", "b", "c", "q", "r", "s", "x0"};
  e.build = [](const RunConfig& cfg, const json& p) -> AnyProblem {
    return std::make_shared<const LqProblem>(lq_params(cfg, p));
  };
  e.oracle = [](const RunConfig& cfg, const json& p) { return lq_oracle(lq_params(cfg, p)); };
  return e;
}

ProblemEntry hjb_entry() {
  ProblemEntry e;
  e.id = "hjb";
  e.description = "100-d HJB equation with a Cole-Hopf Monte-Carlo reference value";
  RunConfig c = base(e.id, Mode::kSocp);
  c.M = 2000;
  c.N = 20;
  c.K = 60;
  c.T = 1.0;
  c.hidden_size = 500;
  c.schedule = {0.25, 0.5};
  c.final_eval_M = 20000;
  e.defaults = c;
  e.default_params = {{"lambda", 1.0}, {"g", "g1"}};
  e.param_keys = {"d", "lambda", "g", "x0"};
  e.build = [](const RunConfig& cfg, const json& p) -> AnyProblem {
    return std::make_shared<const HjbProblem>(hjb_params(cfg, p));
  };
  return e;
}

ProblemEntry interbank_entry() {
  ProblemEntry e;
  e.id = "interbank";
  e.description = "mean-field inter-bank borrowing and lending (systemic risk)";
  RunConfig c = base(e.id, Mode::kMfc);
  c.M = 20000;
  c.N = 100;
  c.K = 40;
  c.T = 0.2;
  c.hidden_size = 128;
  c.schedule = {0.4, 0.5};
  c.final_eval_M = 500000;
  e.defaults = c;
  e.param_keys = {"kappa", "q", "eta", "c", "sigma"};
  e.build = [](const RunConfig& cfg, const json& p) -> AnyProblem {
    return std::make_shared<const InterbankProblem>(interbank_params(cfg, p));
  };
  e.oracle = [](const RunConfig& cfg, const json& p) { return interbank_oracle(interbank_params(cfg, p)); };
  return e;
}

ProblemEntry meanvar_entry() {
  ProblemEntry e;
  e.id = "meanvar";
  e.description = "mean-variance portfolio selection as a mean-field control problem";
  RunConfig c = base(e.id, Mode::kMfc);
  c.case_id = "case1";
  c.M = 20000;
  c.N = 10;
  c.K = 400;
  c.T = 0.2;
  c.hidden_size = 128;
  c.ridge_lambda = 1.0;
  c.schedule = {0.25, 0.5};
  c.final_eval_M = 500000;
  e.defaults = c;
  e.param_keys = {"r", "rho", "theta", "eta"};
  e.build = [](const RunConfig& cfg, const json& p) -> AnyProblem {
    return std::make_shared<const MeanVarProblem>(meanvar_params(cfg, p));
  };
  e.oracle = [](const RunConfig& cfg, const json& p) { return meanvar_oracle(meanvar_params(cfg, p)); };
  return e;
}

ProblemEntry priceimpact_entry() {
  ProblemEntry e;
  e.id = "priceimpact";
  e.description = "optimal execution with price impact (extended mean-field control)";
  RunConfig c = base(e.id, Mode::kMfc);
  c.M = 10000;
  c.N = 50;
  c.K = 60;
  c.T = 1.0;
  c.hidden_size = 128;
  c.schedule = {0.6, 0.4};
  e.defaults = c;
  e.param_keys = {"c_alpha", "c_x", "gamma", "c_g", "sigma", "x0_mean", "x0_var"};
  e.build = [](const RunConfig& cfg, const json& p) -> AnyProblem {
    return std::make_shared<const PriceImpactProblem>(priceimpact_params(cfg, p));
  };
  e.oracle = [](const RunConfig& cfg, const json& p) {
    return PriceImpactOracle(priceimpact_params(cfg, p)).as_oracle();
  };
  return e;
}

ProblemEntry sine_entry() {
  ProblemEntry e;
  e.id = "sine";
  e.description = "transport of a uniform law onto the graph of sin";
  RunConfig c = base(e.id, Mode::kMfc);
  c.M = 2000;
  c.N = 10;
  c.K = 800;
  c.T = 0.5;
  c.hidden_size = 128;
  c.schedule = {0.15, 0.2};
  c.eval_M = 10000;
  e.defaults = c;
  e.param_keys = {"sigma", "lo", "hi"};
  e.build = [](const RunConfig& cfg, const json& p) -> AnyProblem {
    return std::make_shared<const SineProblem>(sine_params(cfg, p));
  };
  return e;
}

}  // namespace

void ProblemRegistry::add(ProblemEntry entry) {
  if (entries_.count(entry.id)) throw std::invalid_argument("duplicate problem id: " + entry.id);
  const std::string id = entry.id;
  entries_.emplace(id, std::move(entry));
}

const ProblemEntry& ProblemRegistry::at(const std::string& id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw ConfigError("unknown problem: " + id);
  return it->second;
}

std::vector<std::string> ProblemRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& kv : entries_) out.push_back(kv.first);
  return out;
}

ProblemRegistry register_all() {
  ProblemRegistry r;
  r.add(lq_entry());
  r.add(hjb_entry());
  r.add(interbank_entry());
  r.add(meanvar_entry());
  r.add(priceimpact_entry());
  r.add(sine_entry());
  return r;
}

LqParams lq_params(const RunConfig& cfg, const json& p) {
  LqParams q;
  q.d = dim_param(p, q.d);
  q.a = num(p, "a", q.a);
  q.b = num(p, "b", q.b);
  q.c = num(p, "c", q.c);
  q.q = num(p, "q", q.q);
  q.r = num(p, "r", q.r);
  q.s = num(p, "s", q.s);
  q.T = cfg.T;
  q.x0 = vector_param(p, "x0", q.d);
  return q;
}

HjbParams hjb_params(const RunConfig& cfg, const json& p) {
  HjbParams h;
  h.d = dim_param(p, h.d);
  h.lambda = num(p, "lambda", h.lambda);
  h.T = cfg.T;
  if (p.contains("g")) {
    const json& g = p.at("g");
    if (g == "g1")
      h.g = HjbTerminal::kG1;
    else if (g == "g2")
      h.g = HjbTerminal::kG2;
    else
      throw ConfigError("params.g must be \"g1\" or \"g2\"");
  }
  h.x0 = vector_param(p, "x0", h.d);
  return h;
}

InterbankParams interbank_params(const RunConfig& cfg, const json& p) {
  InterbankParams b;
  b.kappa = num(p, "kappa", b.kappa);
  b.q = num(p, "q", b.q);
  b.eta = num(p, "eta", b.eta);
  b.c = num(p, "c", b.c);
  b.sigma = num(p, "sigma", b.sigma);
  b.T = cfg.T;
  if (!cfg.case_id.empty()) b.law = interbank_case_law(cfg.case_id);
  return b;
}

MeanVarParams meanvar_params(const RunConfig& cfg, const json& p) {
  MeanVarParams m;
  m.r = num(p, "r", m.r);
  m.rho = num(p, "rho", m.rho);
  m.theta = num(p, "theta", m.theta);
  m.eta = num(p, "eta", m.eta);
  m.T = cfg.T;
  if (!cfg.case_id.empty()) m.law = meanvar_case_law(cfg.case_id);
  return m;
}

PriceImpactParams priceimpact_params(const RunConfig& cfg, const json& p) {
  PriceImpactParams q;
  q.c_alpha = num(p, "c_alpha", q.c_alpha);
  q.c_x = num(p, "c_x", q.c_x);
  q.gamma = num(p, "gamma", q.gamma);
  q.c_g = num(p, "c_g", q.c_g);
  q.sigma = num(p, "sigma", q.sigma);
  q.x0_mean = num(p, "x0_mean", q.x0_mean);
  q.x0_var = num(p, "x0_var", q.x0_var);
  q.T = cfg.T;
  return q;
}

SineParams sine_params(const RunConfig& cfg, const json& p) {
  SineParams s;
  s.sigma = num(p, "sigma", s.sigma);
  s.lo = num(p, "lo", s.lo);
  s.hi = num(p, "hi", s.hi);
  s.T = cfg.T;
  return s;
}

}  // namespace pgp
