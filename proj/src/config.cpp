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

#include "pgp/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace pgp {
namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "problem", "mode",     "seed",        "M",        "N",       "K",           "T",
      "hidden_size", "ridge_lambda", "rho0", "decay_power", "clip_bound", "y_index", "eval_M",
      "case_id", "output_path", "activation", "resample_features_each_epoch", "final_eval_M", "params"};
  return keys;
}

const json& field(const json& doc, const char* key) { return doc.at(key); }

int int_field(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(std::string(key) + " is out of range");
  return static_cast<int>(x);
}

double real_field(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  return v.get<double>();
}

std::string string_field(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_string()) throw ConfigError(std::string(key) + " must be a string");
  return v.get<std::string>();
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::kMfc ? "mfc" : "socp"; }
std::string to_string(YIndex y) { return y == YIndex::kNext ? "n_plus_1" : "n"; }

Experiment default_experiment(const std::string& problem_id, const ProblemRegistry& registry) {
  const ProblemEntry& entry = registry.at(problem_id);
  return Experiment{entry.defaults, entry.default_params};
}

Experiment parse_experiment(const json& doc, const ProblemRegistry& registry) {
  if (!doc.is_object()) throw ConfigError("experiment file must hold a JSON object");
  for (const auto& kv : doc.items())
    if (!known_keys().count(kv.key())) throw ConfigError("unknown config key '" + kv.key() + "'");
  if (!doc.contains("problem")) throw ConfigError("missing required key 'problem'");

  Experiment ex = default_experiment(string_field(doc, "problem"), registry);
  const ProblemEntry& entry = registry.at(ex.config.problem_id);
  RunConfig& c = ex.config;

  if (doc.contains("mode")) {
    const std::string m = string_field(doc, "mode");
    if (m == "socp")
      c.mode = Mode::kSocp;
    else if (m == "mfc")
      c.mode = Mode::kMfc;
    else
      throw ConfigError("mode must be \"socp\" or \"mfc\"");
  }
  if (doc.contains("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError("seed must be a non-negative integer");
    c.seed = v.get<std::uint64_t>();
  }
  if (doc.contains("M")) c.M = int_field(doc, "M");
  if (doc.contains("N")) c.N = int_field(doc, "N");
  if (doc.contains("K")) c.K = int_field(doc, "K");
  if (doc.contains("T")) c.T = real_field(doc, "T");
  if (doc.contains("hidden_size")) c.hidden_size = int_field(doc, "hidden_size");
  if (doc.contains("ridge_lambda")) c.ridge_lambda = real_field(doc, "ridge_lambda");
  if (doc.contains("rho0")) c.schedule.rho0 = real_field(doc, "rho0");
  if (doc.contains("decay_power")) c.schedule.decay_power = real_field(doc, "decay_power");
  if (doc.contains("clip_bound")) {
    const json& v = doc.at("clip_bound");
    if (v.is_null() || (v.is_string() && v == "inf"))
      c.clip_bound = kNoClip;
    else
      c.clip_bound = real_field(doc, "clip_bound");
  }
  if (doc.contains("y_index")) {
    const std::string y = string_field(doc, "y_index");
    if (y == "n")
      c.y_index = YIndex::kCurrent;
    else if (y == "n_plus_1")
      c.y_index = YIndex::kNext;
    else
      throw ConfigError("y_index must be \"n\" or \"n_plus_1\"");
  }
  if (doc.contains("eval_M")) c.eval_M = int_field(doc, "eval_M");
  if (doc.contains("final_eval_M")) c.final_eval_M = int_field(doc, "final_eval_M");
  if (doc.contains("case_id")) c.case_id = string_field(doc, "case_id");
  if (doc.contains("output_path")) c.output_path = string_field(doc, "output_path");
  if (doc.contains("activation")) {
    try {
      c.activation = parse_activation(string_field(doc, "activation"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("resample_features_each_epoch")) {
    const json& v = doc.at("resample_features_each_epoch");
    if (!v.is_boolean()) throw ConfigError("resample_features_each_epoch must be a boolean");
    c.resample_features_each_epoch = v.get<bool>();
  }
  if (doc.contains("params")) {
    const json& p = doc.at("params");
    if (!p.is_object()) throw ConfigError("params must be an object");
    for (const auto& kv : p.items()) {
      bool ok = false;
      for (const auto& k : entry.param_keys) ok = ok || k == kv.key();
      if (!ok) throw ConfigError("unknown config key 'params." + kv.key() + "' for problem " + entry.id);
      ex.params[kv.key()] = kv.value();
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return ex;
}

Experiment parse_experiment_text(const std::string& text, const ProblemRegistry& registry) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_experiment(doc, registry);
}

Experiment load_experiment(const std::string& path, const ProblemRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_text(ss.str(), registry);
}

AnyProblem build_problem(const Experiment& ex, const ProblemRegistry& registry) {
  try {
    return registry.at(ex.config.problem_id).build(ex.config, ex.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

OracleControl build_oracle(const Experiment& ex, const ProblemRegistry& registry) {
  const ProblemEntry& entry = registry.at(ex.config.problem_id);
  if (!entry.oracle) return nullptr;
  try {
    return entry.oracle(ex.config, ex.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunReport run_experiment(const Experiment& ex, const ProblemRegistry& registry, const SolveHooks& hooks) {
  const AnyProblem problem = build_problem(ex, registry);
  const OracleControl oracle = build_oracle(ex, registry);
  try {
    return solve(problem, ex.config, oracle, hooks);
  } catch (const NumericalError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ProbeReport probe_experiment(const Experiment& ex, const ProblemRegistry& registry, int n_reference, int n_inner,
                             bool drop_dx_hamiltonian) {
  const AnyProblem problem = build_problem(ex, registry);
  const OracleControl oracle = build_oracle(ex, registry);
  const ProblemDims dm = problem_dims(problem);
  ProbeConfig pc;
  pc.n_outer = ex.config.M;
  pc.n_reference = n_reference;
  pc.n_inner = n_inner;
  pc.seed = ex.config.seed;
  pc.drop_dx_hamiltonian = drop_dx_hamiltonian;
  FeedbackFn fn = oracle ? FeedbackFn(oracle) : FeedbackFn([](double, CSpan, const MeasureSummary&, Span u) {
    for (auto& v : u) v = 0.0;
  });
  const FeedbackPolicy policy(std::move(fn), ex.config.N, dm.d1);
  try {
    return std::visit([&](const auto& p) { return unbiasedness_probe(*p, policy, pc); }, problem);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace pgp
