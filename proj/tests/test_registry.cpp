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
#include <string>

#include <doctest.h>

#include "pgp/config.hpp"
#include "pgp/registry.hpp"

using namespace pgp;
using nlohmann::json;

TEST_CASE("all six problems are registered") {
  const ProblemRegistry reg = register_all();
  CHECK(reg.size() == 6);
  for (const char* id : {"lq100", "hjb", "interbank", "meanvar", "priceimpact", "sine"}) CHECK(reg.contains(id));
  CHECK_FALSE(reg.contains("lq"));
  CHECK_THROWS_WITH_AS(reg.at("nope"), doctest::Contains("unknown problem"), ConfigError);
}

TEST_CASE("duplicate ids are rejected") {
  ProblemRegistry reg = register_all();
  ProblemEntry e = reg.at("sine");
  CHECK_THROWS_AS(reg.add(e), std::invalid_argument);
}

TEST_CASE("registered hyperparameters") {
  const ProblemRegistry reg = register_all();
  const RunConfig& lq = reg.at("lq100").defaults;
  CHECK(lq.hidden_size == 256);
  CHECK(lq.schedule.rho0 == 0.4);
  CHECK(lq.schedule.decay_power == 0.5);
  CHECK(lq.K == 100);
  CHECK(lq.N == 20);
  CHECK(lq.mode == Mode::kSocp);
  const RunConfig& hjb = reg.at("hjb").defaults;
  CHECK(hjb.hidden_size == 500);
  CHECK(hjb.schedule.rho0 == 0.25);
  CHECK(hjb.K == 60);
  const RunConfig& ib = reg.at("interbank").defaults;
  CHECK(ib.M == 20000);
  CHECK(ib.hidden_size == 128);
  CHECK(ib.K == 40);
  CHECK(ib.mode == Mode::kMfc);
  const RunConfig& mv = reg.at("meanvar").defaults;
  CHECK(mv.M == 20000);
  CHECK(mv.hidden_size == 128);
  CHECK(mv.schedule.rho0 == 0.25);
  const RunConfig& pi = reg.at("priceimpact").defaults;
  CHECK(pi.hidden_size == 128);
  CHECK(pi.M == 10000);
  CHECK(pi.N == 50);
  CHECK(pi.schedule.rho0 == 0.6);
  CHECK(pi.schedule.decay_power == 0.4);
  const RunConfig& sine = reg.at("sine").defaults;
  CHECK(sine.hidden_size == 128);
  CHECK(sine.K == 800);
  CHECK(sine.N == 10);
  CHECK(sine.schedule.rho0 == 0.15);
  CHECK(sine.schedule.decay_power == 0.2);
  for (const std::string& id : reg.ids()) {
    CAPTURE(id);
    CHECK(reg.at(id).defaults.problem_id == id);
    CHECK_NOTHROW(reg.at(id).defaults.validate());
    CHECK(reg.at(id).defaults.clip_bound == kNoClip);
    CHECK(reg.at(id).defaults.y_index == YIndex::kNext);
  }
}

TEST_CASE("oracles exist for every problem but hjb") {
  const ProblemRegistry reg = register_all();
  for (const std::string& id : reg.ids()) {
    const Experiment ex = default_experiment(id, reg);
    CAPTURE(id);
    CHECK_NOTHROW(build_problem(ex, reg));
    if (id == "hjb" || id == "sine")
      CHECK_FALSE(static_cast<bool>(build_oracle(ex, reg)));
    else
      CHECK(static_cast<bool>(build_oracle(ex, reg)));
  }
}

TEST_CASE("missing keys are filled from the problem defaults") {
  const ProblemRegistry reg = register_all();
  const Experiment ex = parse_experiment(json{{"problem", "priceimpact"}, {"K", 5}}, reg);
  CHECK(ex.config.K == 5);
  CHECK(ex.config.M == 10000);
  CHECK(ex.config.N == 50);
  CHECK(ex.config.mode == Mode::kMfc);
}

TEST_CASE("config keys are parsed") {
  const ProblemRegistry reg = register_all();
  const Experiment ex = parse_experiment_text(R"({
    "problem": "interbank", "case_id": "case2", "seed": 9, "M": 100, "N": 4, "K": 2,
    "hidden_size": 8, "ridge_lambda": 0.5, "rho0": 0.1, "decay_power": 1.0, "clip_bound": 3.0,
    "y_index": "n", "eval_M": 50, "final_eval_M": 70, "activation": "relu",
    "resample_features_each_epoch": true, "output_path": "x.csv",
    "params": {"kappa": 0.0, "sigma": 0.5}
  })", reg);
  const RunConfig& c = ex.config;
  CHECK(c.case_id == "case2");
  CHECK(c.seed == 9);
  CHECK(c.M == 100);
  CHECK(c.N == 4);
  CHECK(c.hidden_size == 8);
  CHECK(c.ridge_lambda == 0.5);
  CHECK(c.schedule.decay_power == 1.0);
  CHECK(c.clip_bound == 3.0);
  CHECK(c.y_index == YIndex::kCurrent);
  CHECK(c.eval_M == 50);
  CHECK(c.final_eval_M == 70);
  CHECK(c.activation == Activation::kRelu);
  CHECK(c.resample_features_each_epoch);
  CHECK(c.output_path == "x.csv");
  const InterbankParams ip = interbank_params(c, ex.params);
  CHECK(ip.kappa == 0.0);
  CHECK(ip.sigma == 0.5);
  CHECK(ip.q == 0.8);
  CHECK(ip.law.variance == doctest::Approx(0.0025));
  CHECK(parse_experiment(json{{"problem", "sine"}, {"clip_bound", nullptr}}, reg).config.clip_bound == kNoClip);
  CHECK(parse_experiment(json{{"problem", "sine"}, {"clip_bound", "inf"}}, reg).config.clip_bound == kNoClip);
}

TEST_CASE("config errors name the key") {
  const ProblemRegistry reg = register_all();
  CHECK_THROWS_WITH_AS(parse_experiment(json{{"problem", "lq100"}, {"hiden_size", 3}}, reg),
                       doctest::Contains("hiden_size"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_experiment(json{{"problem", "lq100"}, {"params", {{"dd", 3}}}}, reg),
                       doctest::Contains("params.dd"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_experiment(json{{"problem", "lq100"}, {"K", 0}}, reg), doctest::Contains("K"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_experiment(json{{"problem", "lq100"}, {"y_index", "n+2"}}, reg),
                       doctest::Contains("y_index"), ConfigError);
  CHECK_THROWS_AS(parse_experiment(json{{"problem", "lqq"}}, reg), ConfigError);
  CHECK_THROWS_AS(parse_experiment(json{{"K", 3}}, reg), ConfigError);
  CHECK_THROWS_AS(parse_experiment_text("{not json", reg), ConfigError);
  CHECK_THROWS_AS(parse_experiment(json{{"problem", "lq100"}, {"M", "many"}}, reg), ConfigError);
  CHECK_THROWS_WITH_AS(build_problem(parse_experiment(json{{"problem", "meanvar"}, {"case_id", "case9"}}, reg), reg),
                       doctest::Contains("case9"), ConfigError);
}

TEST_CASE("problem parameters reach the built problem") {
  const ProblemRegistry reg = register_all();
  const Experiment ex = parse_experiment(json{{"problem", "lq100"}, {"params", {{"d", 3}, {"x0", {1.0, 2.0, 3.0}}}}}, reg);
  const LqParams lp = lq_params(ex.config, ex.params);
  CHECK(lp.d == 3);
  CHECK(lp.x0 == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(lq_params(ex.config, json{{"d", 2}, {"x0", 0.5}}).x0 == std::vector<double>{0.5, 0.5});
  CHECK(problem_dims(build_problem(ex, reg)).d == 3);
  const Experiment hj = parse_experiment(json{{"problem", "hjb"}, {"params", {{"lambda", 5}, {"g", "g2"}}}}, reg);
  const HjbParams hp = hjb_params(hj.config, hj.params);
  CHECK(hp.lambda == 5.0);
  CHECK(hp.g == HjbTerminal::kG2);
  const Experiment mv = parse_experiment(json{{"problem", "meanvar"}, {"case_id", "case3"}, {"T", 0.4}}, reg);
  CHECK(meanvar_params(mv.config, mv.params).T == 0.4);
  CHECK(meanvar_params(mv.config, mv.params).law.mean == doctest::Approx(0.3));
}

TEST_CASE("enum names") {
  CHECK(to_string(Mode::kSocp) == "socp");
  CHECK(to_string(Mode::kMfc) == "mfc");
  CHECK(to_string(YIndex::kCurrent) == "n");
  CHECK(to_string(YIndex::kNext) == "n_plus_1");
}
