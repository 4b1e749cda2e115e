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

#include "pgp/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pgp/config.hpp"

namespace pgp {
namespace {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw std::runtime_error("policy file: bad number '" + s + "'");
  return v;
}

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word)
    throw std::runtime_error("policy file: expected '" + word + "', got '" + got + "'");
}

template <class T>
T read(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw std::runtime_error(std::string("policy file: cannot read ") + what);
  return v;
}

double read_hex(std::istream& in) { return parse_hex(read<std::string>(in, "number")); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_report_csv(const RunReport& r, std::ostream& out, bool timing) {
  out << kCsvHeader << '\n';
  for (const auto& e : r.epochs)
    out << e.epoch << ',' << (timing ? format_double(e.wall_seconds) : std::string("0")) << ','
        << format_double(e.cost) << ',' << format_double(e.cost_se) << ',' << format_double(e.l2_error) << '\n';
  const RunConfig& c = r.config;
  out << "#problem=" << c.problem_id << '\n';
  if (!c.case_id.empty()) out << "#case_id=" << c.case_id << '\n';
  out << "#mode=" << to_string(c.mode) << '\n'
      << "#seed=" << c.seed << '\n'
      << "#M=" << c.M << '\n'
      << "#N=" << c.N << '\n'
      << "#K=" << c.K << '\n'
      << "#T=" << format_double(c.T) << '\n'
      << "#hidden_size=" << c.hidden_size << '\n'
      << "#ridge_lambda=" << format_double(c.ridge_lambda) << '\n'
      << "#rho0=" << format_double(c.schedule.rho0) << '\n'
      << "#decay_power=" << format_double(c.schedule.decay_power) << '\n'
      << "#y_index=" << to_string(c.y_index) << '\n'
      << "#final_eval_M=" << c.effective_final_eval_M() << '\n'
      << "#initial_cost=" << format_double(r.initial_cost) << '\n'
      << "#cost=" << format_double(r.final_cost.mean) << '\n'
      << "#cost_se=" << format_double(r.final_cost.se) << '\n'
      << "#l2_error=" << format_double(r.final_l2_error) << '\n'
      << "#epochs_completed=" << r.epochs.size() << '\n'
      << "#aborted=" << (r.aborted ? "true" : "false") << '\n';
  if (r.aborted) out << "#abort_message=" << r.abort_message << '\n';
}

void write_report_csv(const RunReport& report, const std::string& path, bool timing) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_report_csv(report, out, timing);
}

void save_policy(const PolicySequence& policy, std::ostream& out) {
  out << "pgp-policy " << kPolicyFormatVersion << '\n';
  out << "steps " << policy.steps() << '\n';
  for (int n = 0; n < policy.steps(); ++n) {
    const RandomFeatureModel& m = policy.model(n);
    const FeatureMap& f = m.feature_map();
    out << "step " << n << " time " << hex(policy.times().at(static_cast<std::size_t>(n))) << '\n';
    out << "map " << f.input_dim() << ' ' << f.hidden_size() << ' ' << to_string(f.activation()) << ' ';
    if (f.seed()) {
      out << "seed " << f.seed()->master_seed << ' ' << f.seed()->stream_id << ' ' << f.seed()->substream << '\n';
    } else {
      out << "explicit\n";
      for (Eigen::Index i = 0; i < f.weights().rows(); ++i) {
        for (Eigen::Index j = 0; j < f.weights().cols(); ++j) out << (j ? " " : "") << hex(f.weights()(i, j));
        out << '\n';
      }
      for (Eigen::Index i = 0; i < f.bias().size(); ++i) out << (i ? " " : "") << hex(f.bias()(i));
      out << '\n';
    }
    const double clip = m.clip_bound();
    out << "theta " << m.theta().rows() << ' ' << m.theta().cols() << " clip "
        << (std::isinf(clip) ? std::string("inf") : hex(clip)) << '\n';
    for (Eigen::Index i = 0; i < m.theta().rows(); ++i) {
      for (Eigen::Index j = 0; j < m.theta().cols(); ++j) out << (j ? " " : "") << hex(m.theta()(i, j));
      out << '\n';
    }
  }
  out << "end\n";
}

void save_policy(const PolicySequence& policy, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_policy(policy, out);
}

PolicySequence load_policy(std::istream& in) {
  expect(in, "pgp-policy");
  const int version = read<int>(in, "version");
  if (version != kPolicyFormatVersion)
    throw std::runtime_error("policy file: unsupported version " + std::to_string(version));
  expect(in, "steps");
  const int steps = read<int>(in, "steps");
  if (steps < 0) throw std::runtime_error("policy file: negative step count");
  std::vector<RandomFeatureModel> models;
  std::vector<double> times;
  for (int n = 0; n < steps; ++n) {
    expect(in, "step");
    if (read<int>(in, "step index") != n) throw std::runtime_error("policy file: steps out of order");
    expect(in, "time");
    times.push_back(read_hex(in));
    expect(in, "map");
    const int d = read<int>(in, "input_dim");
    const int h = read<int>(in, "hidden_size");
    const Activation act = parse_activation(read<std::string>(in, "activation"));
    const std::string kind = read<std::string>(in, "map kind");
    std::shared_ptr<const FeatureMap> map;
    if (kind == "seed") {
      SeedSpec s;
      s.master_seed = read<std::uint64_t>(in, "seed");
      s.stream_id = read<std::uint64_t>(in, "stream");
      s.substream = read<std::uint64_t>(in, "substream");
      map = new_feature_map(s, d, h, act);
    } else if (kind == "explicit") {
      RowMatrix w(h, d);
      Eigen::VectorXd b(h);
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < d; ++j) w(i, j) = read_hex(in);
      for (int i = 0; i < h; ++i) b(i) = read_hex(in);
      map = std::make_shared<const FeatureMap>(std::move(w), std::move(b), act);
    } else {
      throw std::runtime_error("policy file: unknown map kind '" + kind + "'");
    }
    expect(in, "theta");
    const int rows = read<int>(in, "theta rows");
    const int cols = read<int>(in, "theta cols");
    if (cols != h + 1) throw std::runtime_error("policy file: theta width does not match the feature map");
    expect(in, "clip");
    const double clip = read_hex(in);
    RowMatrix theta(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) theta(i, j) = read_hex(in);
    models.emplace_back(std::move(map), std::move(theta), clip);
  }
  expect(in, "end");
  return PolicySequence(std::move(models), std::move(times));
}

PolicySequence load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_policy(in);
}

}  // namespace pgp
