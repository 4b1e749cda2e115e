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

#include "pgp/randfeatures.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "pgp/parallel.hpp"

namespace pgp {
namespace {

// Row kernel shared by the single and batch paths so both give the same bits.
// The activation runs on an aligned scratch array: Eigen peels unaligned
// leading entries into scalar exp, which rounds differently from packet exp.
void feature_row(const RowMatrix& weights_t, const Eigen::VectorXd& bias, Activation act, const double* x,
                 double* out) {
  const Eigen::Index h = bias.size();
  thread_local Eigen::ArrayXd acc;
  acc.resize(h);
  acc = bias.array();
  for (Eigen::Index k = 0; k < weights_t.rows(); ++k) acc += x[k] * weights_t.row(k).transpose().array();
  switch (act) {
    case Activation::kTanh:
      // tanh(a) = 1 - 2 / (exp(2a) + 1), vectorized and saturating at +-1
      acc = 1.0 - 2.0 / ((2.0 * acc).exp() + 1.0);
      break;
    case Activation::kRelu:
      acc = acc.max(0.0);
      break;
    case Activation::kSigmoid:
      acc = 1.0 / (1.0 + (-acc).exp());
      break;
  }
  std::copy(acc.data(), acc.data() + h, out);
  out[h] = 1.0;
}

void model_row(const RowMatrix& theta, const double* phi, double* out) {
  const Eigen::Map<const Eigen::VectorXd> f(phi, theta.cols());
  for (Eigen::Index j = 0; j < theta.rows(); ++j) out[j] = theta.row(j).dot(f.transpose());
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "tanh";
}

FeatureMap::FeatureMap(RowMatrix weights, Eigen::VectorXd bias, Activation activation,
                       std::optional<SeedSpec> seed)
    : weights_(std::move(weights)), bias_(std::move(bias)), activation_(activation), seed_(seed) {
  if (weights_.rows() < 1 || weights_.cols() < 1) throw std::invalid_argument("FeatureMap: empty weights");
  if (bias_.size() != weights_.rows()) throw std::invalid_argument("FeatureMap: bias size mismatch");
  weights_t_ = weights_.transpose();
}

Eigen::VectorXd FeatureMap::features(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim()) throw std::invalid_argument("FeatureMap: dimension mismatch");
  Eigen::VectorXd out(feature_dim());
  feature_row(weights_t_, bias_, activation_, x.data(), out.data());
  return out;
}

void FeatureMap::features(const Eigen::Ref<const RowMatrix>& points, RowMatrix& out) const {
  if (points.cols() != input_dim()) throw std::invalid_argument("FeatureMap: dimension mismatch");
  out.resize(points.rows(), feature_dim());
  for (Eigen::Index r = 0; r < points.rows(); ++r)
    feature_row(weights_t_, bias_, activation_, points.row(r).data(), out.row(r).data());
}

std::shared_ptr<const FeatureMap> new_feature_map(const SeedSpec& seed, int d, int d_h, Activation activation) {
  if (d < 1 || d_h < 1) throw std::invalid_argument("new_feature_map: d and d_h must be >= 1");
  // weights then bias from one stream
  RandomStream rng(seed);
  RowMatrix w(d_h, d);
  for (int i = 0; i < d_h; ++i)
    for (int j = 0; j < d; ++j) w(i, j) = rng.normal();
  Eigen::VectorXd b(d_h);
  for (int i = 0; i < d_h; ++i) b(i) = rng.normal();
  return std::make_shared<const FeatureMap>(std::move(w), std::move(b), activation, seed);
}

RandomFeatureModel::RandomFeatureModel(std::shared_ptr<const FeatureMap> map, RowMatrix theta, double clip_bound)
    : map_(std::move(map)), theta_(std::move(theta)), clip_bound_(clip_bound) {
  if (!map_) throw std::invalid_argument("RandomFeatureModel: null feature map");
  if (theta_.cols() != map_->feature_dim()) throw std::invalid_argument("RandomFeatureModel: theta shape mismatch");
  if (!(clip_bound_ > 0.0)) throw std::invalid_argument("RandomFeatureModel: clip_bound must be positive");
}

RandomFeatureModel RandomFeatureModel::zero(std::shared_ptr<const FeatureMap> map, int output_dim) {
  const int f = map->feature_dim();
  return RandomFeatureModel(std::move(map), RowMatrix::Zero(output_dim, f));
}

Eigen::VectorXd RandomFeatureModel::evaluate(std::span<const double> x) const {
  const Eigen::VectorXd phi = map_->features(x);
  Eigen::VectorXd out(output_dim());
  model_row(theta_, phi.data(), out.data());
  return out;
}

void RandomFeatureModel::evaluate(const Eigen::Ref<const RowMatrix>& points, RowMatrix& out) const {
  RowMatrix phi;
  map_->features(points, phi);
  out.resize(points.rows(), output_dim());
  for (Eigen::Index r = 0; r < points.rows(); ++r) model_row(theta_, phi.row(r).data(), out.row(r).data());
}

RandomFeatureModel fit(const Eigen::Ref<const RowMatrix>& points, const Eigen::Ref<const RowMatrix>& targets,
                       std::shared_ptr<const FeatureMap> map, const RidgeSpec& ridge, double clip_bound) {
  const Eigen::Index m = points.rows();
  if (m < 1) throw std::invalid_argument("fit: need at least one point");
  if (targets.rows() != m) throw std::invalid_argument("fit: points/targets row mismatch");
  if (points.cols() != map->input_dim()) throw std::invalid_argument("fit: dimension mismatch");
  if (!(ridge.lambda >= 0.0)) throw std::invalid_argument("fit: ridge lambda must be >= 0");
  if (!points.allFinite() || !targets.allFinite()) throw FitError("fit: non-finite inputs");

  const int f = map->feature_dim();
  const Eigen::Index out_dim = targets.cols();
  const std::size_t chunks = chunk_count(static_cast<std::size_t>(m));
  std::vector<Eigen::MatrixXd> grams(chunks);
  std::vector<Eigen::MatrixXd> rhs(chunks);
  parallel_chunks(static_cast<std::size_t>(m), [&](std::size_t c, std::size_t begin, std::size_t end) {
    const auto rows = static_cast<Eigen::Index>(end - begin);
    RowMatrix phi;
    map->features(points.middleRows(static_cast<Eigen::Index>(begin), rows), phi);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(f, f);
    g.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
    grams[c] = std::move(g);
    rhs[c] = phi.transpose() * targets.middleRows(static_cast<Eigen::Index>(begin), rows);
  });
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(f, f);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(f, out_dim);
  for (std::size_t c = 0; c < chunks; ++c) {
    gram += grams[c];
    b += rhs[c];
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += ridge.lambda;

  Eigen::MatrixXd solution;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  const double scale = std::max(gram.diagonal().maxCoeff(), 1.0);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    // a tiny pivot relative to the diagonal means the Gram matrix is numerically singular
    const auto& l = llt.matrixLLT();
    const double min_pivot = l.diagonal().minCoeff();
    ok = min_pivot * min_pivot > 1e-13 * scale;
  }
  if (ok) {
    solution = llt.solve(b);
  } else {
    if (ridge.lambda == 0.0) throw FitError("ill-conditioned fit; supply ridge > 0");
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
    solution = cod.solve(b);
  }
  if (!solution.allFinite()) throw FitError("fit: non-finite solution");

  RowMatrix theta = solution.transpose();
  if (std::isfinite(clip_bound)) theta = theta.cwiseMax(-clip_bound).cwiseMin(clip_bound);
  return RandomFeatureModel(std::move(map), std::move(theta), clip_bound);
}

RandomFeatureModel project_l2(const Eigen::Ref<const RowMatrix>& points, const Eigen::Ref<const RowMatrix>& targets,
                              std::shared_ptr<const FeatureMap> map, const RidgeSpec& ridge, double clip_bound) {
  return fit(points, targets, std::move(map), ridge, clip_bound);
}

}  // namespace pgp
