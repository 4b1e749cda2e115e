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

#include <doctest.h>

#include "pgp/randfeatures.hpp"

using namespace pgp;

namespace {

RowMatrix sample_points(std::uint64_t seed, int n, int d, double scale = 1.0) {
  return scale * gaussian_matrix(SeedSpec{seed, 0, substream_tag(Purpose::kTest, 0)}, n, d);
}

RowMatrix predict(const RandomFeatureModel& m, const RowMatrix& x) {
  RowMatrix out;
  m.evaluate(x, out);
  return out;
}

}  // namespace

TEST_CASE("feature map shape and constant feature") {
  auto map = new_feature_map(SeedSpec{1, 0, 0}, 2, 3);
  CHECK(map->feature_dim() == 4);
  const Eigen::VectorXd phi = map->features(std::vector<double>{0.3, -0.1});
  CHECK(phi.size() == 4);
  CHECK(phi(3) == 1.0);
}

TEST_CASE("zero input with zero bias gives the unit feature under tanh") {
  const FeatureMap map(gaussian_matrix(SeedSpec{2, 0, 0}, 5, 3), Eigen::VectorXd::Zero(5), Activation::kTanh);
  const Eigen::VectorXd phi = map.features(std::vector<double>{0.0, 0.0, 0.0});
  for (int i = 0; i < 5; ++i) CHECK(phi(i) == 0.0);
  CHECK(phi(5) == 1.0);
}

TEST_CASE("activations") {
  RowMatrix w(1, 1);
  w(0, 0) = 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(1);
  for (double x : {-30.0, -1.5, 0.0, 0.7, 25.0}) {
    const std::vector<double> in = {x};
    CHECK(FeatureMap(w, b, Activation::kTanh).features(in)(0) == doctest::Approx(std::tanh(x)).epsilon(1e-15));
    CHECK(FeatureMap(w, b, Activation::kRelu).features(in)(0) == std::max(x, 0.0));
    CHECK(FeatureMap(w, b, Activation::kSigmoid).features(in)(0) ==
          doctest::Approx(1.0 / (1.0 + std::exp(-x))).epsilon(1e-15));
  }
  CHECK(parse_activation("relu") == Activation::kRelu);
  CHECK(to_string(Activation::kSigmoid) == "sigmoid");
  CHECK_THROWS_AS(parse_activation("softplus"), std::invalid_argument);
}

TEST_CASE("same seed gives the same frozen layer") {
  const SeedSpec s{3, 4, 5};
  auto a = new_feature_map(s, 4, 8);
  auto b = new_feature_map(s, 4, 8);
  CHECK(a->weights() == b->weights());
  CHECK(a->bias() == b->bias());
  CHECK(a->seed()->stream_id == 4);
  CHECK(new_feature_map(s.with_stream(5), 4, 8)->weights() != a->weights());
}

TEST_CASE("zero theta evaluates to zero") {
  auto map = new_feature_map(SeedSpec{1, 1, 1}, 3, 6);
  const RandomFeatureModel m = RandomFeatureModel::zero(map, 2);
  const Eigen::VectorXd y = m.evaluate(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(y.size() == 2);
  CHECK(y.isZero(0.0));
}

TEST_CASE("last-column theta returns the bias entry") {
  auto map = new_feature_map(SeedSpec{1, 1, 2}, 2, 4);
  RowMatrix theta = RowMatrix::Zero(2, 5);
  theta(1, 4) = 1.0;
  const RandomFeatureModel m(map, theta);
  for (double x : {-3.0, 0.0, 2.5}) {
    const Eigen::VectorXd y = m.evaluate(std::vector<double>{x, -x});
    CHECK(y(0) == 0.0);
    CHECK(y(1) == 1.0);
  }
}

TEST_CASE("batch evaluation equals single evaluation bit for bit") {
  auto map = new_feature_map(SeedSpec{4, 0, 0}, 3, 37);
  const RowMatrix theta = gaussian_matrix(SeedSpec{4, 1, 0}, 2, 38);
  const RandomFeatureModel m(map, theta);
  const RowMatrix x = sample_points(4, 1000, 3);
  const RowMatrix batch = predict(m, x);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd single = m.evaluate(std::vector<double>(x.row(i).data(), x.row(i).data() + 3));
    REQUIRE(single(0) == batch(i, 0));
    REQUIRE(single(1) == batch(i, 1));
  }
}

TEST_CASE("dimension mismatch is rejected") {
  auto map = new_feature_map(SeedSpec{1, 0, 0}, 3, 4);
  const RandomFeatureModel m = RandomFeatureModel::zero(map, 1);
  CHECK_THROWS_AS(m.evaluate(std::vector<double>{1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(RandomFeatureModel(map, RowMatrix::Zero(1, 3)), std::invalid_argument);
}

TEST_CASE("constant targets are reproduced without ridge") {
  auto map = new_feature_map(SeedSpec{5, 0, 0}, 2, 8);
  const RowMatrix x = sample_points(5, 200, 2);
  const RowMatrix f = RowMatrix::Constant(200, 1, -1.75);
  const RandomFeatureModel m = fit(x, f, map, RidgeSpec{0.0});
  CHECK((predict(m, x).array() + 1.75).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("planted theta is recovered") {
  const int h = 12;
  auto map = new_feature_map(SeedSpec{6, 0, 0}, 3, h);
  const RowMatrix truth = gaussian_matrix(SeedSpec{6, 2, 0}, 2, h + 1);
  const RowMatrix x = sample_points(6, 10 * (h + 1), 3);
  const RowMatrix f = predict(RandomFeatureModel(map, truth), x);
  const RandomFeatureModel m = fit(x, f, map, RidgeSpec{0.0});
  CHECK((m.theta() - truth).norm() <= 1e-6 * truth.norm());
}

TEST_CASE("large ridge shrinks theta") {
  auto map = new_feature_map(SeedSpec{7, 0, 0}, 2, 10);
  const RowMatrix x = sample_points(7, 300, 2);
  RowMatrix f(300, 1);
  for (int i = 0; i < 300; ++i) f(i, 0) = std::sin(x(i, 0)) + x(i, 1);
  const double free_norm = fit(x, f, map, RidgeSpec{0.0}).theta().norm();
  const double shrunk = fit(x, f, map, RidgeSpec{1e9}).theta().norm();
  CHECK(shrunk <= 1e-3 * free_norm);
}

TEST_CASE("singular normal matrix without ridge is an error") {
  auto map = new_feature_map(SeedSpec{8, 0, 0}, 1, 20);
  const RowMatrix x = RowMatrix::Constant(50, 1, 0.4);  // one distinct point
  const RowMatrix f = RowMatrix::Constant(50, 1, 1.0);
  CHECK_THROWS_WITH_AS(fit(x, f, map, RidgeSpec{0.0}), "ill-conditioned fit; supply ridge > 0", FitError);
  CHECK_NOTHROW(fit(x, f, map, RidgeSpec{1e-8}));
}

TEST_CASE("projection is idempotent on the span") {
  auto map = new_feature_map(SeedSpec{9, 0, 0}, 2, 16);
  const RowMatrix x = sample_points(9, 400, 2);
  RowMatrix f(400, 1);
  for (int i = 0; i < 400; ++i) f(i, 0) = std::cos(2.0 * x(i, 0)) * x(i, 1);
  const RandomFeatureModel once = project_l2(x, f, map, RidgeSpec{0.0});
  const RowMatrix p1 = predict(once, x);
  const RandomFeatureModel twice = project_l2(x, p1, map, RidgeSpec{0.0});
  CHECK((predict(twice, x) - p1).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("wider hidden layer fits sin at least as well") {
  const int n = 1000;
  RowMatrix x(n, 1), f(n, 1);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = -M_PI + 2.0 * M_PI * (i + 0.5) / n;
    f(i, 0) = std::sin(x(i, 0));
  }
  auto mse = [&](int h) {
    auto map = new_feature_map(SeedSpec{10, 0, 0}, 1, h);
    return (predict(fit(x, f, map, RidgeSpec{1e-8}), x) - f).squaredNorm() / n;
  };
  CHECK(mse(256) <= mse(16));
}

TEST_CASE("clipping bounds every entry of theta") {
  auto map = new_feature_map(SeedSpec{11, 0, 0}, 2, 10);
  const RowMatrix x = sample_points(11, 200, 2);
  const RowMatrix f = 50.0 * sample_points(12, 200, 2);
  const RandomFeatureModel m = fit(x, f, map, RidgeSpec{1e-8}, 0.25);
  CHECK(m.theta().cwiseAbs().maxCoeff() <= 0.25);
  CHECK(m.theta().cwiseAbs().maxCoeff() == 0.25);
  CHECK(m.clip_bound() == 0.25);
}

TEST_CASE("fit is deterministic") {
  auto map = new_feature_map(SeedSpec{13, 0, 0}, 3, 64);
  const RowMatrix x = sample_points(13, 3000, 3);
  const RowMatrix f = sample_points(14, 3000, 2);
  CHECK(fit(x, f, map, RidgeSpec{}).theta() == fit(x, f, map, RidgeSpec{}).theta());
}
