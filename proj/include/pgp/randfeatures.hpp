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

#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "pgp/stochastics.hpp"

namespace pgp {

enum class Activation { kTanh, kRelu, kSigmoid };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a);

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// phi(x) = (act(A x + b), 1) with A, b frozen.
class FeatureMap {
 public:
  FeatureMap(RowMatrix weights, Eigen::VectorXd bias, Activation activation,
             std::optional<SeedSpec> seed = std::nullopt);

  int input_dim() const { return static_cast<int>(weights_.cols()); }
  int hidden_size() const { return static_cast<int>(weights_.rows()); }
  int feature_dim() const { return hidden_size() + 1; }
  Activation activation() const { return activation_; }
  const std::optional<SeedSpec>& seed() const { return seed_; }
  const RowMatrix& weights() const { return weights_; }
  const Eigen::VectorXd& bias() const { return bias_; }

  Eigen::VectorXd features(std::span<const double> x) const;
  // Row r of out is phi(points.row(r)); out is resized to rows x feature_dim.
  void features(const Eigen::Ref<const RowMatrix>& points, RowMatrix& out) const;

 private:
  RowMatrix weights_;  // hidden x input
  RowMatrix weights_t_;
  Eigen::VectorXd bias_;
  Activation activation_;
  std::optional<SeedSpec> seed_;
};

std::shared_ptr<const FeatureMap> new_feature_map(const SeedSpec& seed, int d, int d_h,
                                                  Activation activation = Activation::kTanh);

struct RidgeSpec {
  double lambda = 1e-8;
};

inline constexpr double kNoClip = std::numeric_limits<double>::infinity();

class RandomFeatureModel {
 public:
  RandomFeatureModel(std::shared_ptr<const FeatureMap> map, RowMatrix theta, double clip_bound = kNoClip);
  static RandomFeatureModel zero(std::shared_ptr<const FeatureMap> map, int output_dim);

  int input_dim() const { return map_->input_dim(); }
  int output_dim() const { return static_cast<int>(theta_.rows()); }
  const FeatureMap& feature_map() const { return *map_; }
  const std::shared_ptr<const FeatureMap>& feature_map_ptr() const { return map_; }
  const RowMatrix& theta() const { return theta_; }  // output_dim x feature_dim
  double clip_bound() const { return clip_bound_; }

  Eigen::VectorXd evaluate(std::span<const double> x) const;
  // out is resized to rows x output_dim.
  void evaluate(const Eigen::Ref<const RowMatrix>& points, RowMatrix& out) const;

 private:
  std::shared_ptr<const FeatureMap> map_;
  RowMatrix theta_;
  double clip_bound_;
};

// Minimizes sum_i |Theta phi(x_i) - f_i|^2 + lambda |Theta|_F^2, then clips
// Theta entrywise to [-clip_bound, clip_bound].
RandomFeatureModel fit(const Eigen::Ref<const RowMatrix>& points, const Eigen::Ref<const RowMatrix>& targets,
                       std::shared_ptr<const FeatureMap> map, const RidgeSpec& ridge,
                       double clip_bound = kNoClip);

// Empirical L2 projection onto the feature span; same computation as fit.
RandomFeatureModel project_l2(const Eigen::Ref<const RowMatrix>& points, const Eigen::Ref<const RowMatrix>& targets,
                              std::shared_ptr<const FeatureMap> map, const RidgeSpec& ridge,
                              double clip_bound = kNoClip);

}  // namespace pgp
