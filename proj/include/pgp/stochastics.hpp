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

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace pgp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t substream = 0;

  SeedSpec with_stream(std::uint64_t s) const { return {master_seed, s, substream}; }
  SeedSpec with_substream(std::uint64_t s) const { return {master_seed, stream_id, s}; }
};

// Purpose tags for the substream field. The low 40 bits carry an epoch or
// step index.
enum class Purpose : std::uint64_t {
  kFeatures = 1,
  kTrainInitial = 2,
  kTrainBrownian = 3,
  kEvalInitial = 4,
  kEvalBrownian = 5,
  kFinalInitial = 6,
  kFinalBrownian = 7,
  kProbe = 8,
  kOracle = 9,
  kTest = 10,
};

constexpr std::uint64_t substream_tag(Purpose p, std::uint64_t index) {
  return (static_cast<std::uint64_t>(p) << 40) | (index & ((std::uint64_t{1} << 40) - 1));
}

std::uint64_t splitmix64(std::uint64_t x);

// Philox4x32-10 (Salmon et al. 2011).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Random-access stream of uniforms and standard normals for one SeedSpec.
// Normal number k comes from Philox block k/2 via Box-Muller, so any
// position can be read without generating the prefix.
class RandomStream {
 public:
  explicit RandomStream(const SeedSpec& seed);

  double normal();
  double uniform();  // in (0, 1)
  void seek_normal(std::uint64_t index);
  double normal_at(std::uint64_t index) const;
  // out[k] = scale * normal_at(first + k) for k < count.
  void normals(std::uint64_t first, int count, double scale, double* out) const;

 private:
  std::array<std::uint32_t, 4> block(std::uint64_t index) const;

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t next_normal_ = 0;
  std::uint64_t next_uniform_block_ = 0;
  int uniform_slot_ = 2;
  std::array<std::uint32_t, 4> uniform_buf_{};
};

RowMatrix gaussian_matrix(const SeedSpec& seed, int rows, int cols);

struct BrownianIncrements {
  int particles = 0;
  int steps = 0;
  int dim = 0;
  double dt = 0.0;
  std::vector<RowMatrix> values;  // one particles x dim block per step

  double& at(int i, int n, int j) { return values[n](i, j); }
  double at(int i, int n, int j) const { return values[n](i, j); }
};

// Particle i reads stream (master_seed, i, seed.substream); entry (n, j) is
// normal number n * m + j of that stream times sqrt(dt).
BrownianIncrements brownian_increments(const SeedSpec& seed, int M, int N, int m, double dt);

void fill_increments(const SeedSpec& seed, int step, int m, double dt, int first_particle,
                     int count, double* out);

}  // namespace pgp
