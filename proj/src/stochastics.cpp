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

#include "pgp/stochastics.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace pgp {
namespace {

constexpr std::uint32_t kW0 = 0x9E3779B9;
constexpr std::uint32_t kW1 = 0xBB67AE85;
constexpr std::uint32_t kM0 = 0xD2511F53;
constexpr std::uint32_t kM1 = 0xCD9E8D57;
constexpr std::uint64_t kUniformDomain = std::uint64_t{1} << 63;

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  // 53 random bits, shifted by half an ulp so the result is never 0 or 1.
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi >> 5) << 26) | (lo >> 6);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

RandomStream::RandomStream(const SeedSpec& seed) : stream_(seed.stream_id) {
  const std::uint64_t k = splitmix64(seed.master_seed ^ splitmix64(seed.substream));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

std::array<std::uint32_t, 4> RandomStream::block(std::uint64_t index) const {
  return philox4x32({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                     static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                    key_);
}

double RandomStream::normal_at(std::uint64_t index) const {
  const auto b = block(index / 2);
  const double u1 = to_unit(b[0], b[1]);
  const double u2 = to_unit(b[2], b[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return (index % 2 == 0) ? r * std::cos(a) : r * std::sin(a);
}

void RandomStream::normals(std::uint64_t first, int count, double scale, double* out) const {
  std::uint64_t idx = first;
  const std::uint64_t end = first + static_cast<std::uint64_t>(count);
  while (idx < end) {
    const auto b = block(idx / 2);
    const double r = scale * std::sqrt(-2.0 * std::log(to_unit(b[0], b[1])));
    const double a = 2.0 * std::numbers::pi * to_unit(b[2], b[3]);
    if (idx % 2 == 0) {
      *out++ = r * std::cos(a);
      if (++idx == end) break;
    }
    *out++ = r * std::sin(a);
    ++idx;
  }
}

double RandomStream::normal() { return normal_at(next_normal_++); }

void RandomStream::seek_normal(std::uint64_t index) { next_normal_ = index; }

double RandomStream::uniform() {
  if (uniform_slot_ == 2) {
    uniform_buf_ = block(kUniformDomain + next_uniform_block_++);
    uniform_slot_ = 0;
  }
  const int s = uniform_slot_++;
  return to_unit(uniform_buf_[2 * s], uniform_buf_[2 * s + 1]);
}

RowMatrix gaussian_matrix(const SeedSpec& seed, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("gaussian_matrix: rows and cols must be >= 1");
  RandomStream rng(seed);
  RowMatrix out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = rng.normal();
  return out;
}

void fill_increments(const SeedSpec& seed, int step, int m, double dt, int first_particle,
                     int count, double* out) {
  const double scale = std::sqrt(dt);
  for (int r = 0; r < count; ++r) {
    const RandomStream rng(seed.with_stream(static_cast<std::uint64_t>(first_particle + r)));
    rng.normals(static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(m), m, scale,
                out + static_cast<std::ptrdiff_t>(r) * m);
  }
}

BrownianIncrements brownian_increments(const SeedSpec& seed, int M, int N, int m, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("brownian_increments: dt must be positive");
  if (M < 1 || N < 1 || m < 1) throw std::invalid_argument("brownian_increments: sizes must be >= 1");
  BrownianIncrements inc;
  inc.particles = M;
  inc.steps = N;
  inc.dim = m;
  inc.dt = dt;
  inc.values.assign(N, RowMatrix(M, m));
  for (int n = 0; n < N; ++n) fill_increments(seed, n, m, dt, 0, M, inc.values[n].data());
  return inc;
}

}  // namespace pgp
