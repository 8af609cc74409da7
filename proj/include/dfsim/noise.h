// Copyright 2026 The dfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DFSIM_NOISE_H
#define DFSIM_NOISE_H

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace dfsim {

/// Stationary Ornstein-Uhlenbeck noise: zero mean, variance strength^2,
/// autocorrelation strength^2 exp(-|t| / tau_c). tau_c may be +infinity
/// (frozen noise).
struct OuParams {
  double strength = 0.0;  // rad/s
  double tau_c = 1.0;     // s

  void validate() const;
};

using RandomStream = std::mt19937_64;

/// Maps (master seed, trajectory index) to an independent generator, so
/// trajectory i is reproducible no matter how many others are drawn.
class RngPolicy {
 public:
  explicit RngPolicy(std::uint64_t master_seed = 0) : master_seed_(master_seed) {}

  std::uint64_t master_seed() const { return master_seed_; }
  RandomStream stream(std::uint64_t index) const;

 private:
  std::uint64_t master_seed_;
};

/// Incremental sampler: the first call draws from N(0, strength^2); each
/// subsequent call advances by `spacing` seconds using the exact update
/// w_k = a w_{k-1} + r_k sqrt(1 - a^2), a = exp(-spacing/tau_c), r_k ~ N(0, strength^2).
class OuSampler {
 public:
  OuSampler(OuParams params, RandomStream stream);

  double first();
  double advance(double spacing);

 private:
  double draw() { return params_.strength * normal_(stream_); }

  OuParams params_;
  RandomStream stream_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double value_ = 0.0;
};

/// n_steps values of w(t_k) at spacing dt.
std::vector<double> sample_trajectory(const OuParams& p, double dt, std::size_t n_steps, RandomStream stream);

double autocorrelation(const OuParams& p, double lag);

/// C_jk = strength^2 exp(-|j-k| dt / tau_c).
Eigen::MatrixXd covariance_matrix(const OuParams& p, double dt, std::size_t n);

}  // namespace dfsim

#endif  // DFSIM_NOISE_H
