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

#include "dfsim/noise.h"

#include <cmath>
#include <stdexcept>

namespace dfsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void OuParams::validate() const {
  if (!(strength >= 0.0) || !std::isfinite(strength)) {
    throw std::invalid_argument("noise strength must be finite and non-negative");
  }
  if (!(tau_c > 0.0)) throw std::invalid_argument("noise correlation time must be positive");
}

RandomStream RngPolicy::stream(std::uint64_t index) const {
  const std::uint64_t a = splitmix64(master_seed_);
  const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return RandomStream(seq);
}

OuSampler::OuSampler(OuParams params, RandomStream stream) : params_(params), stream_(std::move(stream)) {
  params_.validate();
}

double OuSampler::first() {
  value_ = draw();
  return value_;
}

double OuSampler::advance(double spacing) {
  const double a = std::exp(-spacing / params_.tau_c);
  // 1 - a^2 without cancellation for small spacing.
  const double kick = std::sqrt(-std::expm1(-2.0 * spacing / params_.tau_c));
  value_ = a * value_ + draw() * kick;
  return value_;
}

std::vector<double> sample_trajectory(const OuParams& p, double dt, std::size_t n_steps, RandomStream stream) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_trajectory: dt must be positive");
  std::vector<double> out;
  out.reserve(n_steps);
  if (n_steps == 0) return out;
  OuSampler sampler(p, std::move(stream));
  out.push_back(sampler.first());
  for (std::size_t k = 1; k < n_steps; ++k) out.push_back(sampler.advance(dt));
  return out;
}

double autocorrelation(const OuParams& p, double lag) {
  return p.strength * p.strength * std::exp(-std::abs(lag) / p.tau_c);
}

Eigen::MatrixXd covariance_matrix(const OuParams& p, double dt, std::size_t n) {
  if (n == 0) throw std::invalid_argument("covariance_matrix: n must be at least 1");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd c(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      c(j, k) = autocorrelation(p, static_cast<double>(std::abs(j - k)) * dt);
    }
  }
  return c;
}

}  // namespace dfsim
