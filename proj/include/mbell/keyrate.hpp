// Copyright 2026 The mbell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <exception>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mbell/npa.hpp"
#include "mbell/polynomial.hpp"
#include "mbell/quantum.hpp"

namespace mbell {

/// h(q) = -q log2 q - (1-q) log2 (1-q), with h(0) = h(1) = 0.
inline double binary_entropy(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0, 1]");
  if (q == 0.0 || q == 1.0) return 0.0;
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

/// QBER of a depolarized GHZ state: Alice and Bob disagree when exactly one of
/// the two qubits was flipped.
inline double depolarized_qber(double p) { return p * (1.0 - p / 2.0); }

/// Bipartite CHSH key rate of a depolarized Bell pair with error rate Q:
/// 1 - h(Q) - h((1 + sqrt(S^2/4 - 1))/2) with S = 2 sqrt2 (1 - 2Q).
/// With no CHSH violation the last term is 1. Divided by n - 1 when the
/// bipartite links share a bottleneck.
inline double chsh_baseline(double q, int n, bool bottleneck) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("chsh_baseline: Q outside [0, 1]");
  if (n < 2) throw std::invalid_argument("chsh_baseline: n must be >= 2");
  const double s = 2.0 * std::numbers::sqrt2 * (1.0 - 2.0 * q);
  const double radicand = s * s / 4.0 - 1.0;
  double eve = 1.0;
  if (radicand >= 0.0) eve = binary_entropy(std::clamp((1.0 + std::sqrt(radicand)) / 2.0, 0.0, 1.0));
  const double r = 1.0 - binary_entropy(q) - eve;
  return bottleneck ? r / (n - 1) : r;
}

struct RateOptions {
  std::optional<npa::Level> level;  // per-n default when unset
  bool parity = false;              // also run the Parity-CHSH pipeline
  bool reoptimize_theta = false;    // re-maximize the Bell value at each p
  sdp::Config solver;
};

struct RatePoint {
  int n = 0;
  double p = 0.0;
  double theta = 0.0;
  double g_obs = 0.0;
  double qber = 0.0;
  double p_guess = 1.0;
  double rate_raw = 0.0;
  double rate = 0.0;
  double chsh_rate = 0.0;
  double chsh_bottleneck_rate = 0.0;
  bool aborted = false;  // no violation of the classical bound
  std::optional<double> parity_g_obs;
  std::optional<double> parity_p_guess;
  std::optional<double> parity_rate_raw;
  std::optional<double> parity_rate;
  npa::Level level = npa::Level::kTwo;
  std::string error;  // non-empty when the SDP failed; rates are then unset
};

namespace detail {

struct Secret {
  double p_guess = 1.0;
  double rate_raw = 0.0;
  bool aborted = false;
};

inline Secret secret_fraction(const BellPolynomial& bell, double g_obs, double q, npa::Level level,
                              const sdp::Config& config) {
  Secret s;
  // The protocol aborts unless the classical maximum 1 is exceeded.
  if (g_obs <= 1.0) {
    s.aborted = true;
  } else {
    s.p_guess = npa::guessing_probability(bell, g_obs, level, config);
  }
  s.rate_raw = 2.0 * (1.0 - s.p_guess) - binary_entropy(q);
  return s;
}

/// A0 = Z, A1 = X, Bob 2 measures at 3pi/4 so that (B0 + B1)/2 ~ X and
/// (B0 - B1)/2 ~ -Z, every other Bob measures X.
inline MeasurementSpec parity_measurements(int n) {
  MeasurementSpec spec = honest_measurements(n, 3.0 * std::numbers::pi / 4.0);
  for (std::size_t j = 1; j < spec.bobs.size(); ++j) {
    spec.bobs[j] = {QubitObservable::pauli_x(), QubitObservable::pauli_x()};
  }
  return spec;
}

inline double best_theta_at(int n, const DenseState& state, double start) {
  const BellPolynomial bell = build_bell(n);
  auto negated = [&](double t) { return -expectation(state, bell_operator(bell, honest_measurements(n, t))); };
  const double lo = std::max(kThetaGuard, start - 0.5);
  const double hi = std::min(std::numbers::pi - kThetaGuard, start + 0.5);
  return boost::math::tools::brent_find_minima(negated, lo, hi, 30).first;
}

}  // namespace detail

/// Key rate 2(1 - P_g) - h(Q) of the GHZ protocol under local depolarizing
/// noise p. The Bell test uses the noiseless optimal angles unless
/// `reoptimize_theta` is set.
inline RatePoint di_rate(int n, double p, const RateOptions& options = {}) {
  if (n < 2 || n > 6) throw std::invalid_argument("di_rate: n must be in [2, 6]");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("di_rate: p outside [0, 1]");
  RatePoint pt;
  pt.n = n;
  pt.p = p;
  pt.level = options.level.value_or(npa::default_guessing_level(n));

  const DenseState state = apply_depolarizing(ghz_state(n), p);
  pt.theta = optimize_theta(n).theta;
  if (options.reoptimize_theta) pt.theta = detail::best_theta_at(n, state, pt.theta);
  const BellPolynomial bell = build_bell(n);
  pt.g_obs = expectation(state, bell_operator(bell, honest_measurements(n, pt.theta)));

  pt.qber = depolarized_qber(p);
  const double measured = qber(state);
  if (std::abs(measured - pt.qber) > 1e-10) {
    throw std::logic_error("di_rate: state QBER " + std::to_string(measured) + " disagrees with p(1 - p/2)");
  }
  pt.chsh_rate = chsh_baseline(pt.qber, n, false);
  pt.chsh_bottleneck_rate = chsh_baseline(pt.qber, n, true);

  const detail::Secret s = detail::secret_fraction(bell, pt.g_obs, pt.qber, pt.level, options.solver);
  pt.p_guess = s.p_guess;
  pt.rate_raw = s.rate_raw;
  pt.rate = s.aborted ? 0.0 : std::max(0.0, s.rate_raw);
  pt.aborted = s.aborted;

  if (options.parity && n >= 3) {
    const BellPolynomial par = parity_chsh(n);
    pt.parity_g_obs = expectation(state, bell_operator(par, detail::parity_measurements(n)));
    const detail::Secret ps = detail::secret_fraction(par, *pt.parity_g_obs, pt.qber, pt.level, options.solver);
    pt.parity_p_guess = ps.p_guess;
    pt.parity_rate_raw = ps.rate_raw;
    pt.parity_rate = ps.aborted ? 0.0 : std::max(0.0, ps.rate_raw);
  }
  return pt;
}

/// di_rate over a grid. A failing point keeps its noise and error message and
/// the curve carries on. Points are computed on up to `workers` threads and
/// returned in grid order.
inline std::vector<RatePoint> rate_curve(int n, const std::vector<double>& grid, const RateOptions& options = {},
                                         unsigned workers = 1) {
  std::vector<RatePoint> out(grid.size());
  auto run = [&](std::size_t i) {
    try {
      out[i] = di_rate(n, grid[i], options);
    } catch (const std::exception& e) {
      RatePoint failed;
      failed.n = n;
      failed.p = grid[i];
      failed.level = options.level.value_or(npa::default_guessing_level(n));
      failed.error = e.what();
      out[i] = failed;
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(grid.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run(i);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < grid.size(); i += workers) run(i);
      });
    }
  }
  return out;
}

/// `steps` evenly spaced noise values from 0 to pmax.
inline std::vector<double> noise_grid(double pmax, int steps) {
  if (steps < 1) throw std::invalid_argument("noise_grid: steps must be >= 1");
  if (!(pmax >= 0.0 && pmax <= 1.0)) throw std::invalid_argument("noise_grid: pmax outside [0, 1]");
  if (steps == 1) return {0.0};
  std::vector<double> grid;
  for (int i = 0; i < steps; ++i) grid.push_back(pmax * i / (steps - 1));
  return grid;
}

}  // namespace mbell
