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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mbell/mbell.hpp"
#include "run_command.hpp"

namespace {

using namespace mbell;
using std::numbers::pi;
using std::numbers::sqrt2;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "failed: " << what << "; ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) { return format_number(v, 6); }

void classical_bounds(Outcome& o) {
  const auto t0 = Clock::now();
  for (int n = 2; n <= 8; ++n) {
    const BoundsReport r = classical_bounds_exhaustive(n);
    const Rational lo(-((std::int64_t{1} << (n - 1)) - 1));
    o.require(r.max_value == Rational(1) && r.min_value == lo, "exhaustive n=" + std::to_string(n));
  }
  for (int n = 2; n <= 20; ++n) {
    const BoundsReport r = classical_bounds_reduced(n);
    const Rational lo(-((std::int64_t{1} << (n - 1)) - 1));
    o.require(r.max_value == Rational(1) && r.min_value == lo, "reduced n=" + std::to_string(n));
  }
  const double t = seconds_since(t0);
  o.require(t < 10.0, "runtime under 10 s");
  o.detail << "runtime " << num(t) << " s";
}

void table_one(Outcome& o) {
  const auto t0 = Clock::now();
  const std::array<double, 6> g{1.4142, 1.5, 1.5539, 1.5926, 1.6224, 1.6464};
  const std::array<double, 6> theta{2.3562, 2.0944, 1.9786, 1.9106, 1.8650, 1.8318};
  const std::array<double, 6> ratio{0.0, 1.0607, 1.0359, 1.0249, 1.0187, 1.0148};
  double worst_g = 0.0;
  double worst_theta = 0.0;
  double worst_ratio = 0.0;
  double prev = 0.0;
  for (int n = 2; n <= 7; ++n) {
    const auto i = static_cast<std::size_t>(n - 2);
    const ThetaOptimum opt = optimize_theta(n);
    worst_g = std::max(worst_g, std::abs(opt.value - g[i]));
    worst_theta = std::max(worst_theta, std::abs(opt.theta - theta[i]));
    if (n > 2) worst_ratio = std::max(worst_ratio, std::abs(opt.value / prev - ratio[i]));
    prev = opt.value;
  }
  const double t = seconds_since(t0);
  o.require(worst_g <= 5e-5, "|dg| <= 5e-5");
  o.require(worst_theta <= 5e-4, "|dtheta| <= 5e-4");
  o.require(worst_ratio <= 5e-4, "|dratio| <= 5e-4");
  o.require(t < 1.0, "runtime under 1 s");
  o.detail << "max |dg| " << num(worst_g) << ", max |dtheta| " << num(worst_theta) << ", max |dratio| "
           << num(worst_ratio) << ", runtime " << num(t) << " s";
}

void dual_path(Outcome& o) {
  double worst = 0.0;
  for (int n = 2; n <= 7; ++n) {
    const DenseState ghz = ghz_state(n);
    const BellPolynomial bell = build_bell(n);
    for (int k = 0; k < 25; ++k) {
      const double theta = pi * k / 24.0;
      const double dense = expectation(ghz, bell_operator(bell, honest_measurements(n, theta)));
      worst = std::max(worst, std::abs(dense - ghz_bell_value_closed(n, theta)));
    }
  }
  o.require(worst <= 1e-9, "closed form vs dense within 1e-9");
  o.detail << "max deviation " << num(worst);
}

void stabilizer(Outcome& o) {
  double worst = 0.0;
  for (int n = 2; n <= 8; ++n) {
    worst = std::max(worst, (stabilizer_expansion(n).matrix() - ghz_state(n).matrix()).cwiseAbs().maxCoeff());
  }
  o.require(worst <= 1e-13, "entrywise within 1e-13");
  o.detail << "max deviation " << num(worst);
}

void reductions(Outcome& o) {
  for (int n = 3; n <= 8; ++n) {
    for (int j = 2; j <= n; ++j) {
      o.require(reduce_party(build_bell(n), j) == build_bell(n - 1),
                "reduce_party n=" + std::to_string(n) + " j=" + std::to_string(j));
    }
  }
  for (int n = 3; n <= 6; ++n) {
    BellPolynomial b = build_bell(n);
    for (int j = 3; j <= n; ++j) b = substitute_input(b, j, 1, 0);
    o.require(b == parity_chsh(n), "parity recovery n=" + std::to_string(n));
  }
  o.detail << "exact polynomial equality";
}

void tsirelson(Outcome& o) {
  const auto t0 = Clock::now();
  const double g3 = npa::tsirelson_bound(3, npa::Level::kTwo);
  const double g4 = npa::tsirelson_bound(4, npa::Level::kOnePlusAB);
  const double t = seconds_since(t0);
  o.require(std::abs(g3 - 1.5) <= 1e-3, "n=3 level 2 within 1e-3 of 1.5");
  o.require(g4 >= 1.5539 - 1e-3 && g4 <= 1.5539 + 5e-2, "n=4 level 1+AB in [1.5529, 1.6039]");
  o.require(t < 300.0, "runtime under 5 min");
  o.detail << "n=3 " << format_number(g3) << ", n=4 " << format_number(g4) << ", runtime " << num(t) << " s";
}

void guessing(Outcome& o) {
  double worst = 0.0;
  for (double s : {2.1, 2.3, 2.5, 2.7}) {
    const double analytic = 0.5 + 0.5 * std::sqrt(2.0 - s * s / 4.0);
    const double pg = npa::guessing_probability(2, s / 2.0, npa::default_guessing_level(2));
    worst = std::max(worst, std::abs(pg - analytic));
  }
  o.require(worst <= 5e-3, "n=2 curve within 5e-3 of the analytic bound");
  o.detail << "max curve deviation " << num(worst);
  for (int n : {2, 3}) {
    const npa::Level level = npa::default_guessing_level(n);
    const double g_qm = n == 2 ? sqrt2 : 1.5;
    const double at_classical = npa::guessing_probability(n, 1.0, level);
    const double at_max = npa::guessing_probability(n, g_qm, level);
    o.require(std::abs(at_classical - 1.0) <= 1e-3, "P_g(1) = 1 for n=" + std::to_string(n));
    o.require(std::abs(at_max - 0.5) <= 1e-3, "P_g(g_qm) = 1/2 for n=" + std::to_string(n));
    o.detail << "; n=" << n << " level " << npa::to_string(level) << ": P_g(1) " << num(at_classical)
             << ", P_g(" << num(g_qm) << ") " << num(at_max);
  }
}

void key_rate_endpoints(Outcome& o) {
  const RatePoint pt = di_rate(2, 0.0);
  o.require(pt.qber == 0.0, "Q = 0 at p = 0");
  o.require(std::abs(pt.rate_raw - 2.0 * (1.0 - pt.p_guess)) <= 1e-15, "rate = 2(1 - P_g) at Q = 0");
  o.require(std::abs(pt.rate - 1.0) <= 2e-4, "n=2 rate within 2e-4 of 1");
  double worst = 0.0;
  for (int n : {2, 3, 4}) {
    for (int k = 0; k <= 20; ++k) {
      const double p = k / 20.0;
      worst = std::max(worst, std::abs(qber(apply_depolarizing(ghz_state(n), p)) - depolarized_qber(p)));
    }
  }
  o.require(worst <= 1e-10, "QBER formula within 1e-10 of the state");
  o.detail << "n=2 rate " << format_number(pt.rate) << ", max QBER deviation " << num(worst);
}

void curve_properties(Outcome& o) {
  const unsigned workers = std::max(1U, std::thread::hardware_concurrency());
  RateOptions opts;
  opts.parity = true;
  const std::vector<std::pair<int, std::vector<double>>> curves{
      {2, {0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07}},
      {3, {0.0, 0.01, 0.02, 0.03, 0.04, 0.05}},
      {4, {0.01, 0.02, 0.03, 0.04}},
  };
  for (const auto& [n, grid] : curves) {
    const auto pts = rate_curve(n, grid, opts, workers);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      o.require(pts[i].error.empty(), "n=" + std::to_string(n) + " point failed: " + pts[i].error);
      if (i > 0) {
        o.require(pts[i].rate <= pts[i - 1].rate + 1e-9,
                  "n=" + std::to_string(n) + " rate non-increasing at p=" + num(grid[i]));
      }
    }
    o.detail << "n=" << n << " level " << npa::to_string(pts.front().level) << " rates";
    for (const auto& p : pts) o.detail << ' ' << num(p.rate);
    o.detail << "; ";
    if (n != 3) continue;
    for (const auto& p : pts) {
      if (p.p < 0.025 || !p.parity_rate) continue;
      o.require(p.rate > *p.parity_rate, "n=3 B(3) rate above Parity-CHSH at p=" + num(p.p));
      o.detail << "p=" << num(p.p) << " B(3) " << num(p.rate) << " vs parity " << num(*p.parity_rate) << " ("
               << num(100.0 * (p.rate / *p.parity_rate - 1.0)) << "%); ";
    }
  }
}

void determinism(Outcome& o) {
  const auto first = testing::run_cli("verify");
  const auto second = testing::run_cli("verify");
  o.require(!first.out.empty(), "verify produced output");
  o.require(first.out == second.out, "byte-identical verify output");
  o.require(first.exit_code == second.exit_code, "same exit code");
  o.detail << first.out.size() << " bytes, exit code " << first.exit_code;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"classical bounds", classical_bounds},
      {"optimal GHZ table", table_one},
      {"closed form vs dense operator", dual_path},
      {"stabilizer identity", stabilizer},
      {"symbolic reductions", reductions},
      {"relaxation bounds", tsirelson},
      {"guessing probability", guessing},
      {"key-rate endpoints", key_rate_endpoints},
      {"key-rate curve properties", curve_properties},
      {"verify determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what();
    }
    failed += o.ok ? 0 : 1;
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first << " ("
              << o.detail.str() << ") [" << num(seconds_since(t0)) << " s]" << std::endl;
  }
  std::cout << "acceptance: " << (criteria.size() - static_cast<std::size_t>(failed)) << " passed, " << failed
            << " failed" << std::endl;
  return failed == 0 ? 0 : 1;
}
