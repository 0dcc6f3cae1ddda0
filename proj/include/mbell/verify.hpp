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
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "mbell/io.hpp"
#include "mbell/keyrate.hpp"
#include "mbell/lhv.hpp"
#include "mbell/npa.hpp"
#include "mbell/polynomial.hpp"
#include "mbell/quantum.hpp"
#include "mbell/scenario.hpp"
#include "mbell/sdp.hpp"

namespace mbell {

struct VerifySummary {
  int passed = 0;
  int failed = 0;
  [[nodiscard]] bool ok() const { return failed == 0; }
};

namespace detail {

class Checker {
 public:
  explicit Checker(std::ostream& os) : os_(os) {}

  void group(const std::string& name) { group_ = name; }

  // `fn` returns a short detail string and sets `ok`.
  void check(const std::string& what, const std::function<std::string(bool&)>& fn) {
    bool ok = false;
    std::string detail;
    try {
      detail = fn(ok);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("threw: ") + e.what();
    }
    os_ << (ok ? "PASS " : "FAIL ") << group_ << ": " << what;
    if (!detail.empty()) os_ << " (" << detail << ")";
    os_ << '\n';
    ok ? ++summary_.passed : ++summary_.failed;
  }

  [[nodiscard]] const VerifySummary& summary() const { return summary_; }

 private:
  std::ostream& os_;
  std::string group_;
  VerifySummary summary_;
};

inline double binomial_double(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// Runs the invariant suite and prints one PASS/FAIL line per check followed
/// by a summary line. Output is a function of the code only.
inline VerifySummary run_verify(std::ostream& os) {
  detail::Checker c(os);
  const double pi = std::numbers::pi;

  c.group("scenario");
  c.check("subset counts are C(n-1, l) for n = 2..10", [](bool& ok) {
    ok = true;
    for (int n = 2; n <= 10; ++n) {
      for (int l = 1; l <= n - 1; ++l) {
        ok = ok && static_cast<double>(enumerate_subsets(n, l).size()) == detail::binomial_double(n - 1, l);
      }
    }
    return std::string();
  });

  c.group("polynomial");
  c.check("reduce_party(B(n), n) == B(n-1) for n = 3..8", [](bool& ok) {
    ok = true;
    for (int n = 3; n <= 8; ++n) ok = ok && reduce_party(build_bell(n), n) == build_bell(n - 1);
    return std::string();
  });
  c.check("B(n) with B1 -> B0 for Bobs j >= 3 equals parity_chsh(n) for n = 3..6", [](bool& ok) {
    ok = true;
    for (int n = 3; n <= 6; ++n) {
      BellPolynomial p = build_bell(n);
      for (int j = 3; j <= n; ++j) p = substitute_input(p, j, 1, 0);
      ok = ok && p == parity_chsh(n);
    }
    return std::string();
  });
  c.check("B(n) is invariant under Bob permutations for n = 3..5", [](bool& ok) {
    ok = true;
    for (int n = 3; n <= 5; ++n) {
      std::vector<int> perm(static_cast<std::size_t>(n - 1));
      for (int j = 0; j < n - 1; ++j) perm[static_cast<std::size_t>(j)] = j + 2;
      const BellPolynomial b = build_bell(n);
      do {
        ok = ok && permute_bobs(b, perm) == b;
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return std::string();
  });
  c.check("JSON round trip of B(4)", [](bool& ok) {
    ok = polynomial_from_json(to_json(build_bell(4))) == build_bell(4);
    return std::string();
  });

  c.group("lhv");
  c.check("exhaustive bounds are [-(2^(n-1)-1), 1] for n = 2..8", [](bool& ok) {
    ok = true;
    for (int n = 2; n <= 8; ++n) {
      const BoundsReport r = classical_bounds_exhaustive(n);
      ok = ok && r.max_value == Rational(1) && r.min_value == Rational(-((std::int64_t{1} << (n - 1)) - 1));
    }
    return std::string();
  });
  c.check("reduced bounds agree for n = 2..20", [](bool& ok) {
    ok = true;
    for (int n = 2; n <= 20; ++n) {
      const BoundsReport r = classical_bounds_reduced(n);
      ok = ok && r.max_value == Rational(1) && r.min_value == Rational(-((std::int64_t{1} << (n - 1)) - 1));
    }
    return std::string();
  });

  c.group("quantum");
  c.check("stabilizer expansion equals the GHZ projector for n = 2..8", [](bool& ok) {
    double worst = 0.0;
    for (int n = 2; n <= 8; ++n) {
      worst = std::max(worst, (stabilizer_expansion(n).matrix() - ghz_state(n).matrix()).cwiseAbs().maxCoeff());
    }
    ok = worst <= 1e-13;
    return std::string();
  });
  c.check("closed form equals dense expectation for n = 2..7 at 25 angles", [pi](bool& ok) {
    double worst = 0.0;
    for (int n = 2; n <= 7; ++n) {
      const BellPolynomial b = build_bell(n);
      const DenseState ghz = ghz_state(n);
      for (int k = 0; k < 25; ++k) {
        const double t = 0.05 + (pi - 0.1) * k / 24.0;
        worst = std::max(worst, std::abs(expectation(ghz, bell_operator(b, honest_measurements(n, t))) -
                                         ghz_bell_value_closed(n, t)));
      }
    }
    ok = worst <= 1e-9;
    return std::string();
  });
  c.check("optimal angles reproduce 1.5 for n = 3", [](bool& ok) {
    const ThetaOptimum o = optimize_theta(3);
    ok = std::abs(o.value - 1.5) <= 1e-9 && std::abs(o.theta - 2.0 * std::numbers::pi / 3.0) <= 1e-6;
    return "g=" + format_number(o.value) + " theta=" + format_number(o.theta);
  });
  c.check("azimuth shift of the Bobs compensated on A1 leaves the GHZ value unchanged", [](bool& ok) {
    ok = true;
    for (int n = 3; n <= 4; ++n) {
      const ThetaOptimum o = optimize_theta(n);
      const BellPolynomial b = build_bell(n);
      for (double phi : {0.0, 0.3, 1.1}) {
        MeasurementSpec spec = honest_measurements(n, o.theta);
        spec.alice.second.phi = -(n - 1) * phi;
        for (auto& bob : spec.bobs) {
          bob.first.phi += phi;
          bob.second.phi += phi;
        }
        ok = ok && std::abs(expectation(ghz_state(n), bell_operator(b, spec)) - o.value) <= 1e-9;
      }
    }
    return std::string();
  });
  c.check("depolarized GHZ QBER is p(1 - p/2) for n = 2..4", [](bool& ok) {
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n) {
      for (double p : {0.0, 0.05, 0.1}) {
        worst = std::max(worst, std::abs(qber(apply_depolarizing(ghz_state(n), p)) - depolarized_qber(p)));
      }
    }
    ok = worst <= 1e-10;
    return std::string();
  });
  c.check("depolarizing different qubits commutes", [](bool& ok) {
    const DenseState s = ghz_state(3);
    const DenseState ab = apply_depolarizing_qubit(apply_depolarizing_qubit(s, 1, 0.3), 2, 0.2);
    const DenseState ba = apply_depolarizing_qubit(apply_depolarizing_qubit(s, 2, 0.2), 1, 0.3);
    ok = (ab.matrix() - ba.matrix()).cwiseAbs().maxCoeff() <= 1e-14;
    return std::string();
  });

  c.group("sdp");
  c.check("max X01 over 2x2 correlation matrices is 1", [](bool& ok) {
    sdp::SdpProblem p = sdp::SdpProblem::single_block(2);
    p.objective.add(0, 0, 1, 0.5);
    for (int i = 0; i < 2; ++i) {
      sdp::LinearConstraint e;
      e.matrix.add(0, i, i, 1.0);
      e.value = 1.0;
      p.equalities.push_back(e);
    }
    const sdp::Solution s = sdp::solve(p);
    ok = s.status == sdp::Status::kOptimal && std::abs(s.value - 1.0) <= 1e-6;
    return std::string(sdp::to_string(s.status));
  });
  c.check("negative diagonal target is reported infeasible", [](bool& ok) {
    sdp::SdpProblem p = sdp::SdpProblem::single_block(1);
    p.objective.add(0, 0, 0, 1.0);
    sdp::LinearConstraint e;
    e.matrix.add(0, 0, 0, 1.0);
    e.value = -1.0;
    p.equalities.push_back(e);
    const sdp::Solution s = sdp::solve(p);
    ok = s.status == sdp::Status::kInfeasible;
    return std::string(sdp::to_string(s.status));
  });

  c.group("npa");
  c.check("level 1 CHSH bound is sqrt 2", [](bool& ok) {
    const double v = npa::tsirelson_bound(2, npa::Level::kOne);
    ok = std::abs(v - std::numbers::sqrt2) <= 1e-6;
    return "value=" + format_number(v, 8);
  });
  c.check("level 2 bound for n = 3 is 1.5", [](bool& ok) {
    const double v = npa::tsirelson_bound(3, npa::Level::kTwo);
    ok = std::abs(v - 1.5) <= 1e-3;
    return "value=" + format_number(v, 8);
  });
  c.check("level 2 never exceeds level 1 for n = 2, 3", [](bool& ok) {
    ok = true;
    for (int n = 2; n <= 3; ++n) {
      ok = ok && npa::tsirelson_bound(n, npa::Level::kTwo) <= npa::tsirelson_bound(n, npa::Level::kOne) + 1e-7;
    }
    return std::string();
  });
  c.check("CHSH guessing bound follows 1/2 + 1/2 sqrt(2 - g^2)", [](bool& ok) {
    double worst = 0.0;
    for (double g : {1.1, 1.2, 1.3, 1.4}) {
      const double pg = npa::guessing_probability(2, g, npa::Level::kTwo);
      worst = std::max(worst, std::abs(pg - (0.5 + 0.5 * std::sqrt(2.0 - g * g))));
    }
    ok = worst <= 5e-3;
    return std::string();
  });

  c.group("keyrate");
  c.check("noiseless CHSH baseline is 1", [](bool& ok) {
    ok = chsh_baseline(0.0, 2, false) == 1.0;
    return std::string();
  });
  c.check("noiseless two-party rate is 1", [](bool& ok) {
    const RatePoint r = di_rate(2, 0.0);
    ok = std::abs(r.rate - 1.0) <= 2e-4;
    return "rate=" + format_number(r.rate, 6);
  });
  c.check("two-party rate is non-increasing on a 10-point grid up to p = 0.09", [](bool& ok) {
    const std::vector<RatePoint> curve = rate_curve(2, noise_grid(0.09, 10));
    ok = true;
    for (std::size_t i = 1; i < curve.size(); ++i) {
      ok = ok && curve[i].error.empty() && curve[i].rate_raw <= curve[i - 1].rate_raw + 1e-9;
    }
    return std::string();
  });

  const VerifySummary& s = c.summary();
  os << "verify: " << s.passed << " passed, " << s.failed << " failed\n";
  return s;
}

}  // namespace mbell
