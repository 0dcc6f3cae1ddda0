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

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "mbell/keyrate.hpp"
#include "mbell/lhv.hpp"
#include "mbell/polynomial.hpp"
#include "mbell/quantum.hpp"

namespace mbell {

/// Fixed-point text with `digits` significant digits, trailing zeros removed.
/// Never uses exponent notation and does not depend on the locale.
inline std::string format_number(double v, int digits = 10) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  const int exponent = static_cast<int>(std::floor(std::log10(std::abs(v))));
  const int decimals = std::clamp(digits - 1 - exponent, 0, 15);
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) return "nan";
  std::string s(buf, end);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

// JSON ------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const Rational& r) {
  if (r.den() == 1) return r.num();
  return r.str();
}

/// {"parties": n, "terms": [{"parties": [...], "observables": [...], "num", "den"}]}
inline nlohmann::ordered_json to_json(const BellPolynomial& poly) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& [mono, c] : poly.terms()) {
    nlohmann::ordered_json parties = nlohmann::ordered_json::array();
    nlohmann::ordered_json observables = nlohmann::ordered_json::array();
    for (const auto& f : mono.factors()) {
      parties.push_back(f.party);
      observables.push_back(f.input);
    }
    terms.push_back({{"parties", parties}, {"observables", observables}, {"num", c.num()}, {"den", c.den()}});
  }
  return {{"parties", poly.party_count()}, {"terms", terms}};
}

inline BellPolynomial polynomial_from_json(const nlohmann::ordered_json& j) {
  BellPolynomial poly(j.at("parties").get<int>());
  for (const auto& t : j.at("terms")) {
    const auto parties = t.at("parties").get<std::vector<int>>();
    const auto inputs = t.at("observables").get<std::vector<int>>();
    if (parties.size() != inputs.size()) throw std::invalid_argument("polynomial_from_json: length mismatch");
    std::vector<Factor> fs;
    for (std::size_t i = 0; i < parties.size(); ++i) fs.push_back({parties[i], inputs[i]});
    poly.add(Monomial(fs), Rational(t.at("num").get<std::int64_t>(), t.at("den").get<std::int64_t>()));
  }
  return poly;
}

inline nlohmann::ordered_json to_json(const DeterministicStrategy& s) {
  nlohmann::ordered_json bobs = nlohmann::ordered_json::array();
  for (const auto& b : s.bobs) bobs.push_back({b.v0, b.v1});
  return {{"alice", {s.alice.v0, s.alice.v1}}, {"bobs", bobs}};
}

inline nlohmann::ordered_json to_json(const BoundsReport& r, const std::string& mode) {
  return {{"n", r.n},
          {"mode", mode},
          {"max", to_json(r.max_value)},
          {"min", to_json(r.min_value)},
          {"argmax", to_json(r.argmax)},
          {"argmin", to_json(r.argmin)},
          {"strategies_checked", r.strategies_checked}};
}

// CSV -------------------------------------------------------------------------

/// n, g_ghz, ratio_to_prev, theta for n = 2..nmax. The ratio is empty for n = 2.
inline void write_table1(std::ostream& os, int nmax) {
  if (nmax < 2) throw std::invalid_argument("table1: nmax must be >= 2");
  os << "n,g_ghz,ratio_to_prev,theta\n";
  double prev = 0.0;
  for (int n = 2; n <= nmax; ++n) {
    const ThetaOptimum opt = optimize_theta(n);
    os << n << ',' << format_number(opt.value) << ',' << (n == 2 ? "" : format_number(opt.value / prev)) << ','
       << format_number(opt.theta) << '\n';
    prev = opt.value;
  }
}

inline void write_rate_csv(std::ostream& os, const std::vector<RatePoint>& points, bool parity) {
  os << "n,p,g_obs,qber,p_guess,rate_raw,rate,chsh_rate,chsh_bottleneck_rate," << (parity ? "parity_rate," : "")
     << "level\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& pt : points) {
    const bool ok = pt.error.empty();
    os << pt.n << ',' << format_number(pt.p) << ',';
    if (ok) {
      os << format_number(pt.g_obs) << ',' << format_number(pt.qber) << ',' << format_number(pt.p_guess) << ','
         << format_number(pt.rate_raw) << ',' << format_number(pt.rate) << ',' << format_number(pt.chsh_rate) << ','
         << format_number(pt.chsh_bottleneck_rate) << ',';
    } else {
      os << ",,,,,,,";
    }
    if (parity) os << (ok ? opt(pt.parity_rate) : std::string()) << ',';
    os << npa::to_string(pt.level) << '\n';
  }
}

}  // namespace mbell
