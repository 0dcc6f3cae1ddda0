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
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mbell/polynomial.hpp"
#include "mbell/sdp.hpp"

namespace mbell::npa {

/// Observable `input` of party `party` (1 = Alice).
struct Letter {
  int party = 1;
  int input = 0;
  friend constexpr auto operator<=>(const Letter&, const Letter&) = default;
};

/// Operator word in canonical form: letters grouped by ascending party with
/// the order inside each party kept, and adjacent equal letters cancelled
/// (every observable squares to the identity). Empty is the identity.
class MonomialWord {
 public:
  MonomialWord() = default;

  /// Canonicalizes an arbitrary product of letters.
  explicit MonomialWord(const std::vector<Letter>& product) {
    std::vector<Letter> sorted = product;
    // Letters of different parties commute; a stable sort keeps each party's
    // own order.
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Letter& a, const Letter& b) { return a.party < b.party; });
    for (const auto& l : sorted) {
      if (l.party < 1 || l.input < 0 || l.input > 1) throw std::invalid_argument("MonomialWord: bad letter");
      if (!letters_.empty() && letters_.back() == l) {
        letters_.pop_back();
      } else {
        letters_.push_back(l);
      }
    }
  }

  [[nodiscard]] const std::vector<Letter>& letters() const { return letters_; }
  [[nodiscard]] bool is_identity() const { return letters_.empty(); }
  [[nodiscard]] std::size_t length() const { return letters_.size(); }

  [[nodiscard]] MonomialWord adjoint() const {
    return MonomialWord(std::vector<Letter>(letters_.rbegin(), letters_.rend()));
  }

  friend MonomialWord operator*(const MonomialWord& a, const MonomialWord& b) {
    std::vector<Letter> product = a.letters_;
    product.insert(product.end(), b.letters_.begin(), b.letters_.end());
    return MonomialWord(product);
  }

  [[nodiscard]] std::string str() const {
    if (letters_.empty()) return "1";
    std::string out;
    for (const auto& l : letters_) {
      out += (l.party == 1 ? "A" : "B" + std::to_string(l.party) + "_") + std::to_string(l.input) + " ";
    }
    out.pop_back();
    return out;
  }

  friend auto operator<=>(const MonomialWord&, const MonomialWord&) = default;
  friend bool operator==(const MonomialWord&, const MonomialWord&) = default;

 private:
  std::vector<Letter> letters_;
};

/// Relaxation level: 1 = identity and single letters; 1+AB adds products of
/// two letters from different parties; 2 adds every two-letter word;
/// 1+AB+ABC adds to 1+AB the products of three letters from three different
/// parties.
enum class Level { kOne, kOnePlusAB, kTwo, kOnePlusABC };

inline std::string to_string(Level l) {
  switch (l) {
    case Level::kOne:
      return "1";
    case Level::kOnePlusAB:
      return "1+AB";
    case Level::kTwo:
      return "2";
    case Level::kOnePlusABC:
      return "1+AB+ABC";
  }
  return "?";
}

inline Level parse_level(const std::string& s) {
  if (s == "1") return Level::kOne;
  if (s == "1+AB" || s == "1+ab") return Level::kOnePlusAB;
  if (s == "2") return Level::kTwo;
  if (s == "1+AB+ABC" || s == "1+ab+abc") return Level::kOnePlusABC;
  throw std::invalid_argument("unsupported hierarchy level '" + s + "' (expected 1, 1+AB, 2 or 1+AB+ABC)");
}

/// Level 2 for up to three parties, 1+AB beyond.
inline Level default_level(int n) { return n <= 3 ? Level::kTwo : Level::kOnePlusAB; }

/// Level used for guessing-probability bounds. Without three-party words the
/// bound is loose for three parties and trivial (<A0> = 1 allowed at every
/// Bell value) for four.
inline Level default_guessing_level(int n) { return n <= 2 ? Level::kTwo : Level::kOnePlusABC; }

inline std::vector<MonomialWord> build_basis(int n, Level level) {
  if (n < 2) throw std::invalid_argument("build_basis: n must be >= 2");
  std::vector<Letter> letters;
  for (int p = 1; p <= n; ++p) {
    for (int x = 0; x < 2; ++x) letters.push_back({p, x});
  }
  std::vector<MonomialWord> basis{MonomialWord{}};
  auto push_unique = [&](const MonomialWord& w) {
    if (std::find(basis.begin(), basis.end(), w) == basis.end()) basis.push_back(w);
  };
  for (const auto& l : letters) push_unique(MonomialWord({l}));
  if (level == Level::kOne) return basis;
  const bool cross_only = level != Level::kTwo;
  for (const auto& a : letters) {
    for (const auto& b : letters) {
      if (cross_only && a.party >= b.party) continue;
      const MonomialWord w({a, b});
      if (w.length() == 2) push_unique(w);
    }
  }
  if (level != Level::kOnePlusABC) return basis;
  for (const auto& a : letters) {
    for (const auto& b : letters) {
      if (a.party >= b.party) continue;
      for (const auto& c : letters) {
        if (b.party >= c.party) continue;
        push_unique(MonomialWord({a, b, c}));
      }
    }
  }
  return basis;
}

/// Moment of a word under the real symmetric relaxation, which identifies
/// <w> with <w^dagger>.
inline MonomialWord moment_key(const MonomialWord& w) { return std::min(w, w.adjoint()); }

/// Sparse linear functional over moment ids.
using MomentVector = std::map<int, double>;

/// Symbolic structure of one moment-matrix relaxation.
///
/// Entry (i, j) of the moment matrix is <basis_i^dagger basis_j>. Moments that
/// a polynomial needs but the matrix does not contain are "auxiliary": each is
/// kept in its own 2x2 block [[1, m], [m, 1]], which bounds |m| <= 1.
struct MomentProblem {
  int n = 0;
  Level level = Level::kOne;
  std::vector<MonomialWord> basis;
  std::vector<MonomialWord> moments;            // moment id -> canonical key
  std::map<MonomialWord, int> moment_ids;       // inverse of `moments`
  std::vector<std::vector<int>> index;          // (i, j) -> moment id
  std::vector<int> auxiliary;                   // moment ids outside the matrix
  MomentVector objective;
  MomentVector bell_constraint;                 // <.> >= bell_target when non-empty
  double bell_target = 0.0;
  int normalization = 0;                        // id of the identity moment

  [[nodiscard]] int moment_id(const MonomialWord& w) const {
    auto it = moment_ids.find(moment_key(w));
    return it == moment_ids.end() ? -1 : it->second;
  }

  /// Maps a polynomial to moment ids, adding auxiliary moments as needed.
  MomentVector linear_form(const BellPolynomial& poly) {
    if (poly.party_count() != n) throw std::invalid_argument("MomentProblem: party count mismatch");
    MomentVector out;
    for (const auto& [mono, coeff] : poly.terms()) {
      std::vector<Letter> letters;
      for (const auto& f : mono.factors()) letters.push_back({f.party, f.input});
      const MonomialWord key = moment_key(MonomialWord(letters));
      int id = -1;
      if (auto it = moment_ids.find(key); it != moment_ids.end()) {
        id = it->second;
      } else {
        id = static_cast<int>(moments.size());
        moments.push_back(key);
        moment_ids.emplace(key, id);
        auxiliary.push_back(id);
      }
      out[id] += coeff.to_double();
    }
    return out;
  }
};

inline MomentProblem build_moment_structure(int n, Level level) {
  MomentProblem mp;
  mp.n = n;
  mp.level = level;
  mp.basis = build_basis(n, level);
  const std::size_t m = mp.basis.size();
  mp.index.assign(m, std::vector<int>(m, -1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const MonomialWord key = moment_key(mp.basis[i].adjoint() * mp.basis[j]);
      auto [it, inserted] = mp.moment_ids.try_emplace(key, static_cast<int>(mp.moments.size()));
      if (inserted) mp.moments.push_back(key);
      mp.index[i][j] = mp.index[j][i] = it->second;
    }
  }
  mp.normalization = mp.moment_ids.at(MonomialWord{});
  return mp;
}

/// max <objective> over the relaxation, optionally with <constraint> >= target.
inline MomentProblem build_moment_problem(int n, Level level, const BellPolynomial& objective,
                                          const std::optional<std::pair<BellPolynomial, double>>& constraint = {}) {
  MomentProblem mp = build_moment_structure(n, level);
  mp.objective = mp.linear_form(objective);
  if (constraint) {
    mp.bell_constraint = mp.linear_form(constraint->first);
    mp.bell_target = constraint->second;
  }
  return mp;
}

/// Compiles the moment problem into standard form. The moments are the dual
/// multipliers y (one per non-identity moment id, in id order) and the moment
/// matrix is the dual slack of block 0:
///
///   max c.y  s.t.  F0 + sum_k y_k F_k >= 0
///
/// is the dual of  max <-F0, X>  s.t.  <F_k, X> = -c_k,  X >= 0,
/// so the relaxation's value is minus the standard-form optimum. Auxiliary
/// moments get a 2x2 block each and the Bell constraint a 1x1 diagonal block.
inline sdp::StandardForm to_sdp(const MomentProblem& mp) {
  sdp::StandardForm sf;
  const int m = static_cast<int>(mp.basis.size());
  sf.blocks.push_back({m, false});
  for (std::size_t k = 0; k < mp.auxiliary.size(); ++k) sf.blocks.push_back({2, false});
  const bool constrained = !mp.bell_constraint.empty();
  const int bell_block = static_cast<int>(sf.blocks.size());
  if (constrained) sf.blocks.push_back({1, true});

  std::vector<int> var(mp.moments.size(), -1);
  int count = 0;
  for (std::size_t id = 0; id < mp.moments.size(); ++id) {
    if (static_cast<int>(id) != mp.normalization) var[id] = count++;
  }
  sf.constraints.assign(static_cast<std::size_t>(count), {});
  sf.rhs.assign(static_cast<std::size_t>(count), 0.0);
  auto var_of = [&](int id) { return static_cast<std::size_t>(var[static_cast<std::size_t>(id)]); };

  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const int id = mp.index[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (id == mp.normalization) {
        sf.objective.add(0, i, j, -1.0);
      } else {
        sf.constraints[var_of(id)].add(0, i, j, 1.0);
      }
    }
  }
  for (std::size_t k = 0; k < mp.auxiliary.size(); ++k) {
    const int blk = static_cast<int>(k) + 1;
    sf.objective.add(blk, 0, 0, -1.0);
    sf.objective.add(blk, 1, 1, -1.0);
    sf.constraints[var_of(mp.auxiliary[k])].add(blk, 0, 1, 1.0);
  }
  if (constrained) {
    double f0 = -mp.bell_target;
    for (const auto& [id, c] : mp.bell_constraint) {
      if (id == mp.normalization) {
        f0 += c;
      } else {
        sf.constraints[var_of(id)].add(bell_block, 0, 0, c);
      }
    }
    sf.objective.add(bell_block, 0, 0, -f0);
  }
  for (const auto& [id, c] : mp.objective) {
    if (id != mp.normalization) sf.rhs[var_of(id)] = -c;
  }
  return sf;
}

/// Constant part of the objective (its identity coefficient).
inline double objective_constant(const MomentProblem& mp) {
  auto it = mp.objective.find(mp.normalization);
  return it == mp.objective.end() ? 0.0 : it->second;
}

/// Relaxation value read off a standard-form solution.
inline double relaxation_value(const MomentProblem& mp, const sdp::Solution& s) {
  return objective_constant(mp) - s.value;
}

/// Solver failure carrying the final residuals.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, sdp::Status status, sdp::Residuals residuals)
      : std::runtime_error(what + " (status " + sdp::to_string(status) + ", primal residual " +
                           std::to_string(residuals.primal) + ", dual residual " +
                           std::to_string(residuals.dual) + ", gap " + std::to_string(residuals.gap) + ")"),
        status_(status),
        residuals_(residuals) {}

  [[nodiscard]] sdp::Status status() const { return status_; }
  [[nodiscard]] const sdp::Residuals& residuals() const { return residuals_; }

 private:
  sdp::Status status_;
  sdp::Residuals residuals_;
};

/// The Bell constraint cannot be met by any point of the relaxation.
class ConstraintInfeasible : public SolverError {
 public:
  using SolverError::SolverError;
};

struct RelaxationResult {
  double value = 0.0;
  sdp::Solution solution;
};

/// Upper bound on the maximal quantum value of `bell`.
inline RelaxationResult tsirelson_bound(const BellPolynomial& bell, Level level, const sdp::Config& config = {}) {
  const MomentProblem mp = build_moment_problem(bell.party_count(), level, bell);
  RelaxationResult r;
  r.solution = sdp::solve(to_sdp(mp), config);
  if (r.solution.status != sdp::Status::kOptimal) {
    throw SolverError("tsirelson_bound: relaxation not solved", r.solution.status, r.solution.residuals);
  }
  r.value = relaxation_value(mp, r.solution);
  return r;
}

inline double tsirelson_bound(int n, Level level, const sdp::Config& config = {}) {
  return tsirelson_bound(build_bell(n), level, config).value;
}

/// Largest <A0> (or -<A0> when `sign` is -1) compatible with <bell> >= g_obs.
inline RelaxationResult max_alice_bias(const BellPolynomial& bell, double g_obs, Level level, int sign,
                                       const sdp::Config& config = {}) {
  const int n = bell.party_count();
  BellPolynomial a0(n);
  a0.add(Monomial({{1, 0}}), Rational(sign));
  const MomentProblem mp = build_moment_problem(n, level, a0, std::pair{bell, g_obs});
  RelaxationResult r;
  r.solution = sdp::solve(to_sdp(mp), config);
  r.value = relaxation_value(mp, r.solution);
  return r;
}

namespace detail {

/// Tolerance on a Bell value above the relaxation's maximum that is still
/// treated as rounding.
inline constexpr double kBoundarySlack = 1e-7;

/// Optimal, or stopped by rounding with residuals that are still small.
inline bool near_optimal(const sdp::Solution& s) {
  return s.status == sdp::Status::kOptimal ||
         (s.status == sdp::Status::kMaxIterations && s.residuals.primal <= 1e-7 && s.residuals.dual <= 1e-7 &&
          s.residuals.gap <= 1e-7);
}

inline sdp::Config tight(sdp::Config c) {
  c.primal_tolerance = std::min(c.primal_tolerance, 1e-10);
  c.dual_tolerance = std::min(c.dual_tolerance, 1e-10);
  c.gap_tolerance = std::min(c.gap_tolerance, 1e-10);
  return c;
}

/// Weak-duality bound on max sign*<A0> s.t. <bell> >= g:
///   min over lambda >= 0 of  max <sign*A0 + lambda*bell> - lambda*g.
/// Each inner problem has no Bell constraint and so stays strictly feasible,
/// which matters when g sits on the edge of the relaxation.
inline double lagrangian_bias(const BellPolynomial& bell, double g, Level level, int sign,
                              const sdp::Config& config) {
  const int n = bell.party_count();
  BellPolynomial a0(n);
  a0.add(Monomial({{1, 0}}), Rational(sign));
  MomentProblem mp = build_moment_problem(n, level, a0);
  const MomentVector base = mp.objective;
  const MomentVector bell_form = mp.linear_form(bell);
  const sdp::Config inner = tight(config);
  auto f = [&](double log_lambda) {
    const double lambda = std::pow(10.0, log_lambda);
    mp.objective = base;
    for (const auto& [id, c] : bell_form) mp.objective[id] += lambda * c;
    const sdp::Solution s = sdp::solve(to_sdp(mp), inner);
    // |<A0>| <= 1 always holds, so an unusable point falls back to it.
    return near_optimal(s) ? relaxation_value(mp, s) - lambda * g : 1.0;
  };
  const auto [arg, best] = boost::math::tools::brent_find_minima(f, -3.0, 8.0, 16);
  (void)arg;
  return std::min(1.0, best);
}

}  // namespace detail

/// Upper bound (1 + v)/2 on the probability of guessing A0, where v is the
/// larger of max <A0> and max -<A0> subject to <bell> >= g_obs. Clamped to
/// [1/2, 1].
///
/// When the constrained relaxation does not converge (typically because
/// g_obs is at the relaxation's maximum and the feasible set has no
/// interior) the bound is taken from the Lagrangian dual instead.
inline double guessing_probability(const BellPolynomial& bell, double g_obs, Level level,
                                   const sdp::Config& config = {}) {
  double v = -1.0;
  for (int sign : {+1, -1}) {
    const RelaxationResult r = max_alice_bias(bell, g_obs, level, sign, config);
    if (r.solution.status == sdp::Status::kOptimal) {
      v = std::max(v, r.value);
      continue;
    }
    const double ceiling = tsirelson_bound(bell, level, config).value;
    if (g_obs > ceiling + detail::kBoundarySlack) {
      throw ConstraintInfeasible("guessing_probability: Bell value " + std::to_string(g_obs) +
                                     " exceeds the relaxation's maximum " + std::to_string(ceiling),
                                 sdp::Status::kInfeasible, r.solution.residuals);
    }
    v = std::max(v, detail::lagrangian_bias(bell, std::min(g_obs, ceiling), level, sign, config));
  }
  return std::clamp(0.5 * (1.0 + v), 0.5, 1.0);
}

inline double guessing_probability(int n, double g_obs, Level level, const sdp::Config& config = {}) {
  return guessing_probability(build_bell(n), g_obs, level, config);
}

}  // namespace mbell::npa
