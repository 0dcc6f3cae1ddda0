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

#include <Eigen/Dense>

#include <bit>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mbell/polynomial.hpp"
#include "mbell/scenario.hpp"

namespace mbell {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

/// Qubit observable cos(phi)sin(theta) X + sin(phi)sin(theta) Y + cos(theta) Z.
struct QubitObservable {
  double theta = 0.0;
  double phi = 0.0;

  [[nodiscard]] Eigen::Matrix2cd matrix() const {
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    Eigen::Matrix2cd m;
    m << Complex(ct, 0.0), Complex(std::cos(phi) * st, -std::sin(phi) * st),
        Complex(std::cos(phi) * st, std::sin(phi) * st), Complex(-ct, 0.0);
    return m;
  }

  static QubitObservable pauli_z() { return {0.0, 0.0}; }
  static QubitObservable pauli_x() { return {std::numbers::pi / 2, 0.0}; }
};

/// Observables for inputs 0 and 1 of every party.
struct MeasurementSpec {
  std::pair<QubitObservable, QubitObservable> alice;
  std::vector<std::pair<QubitObservable, QubitObservable>> bobs;  // bobs[j - 2] for Bob j

  [[nodiscard]] int party_count() const { return 1 + static_cast<int>(bobs.size()); }

  [[nodiscard]] const QubitObservable& observable(int party, int input) const {
    if (party < 1 || party > party_count()) {
      throw std::out_of_range("MeasurementSpec: no party " + std::to_string(party));
    }
    const auto& p = party == 1 ? alice : bobs[static_cast<std::size_t>(party - 2)];
    return input == 0 ? p.first : p.second;
  }
};

/// A0 = Z, A1 = X and for every Bob B0 = sin(t) X + cos(t) Z,
/// B1 = sin(t) X - cos(t) Z.
inline MeasurementSpec honest_measurements(int n, double theta) {
  require_party_count(n, 64);
  MeasurementSpec spec;
  spec.alice = {QubitObservable::pauli_z(), QubitObservable::pauli_x()};
  for (int j = 2; j <= n; ++j) {
    spec.bobs.push_back({QubitObservable{theta, 0.0}, QubitObservable{std::numbers::pi - theta, 0.0}});
  }
  return spec;
}

/// Density matrix of n qubits. Qubit 1 (Alice) is the most significant bit of
/// the basis index.
class DenseState {
 public:
  DenseState(int qubits, Operator rho) : qubits_(qubits), rho_(std::move(rho)) {
    if (qubits < 1 || qubits > kMaxParties) throw std::invalid_argument("DenseState: qubit count out of range");
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    if (rho_.rows() != dim || rho_.cols() != dim) throw std::invalid_argument("DenseState: dimension mismatch");
  }

  [[nodiscard]] int qubits() const { return qubits_; }
  [[nodiscard]] Eigen::Index dim() const { return rho_.rows(); }
  [[nodiscard]] const Operator& matrix() const { return rho_; }

  /// Hermitian and unit trace to 1e-12, smallest eigenvalue above -1e-10.
  [[nodiscard]] bool is_valid() const {
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) return false;
    if (std::abs(rho_.trace() - Complex(1.0, 0.0)) > 1e-12) return false;
    Eigen::SelfAdjointEigenSolver<Operator> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-10;
  }

 private:
  int qubits_;
  Operator rho_;
};

inline DenseState ghz_state(int n) {
  if (n < 1 || n > kMaxParties) throw std::invalid_argument("ghz_state: n must be in [1, 12]");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Operator rho = Operator::Zero(dim, dim);
  rho(0, 0) = rho(0, dim - 1) = rho(dim - 1, 0) = rho(dim - 1, dim - 1) = 0.5;
  return {n, std::move(rho)};
}

inline DenseState maximally_mixed(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  return {n, Operator::Identity(dim, dim) / static_cast<double>(dim)};
}

/// Tensor product of pure qubit states with Bloch angles (theta, phi).
inline DenseState product_state(const std::vector<std::pair<double, double>>& bloch) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
  for (const auto& [theta, phi] : bloch) {
    Eigen::Vector2cd q(std::cos(theta / 2), std::polar(std::sin(theta / 2), phi));
    Eigen::VectorXcd next(psi.size() * 2);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      next(2 * i) = psi(i) * q(0);
      next(2 * i + 1) = psi(i) * q(1);
    }
    psi = std::move(next);
  }
  return {static_cast<int>(bloch.size()), psi * psi.adjoint()};
}

/// Normalized sum over the 2^n GHZ stabilizers
/// (X^s1)^{(x)n} (Z^s2 (x) Z^(s2+s3) (x) ... (x) Z^(s_{n-1}+s_n) (x) Z^sn).
///
/// Each term is a Pauli string with x-mask and z-mask; it maps |c> to
/// (-1)^{|c & z|} |c ^ x>, so the sum is accumulated entrywise.
inline DenseState stabilizer_expansion(int n) {
  if (n < 2 || n > 10) throw std::invalid_argument("stabilizer_expansion: n must be in [2, 10]");
  const std::uint64_t dim = std::uint64_t{1} << n;
  auto qubit_bit = [n](int qubit) { return std::uint64_t{1} << (n - qubit); };
  Operator rho = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t s = 0; s < dim; ++s) {
    // s_k is bit (k-1) of s.
    auto sbit = [s](int k) { return static_cast<int>((s >> (k - 1)) & 1U); };
    const std::uint64_t xmask = sbit(1) != 0 ? dim - 1 : 0;
    std::uint64_t zmask = 0;
    for (int q = 1; q <= n; ++q) {
      int exponent = 0;
      if (q == 1) {
        exponent = sbit(2);
      } else if (q == n) {
        exponent = sbit(n);
      } else {
        exponent = sbit(q) ^ sbit(q + 1);
      }
      if (exponent != 0) zmask |= qubit_bit(q);
    }
    for (std::uint64_t c = 0; c < dim; ++c) {
      const double sign = (std::popcount(c & zmask) & 1) != 0 ? -1.0 : 1.0;
      rho(static_cast<Eigen::Index>(c ^ xmask), static_cast<Eigen::Index>(c)) += sign;
    }
  }
  rho /= static_cast<double>(dim);
  return {n, std::move(rho)};
}

/// Sum over terms of coefficient times the tensor product of the chosen
/// observables, identity on absent parties.
inline Operator bell_operator(const BellPolynomial& poly, const MeasurementSpec& spec) {
  const int n = poly.party_count();
  if (spec.party_count() != n) {
    throw std::invalid_argument("bell_operator: polynomial has " + std::to_string(n) +
                                " parties, measurement spec has " + std::to_string(spec.party_count()));
  }
  if (n > kMaxParties) throw std::invalid_argument("bell_operator: too many parties");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Operator total = Operator::Zero(dim, dim);
  std::vector<Eigen::Matrix2cd> local(static_cast<std::size_t>(n));
  for (const auto& [mono, coeff] : poly.terms()) {
    for (int p = 1; p <= n; ++p) local[static_cast<std::size_t>(p - 1)] = Eigen::Matrix2cd::Identity();
    for (const auto& f : mono.factors()) {
      local[static_cast<std::size_t>(f.party - 1)] = spec.observable(f.party, f.input).matrix();
    }
    Operator term = Operator::Constant(1, 1, Complex(coeff.to_double(), 0.0));
    for (const auto& m : local) {
      Operator next(term.rows() * 2, term.cols() * 2);
      for (Eigen::Index r = 0; r < 2; ++r) {
        for (Eigen::Index c = 0; c < 2; ++c) {
          // Row-major kron: party order matches the basis bit order.
          for (Eigen::Index i = 0; i < term.rows(); ++i) {
            for (Eigen::Index k = 0; k < term.cols(); ++k) next(2 * i + r, 2 * k + c) = term(i, k) * m(r, c);
          }
        }
      }
      term = std::move(next);
    }
    total += term;
  }
  return total;
}

/// Re tr(operator * state). Throws if the imaginary part exceeds 1e-10.
inline double expectation(const DenseState& state, const Operator& op) {
  if (op.rows() != state.dim() || op.cols() != state.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  const Complex value = op.cwiseProduct(state.matrix().transpose()).sum();
  if (std::abs(value.imag()) > 1e-10) {
    throw std::domain_error("expectation: non-real value, operator is not Hermitian");
  }
  return value.real();
}

/// Local depolarizing channel rho -> (1-p) rho + (p/2) I on one qubit.
inline DenseState apply_depolarizing_qubit(const DenseState& state, int qubit, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("apply_depolarizing: p outside [0, 1]");
  if (qubit < 1 || qubit > state.qubits()) throw std::out_of_range("apply_depolarizing: no such qubit");
  const Operator& rho = state.matrix();
  const Eigen::Index dim = state.dim();
  const Eigen::Index bit = Eigen::Index{1} << (state.qubits() - qubit);
  Operator out = (1.0 - p) * rho;
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      if (((a ^ b) & bit) != 0) continue;
      const Eigen::Index a0 = a & ~bit;
      const Eigen::Index b0 = b & ~bit;
      out(a, b) += 0.5 * p * (rho(a0, b0) + rho(a0 | bit, b0 | bit));
    }
  }
  return {state.qubits(), std::move(out)};
}

/// Applies the depolarizing channel independently to every qubit.
inline DenseState apply_depolarizing(const DenseState& state, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("apply_depolarizing: p outside [0, 1]");
  DenseState out = state;
  for (int q = 1; q <= state.qubits(); ++q) out = apply_depolarizing_qubit(out, q, p);
  return out;
}

/// Probability that Z outcomes of Alice and Bob j differ.
inline double pairwise_error_rate(const DenseState& state, int bob) {
  if (bob < 2 || bob > state.qubits()) throw std::out_of_range("pairwise_error_rate: no such Bob");
  const int n = state.qubits();
  const Eigen::Index alice_bit = Eigen::Index{1} << (n - 1);
  const Eigen::Index bob_bit = Eigen::Index{1} << (n - bob);
  double q = 0.0;
  for (Eigen::Index k = 0; k < state.dim(); ++k) {
    if (((k & alice_bit) != 0) != ((k & bob_bit) != 0)) q += state.matrix()(k, k).real();
  }
  return q;
}

/// Worst pairwise Z disagreement between Alice and any Bob.
inline double qber(const DenseState& state) {
  if (state.qubits() < 2) throw std::invalid_argument("qber: need at least two qubits");
  double worst = 0.0;
  for (int j = 2; j <= state.qubits(); ++j) worst = std::max(worst, pairwise_error_rate(state, j));
  return worst;
}

// Closed-form GHZ value under honest_measurements(n, theta) ----------------

inline constexpr double kThetaGuard = 1e-8;
// Below this distance from 0 or pi, 1 -/+ cos(theta) loses too many digits for
// the cot(theta/2) form and the continuous limit is used instead.
inline constexpr double kEvenBranchGuard = 1e-6;

/// 1 - (1+cos t)^(n-1) + sin^(n-1) t for odd n. For even n the last term is
/// cot(t/2) sin^n t / (1 + cos t), evaluated with cot(t/2) = sin t/(1 - cos t)
/// and replaced by its continuous limit within 1e-6 of 0 or pi.
inline double ghz_bell_value_closed(int n, double theta) {
  if (n < 2) throw std::invalid_argument("ghz_bell_value_closed: n must be >= 2");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw std::domain_error("ghz_bell_value_closed: theta outside [0, pi]");
  }
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double head = 1.0 - std::pow(1.0 + c, n - 1);
  if (n % 2 == 1) return head + std::pow(s, n - 1);
  if (theta <= kEvenBranchGuard || theta >= std::numbers::pi - kEvenBranchGuard) {
    return head + std::pow(s, n - 1);
  }
  const double cot_half = s / (1.0 - c);
  return head + cot_half * std::pow(s, n) / (1.0 + c);
}

/// d/dtheta of ghz_bell_value_closed.
inline double ghz_bell_value_derivative(int n, double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return (n - 1) * (s * std::pow(1.0 + c, n - 2) + c * std::pow(s, n - 2));
}

struct ThetaOptimum {
  double theta = 0.0;
  double value = 0.0;
};

/// Maximizes the closed-form GHZ value over theta in (0, pi).
///
/// A 1000-point grid brackets the maximum, Brent's golden-section/parabolic
/// search refines it inside the bracket, and bisection on the analytic
/// derivative polishes theta to 1e-12.
inline ThetaOptimum optimize_theta(int n) {
  if (n < 2) throw std::invalid_argument("optimize_theta: n must be >= 2");
  constexpr int kGrid = 1000;
  const double lo_end = kThetaGuard;
  const double hi_end = std::numbers::pi - kThetaGuard;
  const double step = (hi_end - lo_end) / (kGrid - 1);
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double v = ghz_bell_value_closed(n, lo_end + step * i);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double lo = lo_end + step * std::max(best - 1, 0);
  double hi = lo_end + step * std::min(best + 1, kGrid - 1);

  auto negated = [n](double t) { return -ghz_bell_value_closed(n, t); };
  const auto [brent_theta, brent_neg] =
      boost::math::tools::brent_find_minima(negated, lo, hi, std::numeric_limits<double>::digits / 2);
  ThetaOptimum result{brent_theta, -brent_neg};

  // Polish on g'(theta) = 0 when the bracket straddles a sign change.
  double dlo = ghz_bell_value_derivative(n, lo);
  const double dhi = ghz_bell_value_derivative(n, hi);
  if (dlo > 0.0 && dhi < 0.0) {
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      const double dm = ghz_bell_value_derivative(n, mid);
      if (dm > 0.0) {
        lo = mid;
        dlo = dm;
      } else {
        hi = mid;
      }
    }
    const double theta = 0.5 * (lo + hi);
    result = {theta, ghz_bell_value_closed(n, theta)};
  }
  return result;
}

}  // namespace mbell
