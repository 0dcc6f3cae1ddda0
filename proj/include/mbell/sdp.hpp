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

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mbell::sdp {

/// One stored entry of a block-diagonal symmetric matrix. Indices are 0-based
/// and row <= col; an off-diagonal entry stands for both (row, col) and
/// (col, row).
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Sparse symmetric block-diagonal matrix.
class SparseSymmetric {
 public:
  void add(int block, int row, int col, double value) {
    if (row > col) std::swap(row, col);
    if (row < 0 || block < 0) throw std::invalid_argument("SparseSymmetric: negative index");
    if (value != 0.0) entries_.push_back({block, row, col, value});
  }
  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
  [[nodiscard]] bool empty() const { return entries_.empty(); }

 private:
  std::vector<Entry> entries_;
};

struct BlockSpec {
  int size = 0;
  bool diagonal = false;  // diagonal blocks hold nonnegative scalars
};

/// maximize <objective, X> s.t. <constraints[i], X> = rhs[i], X >= 0 (PSD).
struct StandardForm {
  std::vector<BlockSpec> blocks;
  SparseSymmetric objective;
  std::vector<SparseSymmetric> constraints;
  std::vector<double> rhs;
};

struct LinearConstraint {
  SparseSymmetric matrix;
  double value = 0.0;
};

/// maximize <objective, X> over dense PSD blocks subject to equalities
/// <A, X> = b and inequalities <G, X> >= h.
struct SdpProblem {
  std::vector<int> blocks;
  SparseSymmetric objective;
  std::vector<LinearConstraint> equalities;
  std::vector<LinearConstraint> inequalities;

  static SdpProblem single_block(int dim) {
    SdpProblem p;
    p.blocks = {dim};
    return p;
  }
};

enum class Status { kOptimal, kMaxIterations, kInfeasible };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal:
      return "optimal";
    case Status::kMaxIterations:
      return "max-iterations";
    case Status::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

struct Config {
  double primal_tolerance = 1e-8;
  double dual_tolerance = 1e-8;
  double gap_tolerance = 1e-7;
  int max_iterations = 200;
  double step_fraction = 0.95;
  // Infeasible when the normalized primal residual stays above the threshold
  // without halving over `stall_window` iterations, or when the dual
  // objective diverges while it does.
  double stall_threshold = 1e-5;
  int stall_window = 20;
  bool keep_log = false;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;  // relative
};

struct IterationRecord {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double mu = 0.0;
};

struct Solution {
  Status status = Status::kMaxIterations;
  double value = 0.0;       // primal objective
  double dual_value = 0.0;  // dual objective b^T y
  std::vector<Eigen::MatrixXd> blocks;  // primal optimizer; diagonal blocks as diagonal matrices
  Eigen::VectorXd multipliers;
  Residuals residuals;
  int iterations = 0;
  std::vector<IterationRecord> log;

  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return blocks.front(); }
};

/// Slack variables for the inequalities go into one trailing diagonal block.
inline StandardForm to_standard_form(const SdpProblem& p) {
  StandardForm sf;
  for (int size : p.blocks) {
    if (size <= 0) throw std::invalid_argument("SdpProblem: block sizes must be positive");
    sf.blocks.push_back({size, false});
  }
  auto check = [&](const SparseSymmetric& m) {
    for (const auto& e : m.entries()) {
      if (e.block >= static_cast<int>(p.blocks.size()) || e.col >= p.blocks[static_cast<std::size_t>(e.block)]) {
        throw std::invalid_argument("SdpProblem: entry outside its block");
      }
    }
  };
  check(p.objective);
  sf.objective = p.objective;
  for (const auto& c : p.equalities) {
    check(c.matrix);
    sf.constraints.push_back(c.matrix);
    sf.rhs.push_back(c.value);
  }
  if (!p.inequalities.empty()) {
    const int slack_block = static_cast<int>(sf.blocks.size());
    sf.blocks.push_back({static_cast<int>(p.inequalities.size()), true});
    for (std::size_t k = 0; k < p.inequalities.size(); ++k) {
      check(p.inequalities[k].matrix);
      SparseSymmetric m = p.inequalities[k].matrix;
      m.add(slack_block, static_cast<int>(k), static_cast<int>(k), -1.0);
      sf.constraints.push_back(std::move(m));
      sf.rhs.push_back(p.inequalities[k].value);
    }
  }
  return sf;
}

namespace detail {

/// Block-diagonal iterate. Diagonal blocks store only their diagonal.
struct Block {
  bool diagonal = false;
  Eigen::MatrixXd dense;
  Eigen::VectorXd diag;
};
using Blocks = std::vector<Block>;

inline Blocks zeros(const std::vector<BlockSpec>& spec) {
  Blocks out;
  for (const auto& b : spec) {
    Block blk;
    blk.diagonal = b.diagonal;
    if (b.diagonal) {
      blk.diag = Eigen::VectorXd::Zero(b.size);
    } else {
      blk.dense = Eigen::MatrixXd::Zero(b.size, b.size);
    }
    out.push_back(std::move(blk));
  }
  return out;
}

inline Blocks identity(const std::vector<BlockSpec>& spec) {
  Blocks out = zeros(spec);
  for (auto& b : out) {
    if (b.diagonal) {
      b.diag.setOnes();
    } else {
      b.dense.setIdentity();
    }
  }
  return out;
}

inline double inner(const SparseSymmetric& a, const Blocks& x) {
  double total = 0.0;
  for (const auto& e : a.entries()) {
    const Block& b = x[static_cast<std::size_t>(e.block)];
    if (b.diagonal) {
      total += e.value * b.diag(e.row);
    } else {
      total += e.value * (e.row == e.col ? b.dense(e.row, e.col) : 2.0 * b.dense(e.row, e.col));
    }
  }
  return total;
}

inline void accumulate(Blocks& x, const SparseSymmetric& a, double scale) {
  for (const auto& e : a.entries()) {
    Block& b = x[static_cast<std::size_t>(e.block)];
    if (b.diagonal) {
      b.diag(e.row) += scale * e.value;
    } else {
      b.dense(e.row, e.col) += scale * e.value;
      if (e.row != e.col) b.dense(e.col, e.row) += scale * e.value;
    }
  }
}

inline double inner(const Blocks& x, const Blocks& z) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += x[i].diagonal ? x[i].diag.dot(z[i].diag) : x[i].dense.cwiseProduct(z[i].dense).sum();
  }
  return total;
}

inline double norm(const Blocks& x) { return std::sqrt(inner(x, x)); }

inline double norm(const SparseSymmetric& a, const std::vector<BlockSpec>& spec) {
  Blocks d = zeros(spec);
  accumulate(d, a, 1.0);
  return norm(d);
}

inline void axpy(Blocks& y, double alpha, const Blocks& x) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i].diagonal) {
      y[i].diag += alpha * x[i].diag;
    } else {
      y[i].dense += alpha * x[i].dense;
    }
  }
}

/// Nesterov-Todd scaling of one block: R with R^T Z R = R^{-1} X R^{-T} =
/// diag(lambda), and W = R R^T.
struct Scaling {
  bool diagonal = false;
  Eigen::MatrixXd r;
  Eigen::MatrixXd w;
  Eigen::VectorXd lambda;
  Eigen::VectorXd wd;  // diagonal blocks: W = sqrt(x/z), so R = sqrt(W)
};

inline Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error("sdp: iterate lost positive definiteness");
  return llt.matrixL();
}

inline bool positive_definite(const Blocks& m) {
  for (const auto& blk : m) {
    if (blk.diagonal) {
      if ((blk.diag.array() <= 0.0).any()) return false;
    } else if (Eigen::LLT<Eigen::MatrixXd>(blk.dense).info() != Eigen::Success) {
      return false;
    }
  }
  return true;
}

inline Scaling nt_scaling(const Block& x, const Block& z) {
  Scaling s;
  s.diagonal = x.diagonal;
  if (x.diagonal) {
    s.wd = (x.diag.array() / z.diag.array()).sqrt();
    s.lambda = (x.diag.array() * z.diag.array()).sqrt();
    return s;
  }
  const Eigen::MatrixXd l1 = cholesky_factor(x.dense);
  const Eigen::MatrixXd l2 = cholesky_factor(z.dense);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(l2.transpose() * l1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  s.lambda = svd.singularValues();
  s.r = l1 * svd.matrixV() * s.lambda.cwiseSqrt().cwiseInverse().asDiagonal();
  s.w = s.r * s.r.transpose();
  return s;
}

/// Solves lambda o M = rhs for M, with o the symmetrized product.
inline Block divide_by_lambda(const Block& rhs, const Scaling& s) {
  Block q = rhs;
  if (s.diagonal) {
    q.diag = rhs.diag.array() / s.lambda.array();
    return q;
  }
  const Eigen::Index m = s.lambda.size();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) q.dense(i, j) = 2.0 * rhs.dense(i, j) / (s.lambda(i) + s.lambda(j));
  }
  return q;
}

/// Largest step alpha <= 1/fraction keeping lambda + alpha * d PSD, where d is
/// a direction expressed in the scaled space.
inline double max_step(const Block& d, const Scaling& s) {
  double gamma = 0.0;
  if (s.diagonal) {
    gamma = (d.diag.array() / s.lambda.array()).minCoeff();
  } else {
    const Eigen::VectorXd inv_sqrt = s.lambda.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = inv_sqrt.asDiagonal() * d.dense * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled, Eigen::EigenvaluesOnly);
    gamma = es.eigenvalues().minCoeff();
  }
  return gamma < 0.0 ? -1.0 / gamma : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Primal-dual path-following interior-point method with Nesterov-Todd
/// scaling and Mehrotra predictor-corrector steps.
///
/// Starts from X = I, Z = I, y = 0 (infeasible start). Each iteration forms the
/// Schur complement M_ij = <A_i, W A_j W>, factors it by dense Cholesky, and
/// reuses the factor for the predictor and corrector solves. Fully sequential,
/// so identical inputs give bitwise identical results.
inline Solution solve(const StandardForm& problem, const Config& config = {}) {
  using detail::Block;
  using detail::Blocks;
  const auto& spec = problem.blocks;
  const std::size_t k = problem.constraints.size();
  if (problem.rhs.size() != k) throw std::invalid_argument("sdp::solve: rhs size mismatch");
  for (const auto& b : spec) {
    if (b.size <= 0) throw std::invalid_argument("sdp::solve: empty block");
  }
  auto validate = [&](const SparseSymmetric& m) {
    for (const auto& e : m.entries()) {
      if (e.block < 0 || e.block >= static_cast<int>(spec.size())) throw std::invalid_argument("sdp::solve: bad block index");
      const auto& b = spec[static_cast<std::size_t>(e.block)];
      if (e.col >= b.size || (b.diagonal && e.row != e.col)) {
        throw std::invalid_argument("sdp::solve: entry outside its block");
      }
    }
  };
  validate(problem.objective);
  for (const auto& c : problem.constraints) validate(c);

  double dim_total = 0.0;
  for (const auto& b : spec) dim_total += b.size;

  Blocks c_mat = detail::zeros(spec);
  detail::accumulate(c_mat, problem.objective, 1.0);
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(problem.rhs.data(), static_cast<Eigen::Index>(k));
  const double b_norm = b.norm();
  const double c_norm = detail::norm(c_mat);

  Blocks x = detail::identity(spec);
  Blocks z = detail::identity(spec);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));

  Solution sol;
  std::vector<double> primal_history;

  auto a_of = [&](const Blocks& m) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) out(static_cast<Eigen::Index>(i)) = detail::inner(problem.constraints[i], m);
    return out;
  };
  auto at_of = [&](const Eigen::VectorXd& v) {
    Blocks out = detail::zeros(spec);
    for (std::size_t i = 0; i < k; ++i) detail::accumulate(out, problem.constraints[i], v(static_cast<Eigen::Index>(i)));
    return out;
  };

  for (int iter = 0;; ++iter) {
    // Residuals: rp = b - A(X), rd = A^T y - C - Z.
    const Eigen::VectorXd rp = b - a_of(x);
    Blocks rd = at_of(y);
    detail::axpy(rd, -1.0, c_mat);
    detail::axpy(rd, -1.0, z);

    const double pobj = detail::inner(problem.objective, x);
    const double dobj = b.dot(y);
    const double xz = detail::inner(x, z);
    const double mu = xz / dim_total;
    sol.residuals.primal = rp.norm() / (1.0 + b_norm);
    sol.residuals.dual = detail::norm(rd) / (1.0 + c_norm);
    sol.residuals.gap = std::abs(dobj - pobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    sol.value = pobj;
    sol.dual_value = dobj;
    sol.iterations = iter;
    if (config.keep_log) {
      sol.log.push_back({iter, pobj, dobj, sol.residuals.primal, sol.residuals.dual, mu});
    }
    primal_history.push_back(sol.residuals.primal);

    const double xz_rel = xz / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (sol.residuals.primal <= config.primal_tolerance && sol.residuals.dual <= config.dual_tolerance &&
        sol.residuals.gap <= config.gap_tolerance && xz_rel <= config.gap_tolerance) {
      sol.status = Status::kOptimal;
      break;
    }
    // A dual objective running off to -infinity is a primal infeasibility ray.
    if (sol.residuals.primal > config.stall_threshold &&
        (!std::isfinite(dobj) || dobj < -1e10 * std::max(1.0, std::abs(pobj)))) {
      sol.status = Status::kInfeasible;
      break;
    }
    if (iter >= config.stall_window && sol.residuals.primal > config.stall_threshold) {
      const double before = primal_history[primal_history.size() - 1 - static_cast<std::size_t>(config.stall_window)];
      if (sol.residuals.primal > 0.5 * before) {
        sol.status = Status::kInfeasible;
        break;
      }
    }
    if (iter >= config.max_iterations) {
      sol.status = Status::kMaxIterations;
      break;
    }

    std::vector<detail::Scaling> scal;
    try {
      for (std::size_t i = 0; i < spec.size(); ++i) scal.push_back(detail::nt_scaling(x[i], z[i]));
    } catch (const std::runtime_error&) {
      sol.status = Status::kMaxIterations;
      break;
    }

    // Schur complement.
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    {
      Blocks waw = detail::zeros(spec);
      for (std::size_t j = 0; j < k; ++j) {
        const auto& aj = problem.constraints[j];
        std::vector<bool> touched(spec.size(), false);
        for (const auto& e : aj.entries()) touched[static_cast<std::size_t>(e.block)] = true;
        for (std::size_t bi = 0; bi < spec.size(); ++bi) {
          if (!touched[bi]) continue;
          if (waw[bi].diagonal) {
            waw[bi].diag.setZero();
          } else {
            waw[bi].dense.setZero();
          }
        }
        for (const auto& e : aj.entries()) {
          Block& out = waw[static_cast<std::size_t>(e.block)];
          const auto& s = scal[static_cast<std::size_t>(e.block)];
          if (out.diagonal) {
            out.diag(e.row) += e.value * s.wd(e.row) * s.wd(e.row);
          } else {
            out.dense.noalias() += e.value * s.w.col(e.row) * s.w.row(e.col);
            if (e.row != e.col) out.dense.noalias() += e.value * s.w.col(e.col) * s.w.row(e.row);
          }
        }
        for (std::size_t i = 0; i < k; ++i) {
          double v = 0.0;
          for (const auto& e : problem.constraints[i].entries()) {
            if (!touched[static_cast<std::size_t>(e.block)]) continue;
            const Block& t = waw[static_cast<std::size_t>(e.block)];
            if (t.diagonal) {
              v += e.value * t.diag(e.row);
            } else {
              v += e.value * (e.row == e.col ? t.dense(e.row, e.col) : t.dense(e.row, e.col) + t.dense(e.col, e.row));
            }
          }
          schur(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
      }
      schur = 0.5 * (schur + schur.transpose()).eval();
    }
    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    if (llt.info() != Eigen::Success) {
      const double reg = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      schur.diagonal().array() += reg;
      llt.compute(schur);
      if (llt.info() != Eigen::Success) {
        sol.status = Status::kMaxIterations;
        break;
      }
    }

    // W rd W per block, used by both solves.
    Blocks w_rd_w = detail::zeros(spec);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (spec[i].diagonal) {
        w_rd_w[i].diag = scal[i].wd.array().square() * rd[i].diag.array();
      } else {
        w_rd_w[i].dense = scal[i].w * rd[i].dense * scal[i].w;
      }
    }

    // Given the scaled complementarity right-hand side, returns the scaled
    // directions (dX~, dZ~) and the unscaled dy, dX, dZ.
    struct Direction {
      Blocks dx_scaled, dz_scaled, dx, dz;
      Eigen::VectorXd dy;
    };
    auto direction = [&](const Blocks& rhs) {
      Direction d;
      Blocks q = detail::zeros(spec);
      Blocks rqr = detail::zeros(spec);
      for (std::size_t i = 0; i < spec.size(); ++i) {
        q[i] = detail::divide_by_lambda(rhs[i], scal[i]);
        if (spec[i].diagonal) {
          rqr[i].diag = scal[i].wd.array() * q[i].diag.array();
        } else {
          rqr[i].dense = scal[i].r * q[i].dense * scal[i].r.transpose();
        }
      }
      Blocks tmp = rqr;
      detail::axpy(tmp, -1.0, w_rd_w);
      const Eigen::VectorXd schur_rhs = a_of(tmp) - rp;
      d.dy = llt.solve(schur_rhs);
      d.dz = at_of(d.dy);
      detail::axpy(d.dz, 1.0, rd);
      d.dx = rqr;
      d.dz_scaled = detail::zeros(spec);
      d.dx_scaled = q;
      for (std::size_t i = 0; i < spec.size(); ++i) {
        if (spec[i].diagonal) {
          d.dx[i].diag -= (scal[i].wd.array().square() * d.dz[i].diag.array()).matrix();
          d.dz_scaled[i].diag = scal[i].wd.array() * d.dz[i].diag.array();
        } else {
          d.dx[i].dense -= scal[i].w * d.dz[i].dense * scal[i].w;
          d.dz_scaled[i].dense = scal[i].r.transpose() * d.dz[i].dense * scal[i].r;
        }
      }
      for (std::size_t i = 0; i < spec.size(); ++i) {
        if (spec[i].diagonal) {
          d.dx_scaled[i].diag -= d.dz_scaled[i].diag;
        } else {
          d.dx_scaled[i].dense -= d.dz_scaled[i].dense;
        }
      }
      return d;
    };
    auto step_lengths = [&](const Direction& d) {
      double ap = std::numeric_limits<double>::infinity();
      double ad = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < spec.size(); ++i) {
        ap = std::min(ap, detail::max_step(d.dx_scaled[i], scal[i]));
        ad = std::min(ad, detail::max_step(d.dz_scaled[i], scal[i]));
      }
      return std::pair{ap, ad};
    };

    // Predictor: rhs = -lambda o lambda.
    Blocks rhs = detail::zeros(spec);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const Eigen::VectorXd l2 = scal[i].lambda.array().square();
      if (spec[i].diagonal) {
        rhs[i].diag = -l2;
      } else {
        rhs[i].dense = Eigen::MatrixXd((-l2).asDiagonal());
      }
    }
    const Direction aff = direction(rhs);
    auto [ap_aff, ad_aff] = step_lengths(aff);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);

    // <lambda + ap dX~, lambda + ad dZ~> in the scaled space.
    double xz_aff = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (spec[i].diagonal) {
        xz_aff += ((scal[i].lambda + ap_aff * aff.dx_scaled[i].diag).array() *
                   (scal[i].lambda + ad_aff * aff.dz_scaled[i].diag).array())
                      .sum();
      } else {
        const Eigen::MatrixXd lam = scal[i].lambda.asDiagonal();
        xz_aff += (lam + ap_aff * aff.dx_scaled[i].dense).cwiseProduct(lam + ad_aff * aff.dz_scaled[i].dense).sum();
      }
    }
    const double ratio = std::clamp(xz_aff / xz, 0.0, 1.0);
    const double sigma = ratio * ratio * ratio;

    // Corrector: rhs = sigma mu I - lambda o lambda - dX~_aff o dZ~_aff.
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (spec[i].diagonal) {
        rhs[i].diag = (sigma * mu - scal[i].lambda.array().square() -
                       aff.dx_scaled[i].diag.array() * aff.dz_scaled[i].diag.array())
                          .matrix();
      } else {
        const Eigen::MatrixXd& dxa = aff.dx_scaled[i].dense;
        const Eigen::MatrixXd& dza = aff.dz_scaled[i].dense;
        const Eigen::Index m = scal[i].lambda.size();
        rhs[i].dense = sigma * mu * Eigen::MatrixXd::Identity(m, m);
        rhs[i].dense.diagonal() -= scal[i].lambda.array().square().matrix();
        rhs[i].dense -= 0.5 * (dxa * dza + dza * dxa);
      }
    }
    const Direction cor = direction(rhs);
    auto [ap, ad] = step_lengths(cor);
    ap = std::min(1.0, config.step_fraction * ap);
    ad = std::min(1.0, config.step_fraction * ad);

    // Near the boundary rounding can push a full step out of the cone; back
    // off until both iterates still factor.
    auto advance = [](const Blocks& from, const Blocks& dir, double& alpha) {
      for (int tries = 0;; ++tries) {
        Blocks next = from;
        detail::axpy(next, alpha, dir);
        for (auto& blk : next) {
          if (!blk.diagonal) blk.dense = 0.5 * (blk.dense + blk.dense.transpose()).eval();
        }
        if (detail::positive_definite(next) || tries >= 40) return next;
        alpha *= 0.8;
      }
    };
    x = advance(x, cor.dx, ap);
    const Blocks z_next = advance(z, cor.dz, ad);
    z = z_next;
    y += ad * cor.dy;
  }

  sol.multipliers = y;
  for (const auto& blk : x) sol.blocks.push_back(blk.diagonal ? Eigen::MatrixXd(blk.diag.asDiagonal()) : blk.dense);
  return sol;
}

/// Solves an SdpProblem. The slack block is stripped from the returned
/// optimizer.
inline Solution solve(const SdpProblem& problem, const Config& config = {}) {
  Solution sol = solve(to_standard_form(problem), config);
  sol.blocks.resize(problem.blocks.size());
  return sol;
}

// SDPA sparse text format ----------------------------------------------------
//
//   "* comment" lines
//   m                      number of constraints
//   nBlocks
//   s_1 s_2 ...            block sizes, negative for diagonal blocks
//   b_1 ... b_m            right-hand sides
//   mat block i j value    one line per upper-triangular entry; mat 0 is the
//                          objective, mat i the i-th constraint; 1-based
//
// It encodes max <F0, X> s.t. <F_i, X> = b_i, X >= 0, the form read by SDPA
// and CSDP.

inline void write_sdpa(std::ostream& os, const StandardForm& p) {
  std::ostringstream body;
  body.precision(17);
  body << "* mbell SDP export: max <F0,X> s.t. <Fi,X> = bi, X psd\n";
  body << p.constraints.size() << "\n" << p.blocks.size() << "\n";
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    body << (i ? " " : "") << (p.blocks[i].diagonal ? -p.blocks[i].size : p.blocks[i].size);
  }
  body << "\n";
  for (std::size_t i = 0; i < p.rhs.size(); ++i) body << (i ? " " : "") << p.rhs[i];
  body << "\n";
  auto dump = [&](std::size_t mat, const SparseSymmetric& m) {
    for (const auto& e : m.entries()) {
      body << mat << " " << e.block + 1 << " " << e.row + 1 << " " << e.col + 1 << " " << e.value << "\n";
    }
  };
  dump(0, p.objective);
  for (std::size_t i = 0; i < p.constraints.size(); ++i) dump(i + 1, p.constraints[i]);
  os << body.str();
}

inline StandardForm read_sdpa(std::istream& is) {
  std::string line;
  std::ostringstream content;
  while (std::getline(is, line)) {
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) continue;
    for (char& ch : line) {
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    }
    content << line << "\n";
  }
  std::istringstream in(content.str());
  long m = 0;
  long nblocks = 0;
  if (!(in >> m >> nblocks) || m < 0 || nblocks <= 0) throw std::runtime_error("read_sdpa: bad header");
  StandardForm p;
  for (long i = 0; i < nblocks; ++i) {
    long s = 0;
    if (!(in >> s) || s == 0) throw std::runtime_error("read_sdpa: bad block size");
    p.blocks.push_back({static_cast<int>(s < 0 ? -s : s), s < 0});
  }
  p.rhs.resize(static_cast<std::size_t>(m));
  for (auto& v : p.rhs) {
    if (!(in >> v)) throw std::runtime_error("read_sdpa: bad right-hand side");
  }
  p.constraints.resize(static_cast<std::size_t>(m));
  long mat = 0;
  long blk = 0;
  long i = 0;
  long j = 0;
  double v = 0.0;
  while (in >> mat >> blk >> i >> j >> v) {
    if (mat < 0 || mat > m || blk < 1 || blk > nblocks || i < 1 || j < 1) {
      throw std::runtime_error("read_sdpa: entry out of range");
    }
    auto& target = mat == 0 ? p.objective : p.constraints[static_cast<std::size_t>(mat - 1)];
    target.add(static_cast<int>(blk - 1), static_cast<int>(i - 1), static_cast<int>(j - 1), v);
  }
  if (!in.eof()) throw std::runtime_error("read_sdpa: trailing garbage");
  return p;
}

}  // namespace mbell::sdp
