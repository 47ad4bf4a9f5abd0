#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcnav/dynamics.hpp"
#include "rcnav/safety.hpp"
#include "rcnav/stability.hpp"

namespace rcnav {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dense convex QP: minimize 1/2 z^T Q z + q_lin^T z subject to A z >= b
/// row-wise and lb <= z <= ub. Q must be symmetric positive definite.
struct QpProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd q_lin;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;

  Eigen::Index n() const { return Q.rows(); }
  Eigen::Index row_count() const { return A.rows(); }
};

inline void validate_problem(const QpProblem& p) {
  const Eigen::Index n = p.Q.rows();
  if (p.Q.cols() != n || p.q_lin.size() != n || p.lb.size() != n || p.ub.size() != n) {
    throw std::invalid_argument("QpProblem: inconsistent dimensions");
  }
  if (p.A.rows() != p.b.size() || (p.A.rows() > 0 && p.A.cols() != n)) {
    throw std::invalid_argument("QpProblem: constraint dimensions do not match");
  }
  if (!p.Q.allFinite() || !p.q_lin.allFinite() || !p.A.allFinite() || !p.b.allFinite()) {
    throw std::invalid_argument("QpProblem: non-finite data");
  }
  const double scale = std::max(1.0, p.Q.cwiseAbs().maxCoeff());
  if ((p.Q - p.Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("QpProblem: Q must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(p.Q);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("QpProblem: Q must be positive definite");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.lb(i) > p.ub(i)) {
      throw std::invalid_argument("QpProblem: lb exceeds ub at variable " +
                                  std::to_string(i));
    }
  }
}

enum class QpStatus { Optimal, Infeasible, MaxIter };

inline const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal:
      return "optimal";
    case QpStatus::Infeasible:
      return "infeasible";
    case QpStatus::MaxIter:
      return "max_iter";
  }
  return "unknown";
}

struct QpSolution {
  Eigen::VectorXd z;
  Eigen::VectorXd duals;        // one per A row
  Eigen::VectorXd duals_lower;  // one per variable (0 where lb = -inf)
  Eigen::VectorXd duals_upper;  // one per variable (0 where ub = +inf)
  QpStatus status = QpStatus::MaxIter;
  double kkt_residual = kInfinity;
  int iterations = 0;

  double objective(const QpProblem& p) const {
    return 0.5 * z.dot(p.Q * z) + p.q_lin.dot(z);
  }
};

/// First-order optimality residuals, recomputed from problem data alone.
/// Complementarity is the scaled product |lambda * slack| / (1 + |lambda|),
/// so large multipliers on exactly-active rows do not drown the residual in
/// representation noise.
struct KktReport {
  double stationarity = kInfinity;
  double primal_feasibility = kInfinity;
  double dual_feasibility = kInfinity;
  double complementarity = kInfinity;

  double max_residual() const {
    return std::max(std::max(stationarity, primal_feasibility),
                    std::max(dual_feasibility, complementarity));
  }
  bool passes(double tol) const { return max_residual() <= tol; }
};

inline KktReport check_kkt(const QpProblem& p, const QpSolution& sol) {
  const Eigen::Index n = p.n();
  const Eigen::Index m = p.row_count();
  KktReport rep;

  Eigen::VectorXd grad = p.Q * sol.z + p.q_lin;
  if (m > 0) {
    grad -= p.A.transpose() * sol.duals;
  }
  grad -= sol.duals_lower;
  grad += sol.duals_upper;
  rep.stationarity = grad.cwiseAbs().maxCoeff();

  double primal = 0.0;
  double dual = 0.0;
  double comp = 0.0;
  auto accumulate = [&](double slack, double mult) {
    primal = std::max(primal, -slack);
    dual = std::max(dual, -mult);
    comp = std::max(comp, std::abs(mult * slack) / (1.0 + std::abs(mult)));
  };
  for (Eigen::Index k = 0; k < m; ++k) {
    accumulate(p.A.row(k).dot(sol.z) - p.b(k), sol.duals(k));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(p.lb(i))) {
      accumulate(sol.z(i) - p.lb(i), sol.duals_lower(i));
    }
    if (std::isfinite(p.ub(i))) {
      accumulate(p.ub(i) - sol.z(i), sol.duals_upper(i));
    }
  }
  rep.primal_feasibility = primal;
  rep.dual_feasibility = dual;
  rep.complementarity = comp;
  return rep;
}

namespace detail {

enum class ConstraintSource { Row, Lower, Upper };

struct StackedConstraint {
  ConstraintSource source;
  Eigen::Index index;  // row index or variable index
};

}  // namespace detail

/// Dual active-set solve (Goldfarb-Idnani). Starts at the unconstrained
/// minimizer, which is dual feasible, and adds the most violated constraint
/// until primal feasibility; blocking constraints are dropped along the way.
/// Deterministic: ties are broken by the lowest stacked index. Infeasibility
/// is reported when a violated constraint admits neither a primal nor a dual
/// step.
inline QpSolution solve(const QpProblem& p, double tol = 1e-8, int max_iter = 200) {
  validate_problem(p);
  if (!(tol > 0.0) || max_iter < 1) {
    throw std::invalid_argument("solve: tol must be > 0 and max_iter >= 1");
  }
  const Eigen::Index n = p.n();

  // Stack A rows, then finite lower bounds, then finite upper bounds, as
  // normals g_k with rhs h_k for g_k . z >= h_k.
  std::vector<detail::StackedConstraint> stacked;
  std::vector<Eigen::VectorXd> normals;
  std::vector<double> rhs;
  for (Eigen::Index k = 0; k < p.row_count(); ++k) {
    stacked.push_back({detail::ConstraintSource::Row, k});
    normals.push_back(p.A.row(k).transpose());
    rhs.push_back(p.b(k));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(p.lb(i))) {
      stacked.push_back({detail::ConstraintSource::Lower, i});
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(i) = 1.0;
      normals.push_back(e);
      rhs.push_back(p.lb(i));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(p.ub(i))) {
      stacked.push_back({detail::ConstraintSource::Upper, i});
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(i) = -1.0;
      normals.push_back(e);
      rhs.push_back(-p.ub(i));
    }
  }
  const int total = static_cast<int>(stacked.size());

  Eigen::LLT<Eigen::MatrixXd> llt(p.Q);
  Eigen::VectorXd z = llt.solve(-p.q_lin);

  std::vector<int> active;
  std::vector<double> lambda;
  int iterations = 0;
  QpStatus status = QpStatus::MaxIter;

  auto is_active = [&active](int k) {
    for (int a : active) {
      if (a == k) {
        return true;
      }
    }
    return false;
  };

  while (iterations < max_iter) {
    // Most violated constraint; lowest index wins ties.
    int pick = -1;
    double worst = 0.0;
    for (int k = 0; k < total; ++k) {
      if (is_active(k)) {
        continue;
      }
      const double slack = normals[static_cast<std::size_t>(k)].dot(z) -
                           rhs[static_cast<std::size_t>(k)];
      const double feas_tol = tol * (1.0 + std::abs(rhs[static_cast<std::size_t>(k)]));
      if (slack < -feas_tol && slack < worst) {
        worst = slack;
        pick = k;
      }
    }
    if (pick < 0) {
      status = QpStatus::Optimal;
      break;
    }

    const Eigen::VectorXd& d = normals[static_cast<std::size_t>(pick)];
    double u_plus = 0.0;
    bool resolved = false;

    while (iterations < max_iter) {
      const Eigen::Index q = static_cast<Eigen::Index>(active.size());
      const Eigen::VectorXd y = llt.solve(d);

      Eigen::VectorXd r(q);
      Eigen::VectorXd z_dir;
      if (q > 0) {
        Eigen::MatrixXd N(n, q);
        for (Eigen::Index c = 0; c < q; ++c) {
          N.col(c) = normals[static_cast<std::size_t>(active[static_cast<std::size_t>(c)])];
        }
        const Eigen::MatrixXd qi_n = llt.solve(N);
        const Eigen::MatrixXd m_mat = N.transpose() * qi_n;
        r = m_mat.ldlt().solve(N.transpose() * y);
        z_dir = y - qi_n * r;
      } else {
        z_dir = y;
      }

      const double gz = d.dot(z_dir);
      const bool primal_step = gz > 1e-11 * (1.0 + d.squaredNorm());

      double t2 = kInfinity;
      if (primal_step) {
        t2 = (rhs[static_cast<std::size_t>(pick)] - d.dot(z)) / gz;
      }

      double t1 = kInfinity;
      Eigen::Index blocking = -1;
      for (Eigen::Index c = 0; c < q; ++c) {
        if (r(c) > 1e-12) {
          const double cand = lambda[static_cast<std::size_t>(c)] / r(c);
          if (cand < t1) {
            t1 = cand;
            blocking = c;
          }
        }
      }

      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) {
        status = QpStatus::Infeasible;
        resolved = true;
        break;
      }

      if (primal_step) {
        z += t * z_dir;
      }
      for (Eigen::Index c = 0; c < q; ++c) {
        lambda[static_cast<std::size_t>(c)] -= t * r(c);
      }
      u_plus += t;
      ++iterations;

      if (t2 <= t1) {
        active.push_back(pick);
        lambda.push_back(u_plus);
        resolved = true;
        break;
      }
      active.erase(active.begin() + blocking);
      lambda.erase(lambda.begin() + blocking);
    }

    if (resolved && status == QpStatus::Infeasible) {
      break;
    }
  }

  QpSolution sol;
  sol.z = z;
  sol.duals = Eigen::VectorXd::Zero(p.row_count());
  sol.duals_lower = Eigen::VectorXd::Zero(n);
  sol.duals_upper = Eigen::VectorXd::Zero(n);
  for (std::size_t c = 0; c < active.size(); ++c) {
    const detail::StackedConstraint& sc = stacked[static_cast<std::size_t>(active[c])];
    const double mult = lambda[c];
    switch (sc.source) {
      case detail::ConstraintSource::Row:
        sol.duals(sc.index) = mult;
        break;
      case detail::ConstraintSource::Lower:
        sol.duals_lower(sc.index) = mult;
        break;
      case detail::ConstraintSource::Upper:
        sol.duals_upper(sc.index) = mult;
        break;
    }
  }
  sol.status = status;
  sol.iterations = iterations;
  sol.kkt_residual = check_kkt(p, sol).max_residual();
  return sol;
}

/// Build the per-step QP over z = (u, delta). The minimized objective is
/// 1/2 u^T R u + delta^T H delta, so the delta block of Q is 2H. CLF rows
/// enter relaxed (delta_k - a_u u >= b), CBF rows hard (a_u u >= -b), and
/// the input bounds become the box on u; slacks are unbounded.
inline QpProblem assemble(const std::vector<ClfRow>& clf, const std::vector<CbfRow>& cbf,
                          const InputBounds& bounds, const Mat2& R, const Mat2& H) {
  if (bounds.lo.x() > bounds.hi.x() || bounds.lo.y() > bounds.hi.y()) {
    throw std::invalid_argument("assemble: u_min exceeds u_max");
  }
  auto check_weight = [](const Mat2& w, const char* name) {
    if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument(std::string("assemble: ") + name + " must be symmetric");
    }
    Eigen::LLT<Mat2> llt(w);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument(std::string("assemble: ") + name +
                                  " must be positive definite");
    }
  };
  check_weight(R, "R");
  check_weight(H, "H");

  const Eigen::Index n_slack = static_cast<Eigen::Index>(clf.size());
  if (n_slack > 2) {
    throw std::invalid_argument("assemble: at most two CLF rows supported");
  }
  for (Eigen::Index i = 0; i < n_slack; ++i) {
    if (clf[static_cast<std::size_t>(i)].slack_index != static_cast<int>(i)) {
      throw std::invalid_argument("assemble: CLF slack indices must be 0..k-1 in order");
    }
  }

  const Eigen::Index n = 2 + n_slack;
  QpProblem p;
  p.Q = Eigen::MatrixXd::Zero(n, n);
  p.Q.topLeftCorner<2, 2>() = R;
  if (n_slack > 0) {
    p.Q.bottomRightCorner(n_slack, n_slack) = 2.0 * H.topLeftCorner(n_slack, n_slack);
  }
  p.q_lin = Eigen::VectorXd::Zero(n);

  const Eigen::Index m = n_slack + static_cast<Eigen::Index>(cbf.size());
  p.A = Eigen::MatrixXd::Zero(m, n);
  p.b = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < n_slack; ++i) {
    const ClfRow& row = clf[static_cast<std::size_t>(i)];
    p.A.row(i).head<2>() = -row.a_u;
    p.A(i, 2 + row.slack_index) = 1.0;
    p.b(i) = row.b;
  }
  for (std::size_t j = 0; j < cbf.size(); ++j) {
    const Eigen::Index k = n_slack + static_cast<Eigen::Index>(j);
    p.A.row(k).head<2>() = cbf[j].a_u;
    p.b(k) = -cbf[j].b;
  }

  p.lb = Eigen::VectorXd::Constant(n, -kInfinity);
  p.ub = Eigen::VectorXd::Constant(n, kInfinity);
  p.lb.head<2>() = bounds.lo;
  p.ub.head<2>() = bounds.hi;

  validate_problem(p);
  return p;
}

/// Plain-text dump for external cross-checking: dimensions, Q, q, rows, bounds.
inline void dump_problem(const QpProblem& p, std::ostream& os) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  os << "qp n=" << p.n() << " rows=" << p.row_count() << "\n";
  os << "Q\n";
  for (Eigen::Index i = 0; i < p.n(); ++i) {
    for (Eigen::Index j = 0; j < p.n(); ++j) {
      os << fmt(p.Q(i, j)) << (j + 1 < p.n() ? " " : "\n");
    }
  }
  os << "q\n";
  for (Eigen::Index i = 0; i < p.n(); ++i) {
    os << fmt(p.q_lin(i)) << (i + 1 < p.n() ? " " : "\n");
  }
  os << "rows (a.z >= b)\n";
  for (Eigen::Index k = 0; k < p.row_count(); ++k) {
    for (Eigen::Index j = 0; j < p.n(); ++j) {
      os << fmt(p.A(k, j)) << " ";
    }
    os << ">= " << fmt(p.b(k)) << "\n";
  }
  os << "bounds (lb <= z <= ub)\n";
  for (Eigen::Index i = 0; i < p.n(); ++i) {
    os << fmt(p.lb(i)) << " " << fmt(p.ub(i)) << "\n";
  }
}

}  // namespace rcnav
