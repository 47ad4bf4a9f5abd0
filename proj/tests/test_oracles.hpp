// Independent reference implementations used only by tests: a brute-force
// boundary-sampling distance oracle for shapes, finite-difference helpers,
// and a first-order dual solver for small QPs. None of these share logic
// with the library paths they check.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "rcnav/geometry.hpp"
#include "rcnav/qp.hpp"

namespace rcnav::testing {

/// Dense boundary sampling of a primitive union: every primitive's boundary
/// is sampled, each primitive's signed distance comes from its own samples
/// with the sign from a direct containment test, and the union value is the
/// member-wise minimum. No SDF formula is involved anywhere.
class ShapeOracle {
 public:
  ShapeOracle(const RobotShape& shape, int total_samples) : shape_(shape) {
    double perimeter = 0.0;
    std::vector<double> lengths;
    for (const Primitive& prim : shape.primitives) {
      const double len = prim.kind == Primitive::Kind::Circle
                             ? 2.0 * M_PI * prim.radius
                             : 4.0 * (prim.half_length + prim.half_width);
      lengths.push_back(len);
      perimeter += len;
    }
    spacing_ = perimeter / static_cast<double>(total_samples);

    samples_.resize(shape.primitives.size());
    for (std::size_t i = 0; i < shape.primitives.size(); ++i) {
      const Primitive& prim = shape.primitives[i];
      const int count = std::max(8, static_cast<int>(lengths[i] / spacing_));
      for (int k = 0; k < count; ++k) {
        const double s = lengths[i] * static_cast<double>(k) / static_cast<double>(count);
        samples_[i].push_back(point_on_primitive(prim, s, lengths[i]));
      }
    }
  }

  double spacing() const { return spacing_; }

  bool contains(const Vec2& q) const {
    for (const Primitive& prim : shape_.primitives) {
      if (inside_or_on(prim, q)) {
        return true;
      }
    }
    return false;
  }

  double signed_distance(const Vec2& q) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < shape_.primitives.size(); ++i) {
      double d2 = std::numeric_limits<double>::infinity();
      for (const Vec2& p : samples_[i]) {
        d2 = std::min(d2, (q - p).squaredNorm());
      }
      const double d = std::sqrt(d2);
      best = std::min(best, inside_or_on(shape_.primitives[i], q) ? -d : d);
    }
    return best;
  }

  double distance(const Vec2& q) const { return std::abs(signed_distance(q)); }

 private:
  static Vec2 point_on_primitive(const Primitive& prim, double s, double len) {
    if (prim.kind == Primitive::Kind::Circle) {
      const double ang = 2.0 * M_PI * s / len;
      return prim.offset + prim.radius * Vec2(std::cos(ang), std::sin(ang));
    }
    const double l = prim.half_length;
    const double w = prim.half_width;
    const double ex = 2.0 * l;
    const double ey = 2.0 * w;
    Vec2 p;
    if (s < ex) {
      p = Vec2(-l + s, -w);
    } else if (s < ex + ey) {
      p = Vec2(l, -w + (s - ex));
    } else if (s < 2.0 * ex + ey) {
      p = Vec2(l - (s - ex - ey), w);
    } else {
      p = Vec2(-l, w - (s - 2.0 * ex - ey));
    }
    return prim.offset + p;
  }

  static bool inside_or_on(const Primitive& prim, const Vec2& q) {
    const Vec2 r = q - prim.offset;
    if (prim.kind == Primitive::Kind::Circle) {
      return r.norm() <= prim.radius;
    }
    return std::abs(r.x()) <= prim.half_length && std::abs(r.y()) <= prim.half_width;
  }

  RobotShape shape_;
  std::vector<std::vector<Vec2>> samples_;  // one list per primitive
  double spacing_ = 0.0;
};

/// The L-shaped footprint the bundled experiments use: a long horizontal bar
/// with a vertical bar on its left end.
inline RobotShape l_shape() {
  return RobotShape({Primitive::rectangle(1.0, 0.25, Vec2(0.0, 0.0)),
                     Primitive::rectangle(0.25, 1.0, Vec2(-0.75, 0.75))});
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

struct DualPgResult {
  Eigen::VectorXd z;
  double objective = 0.0;
  bool converged = false;
  long iterations = 0;
};

/// Accelerated projected gradient ascent on the dual of a strictly convex
/// QP. Projection onto the nonnegative orthant is a clamp, so no part of the
/// active-set machinery is involved. Only meaningful for feasible problems.
inline DualPgResult solve_qp_dual_pg(const QpProblem& p, long max_iter = 400000,
                                     double tol = 1e-11) {
  const Eigen::Index n = p.n();
  std::vector<Eigen::VectorXd> normals;
  std::vector<double> rhs;
  for (Eigen::Index k = 0; k < p.row_count(); ++k) {
    normals.push_back(p.A.row(k).transpose());
    rhs.push_back(p.b(k));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(p.lb(i))) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(i) = 1.0;
      normals.push_back(e);
      rhs.push_back(p.lb(i));
    }
    if (std::isfinite(p.ub(i))) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(i) = -1.0;
      normals.push_back(e);
      rhs.push_back(-p.ub(i));
    }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(normals.size());
  Eigen::MatrixXd g_mat(m, n);
  Eigen::VectorXd h_vec(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    g_mat.row(k) = normals[static_cast<std::size_t>(k)].transpose();
    h_vec(k) = rhs[static_cast<std::size_t>(k)];
  }

  Eigen::LLT<Eigen::MatrixXd> llt(p.Q);
  const Eigen::MatrixXd dual_hessian = g_mat * llt.solve(g_mat.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dual_hessian);
  const double lipschitz = std::max(eig.eigenvalues().maxCoeff(), 1e-12);
  const double step = 1.0 / lipschitz;

  auto primal = [&](const Eigen::VectorXd& lam) {
    return llt.solve(g_mat.transpose() * lam - p.q_lin).eval();
  };

  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd y = lam;
  double momentum = 1.0;
  DualPgResult result;
  for (long it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd grad = h_vec - g_mat * primal(y);
    Eigen::VectorXd lam_next = (y + step * grad).cwiseMax(0.0);
    const double change = (lam_next - lam).cwiseAbs().maxCoeff();

    const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = lam_next + ((momentum - 1.0) / momentum_next) * (lam_next - lam);
    if ((lam_next - lam).dot(grad) < 0.0) {
      y = lam_next;  // adaptive restart
      momentum = 1.0;
    } else {
      momentum = momentum_next;
    }
    lam = lam_next;
    result.iterations = it + 1;
    if (change <= tol * (1.0 + lam.cwiseAbs().maxCoeff())) {
      result.converged = true;
      break;
    }
  }
  result.z = primal(lam);
  result.objective = 0.5 * result.z.dot(p.Q * result.z) + p.q_lin.dot(result.z);
  return result;
}

/// Random strictly feasible QP with n <= 4 variables: constraints are built
/// around a known interior point.
inline QpProblem random_feasible_qp(std::mt19937& rng) {
  std::uniform_int_distribution<int> n_dist(2, 4);
  std::uniform_int_distribution<int> m_dist(0, 60);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 2.0);
  std::uniform_real_distribution<double> prob(0.0, 1.0);

  const int n = n_dist(rng);
  QpProblem p;
  Eigen::MatrixXd m_mat(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m_mat(i, j) = unit(rng);
    }
  }
  p.Q = m_mat.transpose() * m_mat + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
  p.q_lin = Eigen::VectorXd::NullaryExpr(n, [&]() { return 3.0 * unit(rng); });

  Eigen::VectorXd z0 = Eigen::VectorXd::NullaryExpr(n, [&]() { return unit(rng); });

  const int m = m_dist(rng);
  p.A = Eigen::MatrixXd(m, n);
  p.b = Eigen::VectorXd(m);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd a = Eigen::VectorXd::NullaryExpr(n, [&]() { return unit(rng); });
    if (a.norm() < 1e-3) {
      a(0) = 1.0;
    }
    p.A.row(k) = a.transpose();
    p.b(k) = a.dot(z0) - pos(rng);
  }

  p.lb = Eigen::VectorXd(n);
  p.ub = Eigen::VectorXd(n);
  for (int i = 0; i < n; ++i) {
    p.lb(i) = prob(rng) < 0.3 ? -kInfinity : z0(i) - 0.1 - pos(rng);
    p.ub(i) = prob(rng) < 0.3 ? kInfinity : z0(i) + 0.1 + pos(rng);
  }
  return p;
}

}  // namespace rcnav::testing
