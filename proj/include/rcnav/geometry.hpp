#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rcnav {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Central-difference step (m) used for SDF gradients unless overridden.
inline constexpr double kDefaultSdfStep = 1e-4;

inline Mat2 rotation2(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

/// Planar rigid pose: position and heading of the body frame in the world.
struct Pose2 {
  Vec2 p = Vec2::Zero();
  double theta = 0.0;

  Mat2 rotation() const { return rotation2(theta); }
};

inline Vec2 world_to_body(const Pose2& pose, const Vec2& q_w) {
  return rotation2(pose.theta).transpose() * (q_w - pose.p);
}

inline Vec2 body_to_world(const Pose2& pose, const Vec2& q_b) {
  return rotation2(pose.theta) * q_b + pose.p;
}

/// One convex piece of the robot footprint, expressed in the body frame.
struct Primitive {
  enum class Kind { Circle, Rectangle };

  Kind kind = Kind::Circle;
  double radius = 0.0;       // circle only
  double half_length = 0.0;  // rectangle x half-extent
  double half_width = 0.0;   // rectangle y half-extent
  Vec2 offset = Vec2::Zero();

  static Primitive circle(double radius, const Vec2& offset = Vec2::Zero()) {
    if (!(radius > 0.0)) {
      throw std::invalid_argument("Primitive::circle: radius must be > 0");
    }
    Primitive p;
    p.kind = Kind::Circle;
    p.radius = radius;
    p.offset = offset;
    return p;
  }

  static Primitive rectangle(double half_length, double half_width,
                             const Vec2& offset = Vec2::Zero()) {
    if (!(half_length > 0.0) || !(half_width > 0.0)) {
      throw std::invalid_argument("Primitive::rectangle: half extents must be > 0");
    }
    Primitive p;
    p.kind = Kind::Rectangle;
    p.half_length = half_length;
    p.half_width = half_width;
    p.offset = offset;
    return p;
  }
};

struct Aabb {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();
};

/// Robot footprint as a union of primitives. The footprint SDF is the
/// pointwise minimum over member SDFs (negative inside the union).
struct RobotShape {
  std::vector<Primitive> primitives;

  RobotShape() = default;
  explicit RobotShape(std::vector<Primitive> prims) : primitives(std::move(prims)) {
    if (primitives.empty()) {
      throw std::invalid_argument("RobotShape: at least one primitive required");
    }
  }

  Aabb bounding_box() const {
    Aabb box;
    box.lo = Vec2::Constant(std::numeric_limits<double>::infinity());
    box.hi = -box.lo;
    for (const Primitive& prim : primitives) {
      Vec2 ext;
      if (prim.kind == Primitive::Kind::Circle) {
        ext = Vec2::Constant(prim.radius);
      } else {
        ext = Vec2(prim.half_length, prim.half_width);
      }
      box.lo = box.lo.cwiseMin(prim.offset - ext);
      box.hi = box.hi.cwiseMax(prim.offset + ext);
    }
    return box;
  }
};

/// Exact signed distance to one primitive. Negative strictly inside,
/// magnitude is the Euclidean distance to the boundary.
inline double sdf_primitive(const Primitive& prim, const Vec2& q_b) {
  const Vec2 q = q_b - prim.offset;
  if (prim.kind == Primitive::Kind::Circle) {
    return q.norm() - prim.radius;
  }
  const double dx = std::abs(q.x()) - prim.half_length;
  const double dy = std::abs(q.y()) - prim.half_width;
  const double outside = Vec2(std::max(dx, 0.0), std::max(dy, 0.0)).norm();
  const double inside = std::min(std::max(dx, dy), 0.0);
  return outside + inside;
}

inline double sdf_union(const RobotShape& shape, const Vec2& q_b) {
  double d = std::numeric_limits<double>::infinity();
  for (const Primitive& prim : shape.primitives) {
    d = std::min(d, sdf_primitive(prim, q_b));
  }
  return d;
}

/// Central-difference gradient of the union SDF.
inline Vec2 sdf_gradient(const RobotShape& shape, const Vec2& q_b,
                         double delta = kDefaultSdfStep) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("sdf_gradient: delta must be > 0");
  }
  Vec2 grad;
  for (int k = 0; k < 2; ++k) {
    Vec2 hi = q_b;
    Vec2 lo = q_b;
    hi[k] += delta;
    lo[k] -= delta;
    grad[k] = (sdf_union(shape, hi) - sdf_union(shape, lo)) / (2.0 * delta);
  }
  return grad;
}

/// Body-frame SDF sampled on a regular lattice. Cell (ix, iy) is centered at
/// origin + (ix, iy) * resolution; values are stored row-major (ix * ny + iy).
struct SdfGrid {
  double resolution = 0.0;
  Vec2 origin = Vec2::Zero();
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  std::vector<double> values;

  double at(std::int64_t ix, std::int64_t iy) const {
    return values[static_cast<std::size_t>(ix * ny + iy)];
  }

  bool contains(const Vec2& q_b) const {
    const Vec2 rel = q_b - origin;
    const double span_x = resolution * static_cast<double>(nx - 1);
    const double span_y = resolution * static_cast<double>(ny - 1);
    return rel.x() >= 0.0 && rel.x() <= span_x && rel.y() >= 0.0 && rel.y() <= span_y;
  }
};

inline SdfGrid build_grid(const RobotShape& shape, double margin, double resolution,
                          std::int64_t max_cells = 4'000'000) {
  if (margin < 0.0) {
    throw std::invalid_argument("build_grid: margin must be >= 0");
  }
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("build_grid: resolution must be > 0");
  }
  const Aabb box = shape.bounding_box();
  const Vec2 lo = box.lo - Vec2::Constant(margin);
  const Vec2 hi = box.hi + Vec2::Constant(margin);

  SdfGrid grid;
  grid.resolution = resolution;
  grid.origin = lo;
  grid.nx = static_cast<std::int64_t>(std::ceil((hi.x() - lo.x()) / resolution - 1e-9)) + 1;
  grid.ny = static_cast<std::int64_t>(std::ceil((hi.y() - lo.y()) / resolution - 1e-9)) + 1;
  grid.nx = std::max<std::int64_t>(grid.nx, 2);
  grid.ny = std::max<std::int64_t>(grid.ny, 2);
  if (grid.nx * grid.ny > max_cells) {
    throw std::runtime_error("build_grid: cell budget exceeded (" +
                             std::to_string(grid.nx * grid.ny) + " > " +
                             std::to_string(max_cells) + " cells)");
  }

  grid.values.resize(static_cast<std::size_t>(grid.nx * grid.ny));
  for (std::int64_t ix = 0; ix < grid.nx; ++ix) {
    for (std::int64_t iy = 0; iy < grid.ny; ++iy) {
      const Vec2 center = grid.origin + resolution * Vec2(static_cast<double>(ix),
                                                          static_cast<double>(iy));
      grid.values[static_cast<std::size_t>(ix * grid.ny + iy)] = sdf_union(shape, center);
    }
  }
  return grid;
}

struct SdfSample {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
};

/// Bilinear interpolation of the grid with the patch's analytic derivative.
/// Queries outside the lattice fall back to the analytic SDF.
inline SdfSample grid_query(const SdfGrid& grid, const RobotShape& shape, const Vec2& q_b) {
  if (!grid.contains(q_b)) {
    return {sdf_union(shape, q_b), sdf_gradient(shape, q_b)};
  }
  const Vec2 rel = (q_b - grid.origin) / grid.resolution;
  std::int64_t ix = std::min(static_cast<std::int64_t>(std::floor(rel.x())), grid.nx - 2);
  std::int64_t iy = std::min(static_cast<std::int64_t>(std::floor(rel.y())), grid.ny - 2);
  ix = std::max<std::int64_t>(ix, 0);
  iy = std::max<std::int64_t>(iy, 0);
  const double fx = rel.x() - static_cast<double>(ix);
  const double fy = rel.y() - static_cast<double>(iy);

  const double v00 = grid.at(ix, iy);
  const double v10 = grid.at(ix + 1, iy);
  const double v01 = grid.at(ix, iy + 1);
  const double v11 = grid.at(ix + 1, iy + 1);

  SdfSample out;
  out.value = v00 * (1.0 - fx) * (1.0 - fy) + v10 * fx * (1.0 - fy) +
              v01 * (1.0 - fx) * fy + v11 * fx * fy;
  out.gradient.x() = ((v10 - v00) * (1.0 - fy) + (v11 - v01) * fy) / grid.resolution;
  out.gradient.y() = ((v01 - v00) * (1.0 - fx) + (v11 - v10) * fx) / grid.resolution;
  return out;
}

// Flat binary cache: resolution, origin.x, origin.y as 64-bit floats, then
// nx, ny as 64-bit signed integers, then row-major 64-bit float values.
// Little-endian byte order throughout.
inline void save_grid(const SdfGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_grid: cannot open " + path);
  }
  auto put_f64 = [&out](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_i64 = [&out](std::int64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  put_f64(grid.resolution);
  put_f64(grid.origin.x());
  put_f64(grid.origin.y());
  put_i64(grid.nx);
  put_i64(grid.ny);
  out.write(reinterpret_cast<const char*>(grid.values.data()),
            static_cast<std::streamsize>(grid.values.size() * 8));
  if (!out) {
    throw std::runtime_error("save_grid: write failed for " + path);
  }
}

inline SdfGrid load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_grid: cannot open " + path);
  }
  auto get_f64 = [&in](double& v) { in.read(reinterpret_cast<char*>(&v), 8); };
  auto get_i64 = [&in](std::int64_t& v) { in.read(reinterpret_cast<char*>(&v), 8); };
  SdfGrid grid;
  get_f64(grid.resolution);
  get_f64(grid.origin.x());
  get_f64(grid.origin.y());
  get_i64(grid.nx);
  get_i64(grid.ny);
  if (!in || grid.nx < 2 || grid.ny < 2 || !(grid.resolution > 0.0)) {
    throw std::runtime_error("load_grid: malformed header in " + path);
  }
  grid.values.resize(static_cast<std::size_t>(grid.nx * grid.ny));
  in.read(reinterpret_cast<char*>(grid.values.data()),
          static_cast<std::streamsize>(grid.values.size() * 8));
  if (!in) {
    throw std::runtime_error("load_grid: truncated value block in " + path);
  }
  return grid;
}

/// Robot-frame signed distance field with an analytic path and an optional
/// precomputed grid accelerator. Immutable after construction; safe to share
/// across threads.
class SdfField {
 public:
  explicit SdfField(RobotShape shape, double gradient_step = kDefaultSdfStep)
      : shape_(std::move(shape)), step_(gradient_step) {
    check_step();
  }

  SdfField(RobotShape shape, SdfGrid grid, double gradient_step = kDefaultSdfStep)
      : shape_(std::move(shape)), grid_(std::move(grid)), step_(gradient_step) {
    check_step();
  }

  double value(const Vec2& q_b) const {
    if (grid_ && grid_->contains(q_b)) {
      return grid_query(*grid_, shape_, q_b).value;
    }
    return sdf_union(shape_, q_b);
  }

  SdfSample value_and_gradient(const Vec2& q_b) const {
    if (grid_ && grid_->contains(q_b)) {
      return grid_query(*grid_, shape_, q_b);
    }
    return {sdf_union(shape_, q_b), sdf_gradient(shape_, q_b, step_)};
  }

  Vec2 gradient(const Vec2& q_b) const { return value_and_gradient(q_b).gradient; }

  const RobotShape& shape() const { return shape_; }
  bool has_grid() const { return grid_.has_value(); }
  double gradient_step() const { return step_; }

 private:
  void check_step() const {
    if (!(step_ > 0.0)) {
      throw std::invalid_argument("SdfField: gradient step must be > 0");
    }
  }

  RobotShape shape_;
  std::optional<SdfGrid> grid_;
  double step_;
};

/// Obstacle boundary in the obstacle's local frame (centered at its position).
struct ObstacleShape {
  enum class Kind { Circle, Polygon };

  Kind kind = Kind::Circle;
  double radius = 0.0;
  std::vector<Vec2> vertices;  // polygon only, ordered boundary loop

  static ObstacleShape circle(double radius) {
    if (!(radius > 0.0)) {
      throw std::invalid_argument("ObstacleShape::circle: radius must be > 0");
    }
    ObstacleShape s;
    s.kind = Kind::Circle;
    s.radius = radius;
    return s;
  }

  static ObstacleShape polygon(std::vector<Vec2> verts) {
    if (verts.size() < 3) {
      throw std::invalid_argument("ObstacleShape::polygon: need at least 3 vertices");
    }
    for (const Vec2& v : verts) {
      if (!v.allFinite()) {
        throw std::invalid_argument("ObstacleShape::polygon: non-finite vertex");
      }
    }
    ObstacleShape s;
    s.kind = Kind::Polygon;
    s.vertices = std::move(verts);
    return s;
  }

  static ObstacleShape rectangle(double half_length, double half_width) {
    if (!(half_length > 0.0) || !(half_width > 0.0)) {
      throw std::invalid_argument("ObstacleShape::rectangle: half extents must be > 0");
    }
    return polygon({Vec2(half_length, half_width), Vec2(-half_length, half_width),
                    Vec2(-half_length, -half_width), Vec2(half_length, -half_width)});
  }
};

inline double point_segment_distance(const Vec2& q, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) {
    return (q - a).norm();
  }
  const double t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
  return (q - (a + t * ab)).norm();
}

/// Signed distance to an obstacle outline in its local frame (negative inside).
/// Polygons use even-odd containment, so non-convex loops are handled.
inline double sdf_obstacle(const ObstacleShape& shape, const Vec2& q_local) {
  if (shape.kind == ObstacleShape::Kind::Circle) {
    return q_local.norm() - shape.radius;
  }
  const std::vector<Vec2>& v = shape.vertices;
  double dist = std::numeric_limits<double>::infinity();
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    dist = std::min(dist, point_segment_distance(q_local, v[j], v[i]));
    const bool crosses = (v[i].y() > q_local.y()) != (v[j].y() > q_local.y());
    if (crosses) {
      const double x_int =
          v[j].x() + (q_local.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
      if (q_local.x() < x_int) {
        inside = !inside;
      }
    }
  }
  return inside ? -dist : dist;
}

/// Uniform arc-length boundary sampling: circles start at angle 0, polygons
/// walk the edge loop from vertex 0.
inline std::vector<Vec2> sample_boundary(const ObstacleShape& shape, int count) {
  if (count < 3) {
    throw std::invalid_argument("sample_boundary: need at least 3 points");
  }
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>(count));

  if (shape.kind == ObstacleShape::Kind::Circle) {
    for (int k = 0; k < count; ++k) {
      const double ang = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(count);
      points.emplace_back(shape.radius * std::cos(ang), shape.radius * std::sin(ang));
    }
    return points;
  }

  const std::vector<Vec2>& v = shape.vertices;
  std::vector<double> edge_len(v.size());
  double perimeter = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    edge_len[i] = (v[(i + 1) % v.size()] - v[i]).norm();
    perimeter += edge_len[i];
  }
  if (!(perimeter > 0.0)) {
    throw std::invalid_argument("sample_boundary: degenerate polygon (zero perimeter)");
  }

  std::vector<double> cum(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    cum[i + 1] = cum[i] + edge_len[i];
  }

  const double spacing = perimeter / static_cast<double>(count);
  for (int k = 0; k < count; ++k) {
    const double s = spacing * static_cast<double>(k);
    std::size_t e = 0;
    while (e + 1 < v.size() && s >= cum[e + 1]) {
      ++e;
    }
    const double local =
        edge_len[e] > 0.0 ? std::min((s - cum[e]) / edge_len[e], 1.0) : 0.0;
    const Vec2 a = v[e];
    const Vec2 b = v[(e + 1) % v.size()];
    points.push_back(a + local * (b - a));
  }
  return points;
}

inline std::vector<Vec2> sample_boundary(const Primitive& prim, int count) {
  if (prim.kind == Primitive::Kind::Circle) {
    ObstacleShape c = ObstacleShape::circle(prim.radius);
    std::vector<Vec2> pts = sample_boundary(c, count);
    for (Vec2& p : pts) {
      p += prim.offset;
    }
    return pts;
  }
  std::vector<Vec2> corners{
      prim.offset + Vec2(prim.half_length, prim.half_width),
      prim.offset + Vec2(-prim.half_length, prim.half_width),
      prim.offset + Vec2(-prim.half_length, -prim.half_width),
      prim.offset + Vec2(prim.half_length, -prim.half_width)};
  return sample_boundary(ObstacleShape::polygon(std::move(corners)), count);
}

/// World-frame collision points of one obstacle.
struct CollisionPointSet {
  int obstacle_id = 0;
  std::vector<Vec2> points;
};

}  // namespace rcnav
