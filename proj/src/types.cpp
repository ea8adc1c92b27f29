#include "impactlab/types.hpp"

#include <cmath>
#include <stdexcept>

#include "impactlab/errors.hpp"

namespace impactlab {

namespace {

// Proper segment intersection test, shared endpoints excluded by the caller.
bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const double v = (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
    if (v > 1e-15) return 1;
    if (v < -1e-15) return -1;
    return 0;
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

}  // namespace

BodyModel::BodyModel(double mass_, double inertia_, std::vector<Vec2> shape_)
    : mass(mass_), inertia(inertia_), shape(std::move(shape_)) {
  if (!(mass > 0.0)) throw std::invalid_argument("BodyModel: mass must be positive");
  if (!(inertia > 0.0)) throw std::invalid_argument("BodyModel: inertia must be positive");
  if (shape.size() < 3) throw std::invalid_argument("BodyModel: shape needs >= 3 vertices");
  if (!polygon_is_simple(shape))
    throw std::invalid_argument("BodyModel: shape polygon is self-intersecting");
}

double BodyModel::radius_of_gyration() const { return std::sqrt(inertia / mass); }

Mat3 BodyModel::generalized_inertia() const {
  Mat3 m = Mat3::Zero();
  m(0, 0) = mass;
  m(1, 1) = mass;
  m(2, 2) = inertia;
  return m;
}

Mat3 BodyModel::generalized_inertia_inverse() const {
  Mat3 m = Mat3::Zero();
  m(0, 0) = 1.0 / mass;
  m(1, 1) = 1.0 / mass;
  m(2, 2) = 1.0 / inertia;
  return m;
}

std::vector<Vec2> BodyModel::world_vertices(const Vec3& q) const {
  const double c = std::cos(q.z());
  const double s = std::sin(q.z());
  std::vector<Vec2> out;
  out.reserve(shape.size());
  for (const Vec2& p : shape) {
    out.emplace_back(q.x() + c * p.x() - s * p.y(), q.y() + s * p.x() + c * p.y());
  }
  return out;
}

double polygon_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Vec2 polygon_centroid(const std::vector<Vec2>& v) {
  const double a = polygon_area(v);
  const std::size_t n = v.size();
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    const double cr = p.x() * q.y() - q.x() * p.y();
    c += (p + q) * cr;
  }
  return c / (6.0 * a);
}

double polygon_second_moment(const std::vector<Vec2>& v_in) {
  const Vec2 c = polygon_centroid(v_in);
  std::vector<Vec2> v = v_in;
  for (Vec2& p : v) p -= c;
  const std::size_t n = v.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    const double cr = p.x() * q.y() - q.x() * p.y();
    acc += cr * (p.squaredNorm() + p.dot(q) + q.squaredNorm());
  }
  return acc / 12.0;
}

bool polygon_is_simple(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (they share an endpoint).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

BodyModel make_uniform_body(const std::vector<Vec2>& vertices, double mass) {
  std::vector<Vec2> v = vertices;
  double area = polygon_area(v);
  if (area < 0.0) {  // enforce CCW
    std::reverse(v.begin(), v.end());
    area = -area;
  }
  if (!(area > 0.0)) throw std::invalid_argument("make_uniform_body: degenerate polygon");
  const Vec2 c = polygon_centroid(v);
  for (Vec2& p : v) p -= c;
  const double density = mass / area;
  const double inertia = density * polygon_second_moment(v);
  return BodyModel(mass, inertia, std::move(v));
}

}  // namespace impactlab
