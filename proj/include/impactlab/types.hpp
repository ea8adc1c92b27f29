#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace impactlab {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Rigid planar body: mass, out-of-plane inertia about the COM, and a closed
// polygon in the body (COM) frame. The polygon is contact geometry; the
// impact math itself only ever sees one contact point.
struct BodyModel {
  double mass = 0.0;                 // kg
  double inertia = 0.0;              // kg m^2, about COM
  std::vector<Vec2> shape;           // body-frame vertices, CCW, >= 3

  BodyModel() = default;
  BodyModel(double mass, double inertia, std::vector<Vec2> shape);

  double radius_of_gyration() const;       // sqrt(I/m)
  Mat3 generalized_inertia() const;        // diag(m, m, I)
  Mat3 generalized_inertia_inverse() const;

  // Vertex positions in the world frame for configuration q = (x, y, theta).
  std::vector<Vec2> world_vertices(const Vec3& q) const;
};

// Uniform-density body from a polygon: mass fixed, inertia from the geometry,
// vertices re-centred on the centroid.
BodyModel make_uniform_body(const std::vector<Vec2>& vertices, double mass);

// Signed polygon area (positive for CCW).
double polygon_area(const std::vector<Vec2>& vertices);
Vec2 polygon_centroid(const std::vector<Vec2>& vertices);
// Second moment about the centroid per unit density.
double polygon_second_moment(const std::vector<Vec2>& vertices);
bool polygon_is_simple(const std::vector<Vec2>& vertices);

// Configuration and generalized velocity of the falling body.
struct PlanarState {
  Vec3 q = Vec3::Zero();  // x [m], y [m], theta [rad]
  Vec3 v = Vec3::Zero();  // vx, vy [m/s], omega [rad/s]
  double t = 0.0;         // s
};

}  // namespace impactlab
