#pragma once

#include "impactlab/types.hpp"

namespace impactlab {

// Contact-frame impulse. Tangential axis is world +x, normal is world +y.
struct Impulse {
  double p_t = 0.0;  // N s
  double p_n = 0.0;  // N s

  Vec2 vec() const { return Vec2(p_t, p_n); }
  static Impulse from(const Vec2& v) { return Impulse{v.x(), v.y()}; }
};

// Everything the impact models need about one contact: the point, the
// velocity map J, the contact-space compliance J M^-1 J' and its inverse,
// and the pre-contact contact-point velocity.
struct ContactFrame {
  Vec2 contact_point = Vec2::Zero();        // world frame
  Eigen::Matrix<double, 2, 3> jacobian;     // rows: tangential, normal
  Mat2 m_c_inv = Mat2::Zero();              // contact-space compliance
  Mat2 m_c = Mat2::Zero();                  // contact-space inertia
  Vec2 v_c = Vec2::Zero();                  // (v_t, v_n) pre-contact

  double v_t() const { return v_c.x(); }
  double v_n() const { return v_c.y(); }
};

// Frame for a body in `state` touching the fixed horizontal surface at
// `contact_point`. Throws NonPositiveDefinite for degenerate parameters.
ContactFrame build_contact_frame(const PlanarState& state, const BodyModel& body,
                                 const Vec2& contact_point);

// Instantaneous impulse application: q and t unchanged, v += M^-1 J' p.
PlanarState apply_impulse(const PlanarState& state, const BodyModel& body,
                          const ContactFrame& frame, const Impulse& p);

// Pre-contact momentum measured at the contact point, M_c v_c.
Vec2 contact_momentum(const ContactFrame& frame);

}  // namespace impactlab
