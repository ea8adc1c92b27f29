#include "impactlab/dynamics.hpp"

#include <cmath>

#include "impactlab/errors.hpp"

namespace impactlab {

ContactFrame build_contact_frame(const PlanarState& state, const BodyModel& body,
                                 const Vec2& contact_point) {
  ContactFrame f;
  f.contact_point = contact_point;

  const double rx = contact_point.x() - state.q.x();
  const double ry = contact_point.y() - state.q.y();
  f.jacobian << 1.0, 0.0, -ry,
                0.0, 1.0, rx;

  f.m_c_inv = f.jacobian * body.generalized_inertia_inverse() * f.jacobian.transpose();
  // Symmetrize away rounding before inverting.
  f.m_c_inv = 0.5 * (f.m_c_inv + f.m_c_inv.transpose()).eval();

  const double det = f.m_c_inv(0, 0) * f.m_c_inv(1, 1) - f.m_c_inv(0, 1) * f.m_c_inv(1, 0);
  const double tr = f.m_c_inv(0, 0) + f.m_c_inv(1, 1);
  if (!(det > 0.0) || !(tr > 0.0) || !std::isfinite(det))
    throw NonPositiveDefinite("build_contact_frame: contact compliance not SPD");
  f.m_c << f.m_c_inv(1, 1), -f.m_c_inv(0, 1),
           -f.m_c_inv(1, 0), f.m_c_inv(0, 0);
  f.m_c /= det;

  f.v_c = f.jacobian * state.v;
  return f;
}

PlanarState apply_impulse(const PlanarState& state, const BodyModel& body,
                          const ContactFrame& frame, const Impulse& p) {
  PlanarState out = state;
  const Vec3 gp = frame.jacobian.transpose() * p.vec();
  out.v += body.generalized_inertia_inverse() * gp;
  return out;
}

Vec2 contact_momentum(const ContactFrame& frame) { return frame.m_c * frame.v_c; }

}  // namespace impactlab
