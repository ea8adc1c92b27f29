#pragma once

#include <vector>

#include "impactlab/dynamics.hpp"

namespace impactlab {

// The set of impulses that keep post-contact contact-space kinetic energy at
// or below the pre-contact value. alpha(p) is the energy fraction; the
// admissible region further requires a compressive normal impulse and a
// non-penetrating outcome.
struct EnergyEllipse {
  ContactFrame frame;
  double e0 = 0.0;                 // v_c' M_c v_c, pre-contact
  Vec2 stick_point = Vec2::Zero(); // -M_c v_c, arrests the contact point

  static EnergyEllipse from_frame(const ContactFrame& frame);
};

struct AdmissibilityReport {
  double alpha = 0.0;
  bool normal_impulse_ok = false;
  bool separation_ok = false;
  bool admissible = false;
};

// Energy fraction alpha(p); may exceed 1 for infeasible impulses.
// Throws ZeroIncomingVelocity when the pre-contact contact energy vanishes.
double energy_fraction(const EnergyEllipse& ellipse, const Impulse& p);

AdmissibilityReport is_admissible(const EnergyEllipse& ellipse, const Impulse& p,
                                  double tol = 1e-8);

// A line in impulse space, {p : normal . p = offset}, with unit normal.
struct LineSpec {
  Vec2 normal = Vec2::Zero();
  double offset = 0.0;

  Vec2 direction() const { return Vec2(-normal.y(), normal.x()); }
  Vec2 point_on() const { return normal * offset; }
};

// Impulses that zero the post-contact tangential velocity.
LineSpec line_of_sticking(const EnergyEllipse& ellipse);
// Impulses that zero the post-contact normal velocity.
LineSpec line_of_max_compression(const EnergyEllipse& ellipse);

// Admissible impulse that best explains `target_post_velocity`, in the
// rho-normalized velocity norm. Closed-form unconstrained solution with an
// active-set walk over the two clip lines and the ellipse boundary.
Impulse project_outcome(const EnergyEllipse& ellipse, const Vec3& target_post_velocity,
                        const BodyModel& body, const PlanarState& state);

enum class BoundaryTag { Ellipse, ClipNormalImpulse, ClipSeparation };

struct BoundaryPoint {
  Vec2 p = Vec2::Zero();
  BoundaryTag tag = BoundaryTag::Ellipse;
};

// Ordered closed polyline of the admissible region boundary: the alpha = 1
// arc clipped by p_n >= 0 and v_n_post >= 0. n controls arc resolution.
std::vector<BoundaryPoint> boundary_polyline(const EnergyEllipse& ellipse, int n);

// Shoelace area of a polyline (test and plotting helper).
double polyline_area(const std::vector<BoundaryPoint>& poly);

}  // namespace impactlab
