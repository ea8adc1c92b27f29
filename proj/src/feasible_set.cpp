#include "impactlab/feasible_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "impactlab/errors.hpp"

namespace impactlab {

namespace {

constexpr double kEnergyFloor = 1e-15;

double quad_form(const Mat2& m, const Vec2& v) { return v.dot(m * v); }

void require_impact(const EnergyEllipse& e) {
  if (e.e0 < kEnergyFloor)
    throw ZeroIncomingVelocity("feasible-set: pre-contact contact energy below 1e-15");
}

// Roots of a*cos(phi) + b*sin(phi) + c = 0 in [0, 2*pi).
std::vector<double> trig_roots(double a, double b, double c) {
  const double r = std::hypot(a, b);
  std::vector<double> out;
  if (r < 1e-300) return out;
  const double q = -c / r;
  if (q < -1.0 || q > 1.0) return out;
  const double delta = std::atan2(b, a);
  const double acq = std::acos(std::clamp(q, -1.0, 1.0));
  for (double phi : {delta + acq, delta - acq}) {
    phi = std::fmod(phi, 2.0 * M_PI);
    if (phi < 0.0) phi += 2.0 * M_PI;
    out.push_back(phi);
  }
  return out;
}

}  // namespace

EnergyEllipse EnergyEllipse::from_frame(const ContactFrame& frame) {
  EnergyEllipse e;
  e.frame = frame;
  e.e0 = quad_form(frame.m_c, frame.v_c);
  e.stick_point = -(frame.m_c * frame.v_c);
  return e;
}

double energy_fraction(const EnergyEllipse& ellipse, const Impulse& p) {
  require_impact(ellipse);
  const Vec2 v_cf = ellipse.frame.v_c + ellipse.frame.m_c_inv * p.vec();
  return quad_form(ellipse.frame.m_c, v_cf) / ellipse.e0;
}

AdmissibilityReport is_admissible(const EnergyEllipse& ellipse, const Impulse& p,
                                  double tol) {
  AdmissibilityReport r;
  r.alpha = energy_fraction(ellipse, p);
  r.normal_impulse_ok = p.p_n >= -tol;
  const double v_nf = ellipse.frame.v_n() +
                      (ellipse.frame.m_c_inv.row(1) * p.vec()).value();
  r.separation_ok = v_nf >= -tol;
  r.admissible = r.normal_impulse_ok && r.separation_ok && r.alpha <= 1.0 + tol;
  return r;
}

LineSpec line_of_sticking(const EnergyEllipse& ellipse) {
  const Vec2 row = ellipse.frame.m_c_inv.row(0);
  const double norm = row.norm();
  return LineSpec{row / norm, -ellipse.frame.v_t() / norm};
}

LineSpec line_of_max_compression(const EnergyEllipse& ellipse) {
  const Vec2 row = ellipse.frame.m_c_inv.row(1);
  const double norm = row.norm();
  return LineSpec{row / norm, -ellipse.frame.v_n() / norm};
}

namespace {

// Quadratic cost q(p) = (d - B p)' W (d - B p) expanded around H, g.
struct ProjectionCost {
  Mat2 h;     // B' W B
  Vec2 g;     // B' W d
  double c0;  // d' W d

  double eval(const Vec2& p) const { return p.dot(h * p) - 2.0 * g.dot(p) + c0; }
};

struct FeasibilityGeom {
  Vec2 row_n;          // normal row of M_c^-1
  double v_n;          // incoming normal velocity
  Mat2 a;              // M_c^-1
  Vec2 center;         // stick point
  double e0;

  bool feasible(const Vec2& p, double tol) const {
    if (p.y() < -tol) return false;
    if (v_n + row_n.dot(p) < -tol) return false;
    const Vec2 d = p - center;
    return d.dot(a * d) <= e0 * (1.0 + 4.0 * tol);
  }
};

}  // namespace

Impulse project_outcome(const EnergyEllipse& ellipse, const Vec3& target_post_velocity,
                        const BodyModel& body, const PlanarState& state) {
  require_impact(ellipse);
  const ContactFrame& f = ellipse.frame;

  Eigen::Matrix<double, 3, 2> b = body.generalized_inertia_inverse() * f.jacobian.transpose();
  const double rho = body.radius_of_gyration();
  Vec3 w(1.0, 1.0, rho * rho);
  const Vec3 d = target_post_velocity - state.v;

  ProjectionCost cost;
  cost.h = b.transpose() * w.asDiagonal() * b;
  cost.g = b.transpose() * w.asDiagonal() * d;
  cost.c0 = d.dot(w.asDiagonal() * d);

  FeasibilityGeom geom{f.m_c_inv.row(1), f.v_n(), f.m_c_inv, ellipse.stick_point,
                       ellipse.e0};

  const double feas_tol = 1e-11 * std::max(1.0, ellipse.stick_point.norm());
  std::vector<Vec2> candidates;

  // Unconstrained optimum.
  candidates.push_back(cost.h.ldlt().solve(cost.g));

  // Minimum on the clip line p_n = 0.
  if (cost.h(0, 0) > 0.0) candidates.emplace_back(cost.g.x() / cost.h(0, 0), 0.0);

  // Minimum on the separation line row_n . p = -v_n.
  {
    const Vec2 n = geom.row_n;
    const Vec2 p0 = n * (-geom.v_n / n.squaredNorm());
    const Vec2 dir(-n.y(), n.x());
    const double denom = dir.dot(cost.h * dir);
    if (denom > 0.0) {
      const double s = dir.dot(cost.g - cost.h * p0) / denom;
      candidates.push_back(p0 + s * dir);
    }
  }

  // Vertex: p_n = 0 with v_n_post = 0.
  if (std::abs(geom.row_n.x()) > 1e-300)
    candidates.emplace_back(-geom.v_n / geom.row_n.x(), 0.0);

  // Ellipse boundary parameterization p(phi) = center + sqrt(e0) * Linv' u(phi).
  const Eigen::LLT<Mat2> llt(f.m_c_inv);
  const Mat2 l = llt.matrixL();
  const Mat2 linv_t = l.transpose().inverse();
  const double scale = std::sqrt(ellipse.e0);
  auto on_ellipse = [&](double phi) -> Vec2 {
    return ellipse.stick_point + scale * (linv_t * Vec2(std::cos(phi), std::sin(phi)));
  };

  // Vertices: ellipse intersected with each clip line (exact trig roots).
  {
    const Vec2 ct = scale * linv_t.row(0).transpose();
    const Vec2 cn = scale * linv_t.row(1).transpose();
    // p_n(phi) = center_n + cn_x cos + cn_y sin = 0
    for (double phi : trig_roots(cn.x(), cn.y(), ellipse.stick_point.y()))
      candidates.push_back(on_ellipse(phi));
    // v_n + row_n . p(phi) = 0
    const double a0 = geom.row_n.x() * ct.x() + geom.row_n.y() * cn.x();
    const double b0 = geom.row_n.x() * ct.y() + geom.row_n.y() * cn.y();
    const double c0 = geom.v_n + geom.row_n.dot(ellipse.stick_point);
    for (double phi : trig_roots(a0, b0, c0)) candidates.push_back(on_ellipse(phi));
  }

  // Interior minima on the ellipse arc: coarse scan plus golden-section.
  {
    const int n_scan = 720;
    double best_phi = 0.0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_scan; ++i) {
      const double phi = 2.0 * M_PI * i / n_scan;
      const Vec2 p = on_ellipse(phi);
      if (!geom.feasible(p, feas_tol)) continue;
      const double v = cost.eval(p);
      if (v < best_val) {
        best_val = v;
        best_phi = phi;
      }
    }
    if (std::isfinite(best_val)) {
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double lo = best_phi - 2.0 * M_PI / n_scan;
      double hi = best_phi + 2.0 * M_PI / n_scan;
      auto pen = [&](double phi) {
        const Vec2 p = on_ellipse(phi);
        if (!geom.feasible(p, feas_tol)) return std::numeric_limits<double>::infinity();
        return cost.eval(p);
      };
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = pen(x1), f2 = pen(x2);
      for (int it = 0; it < 120; ++it) {
        if (f1 < f2) {
          hi = x2; x2 = x1; f2 = f1;
          x1 = hi - gr * (hi - lo); f1 = pen(x1);
        } else {
          lo = x1; x1 = x2; f1 = f2;
          x2 = lo + gr * (hi - lo); f2 = pen(x2);
        }
      }
      candidates.push_back(on_ellipse(0.5 * (lo + hi)));
    }
  }

  double best = std::numeric_limits<double>::infinity();
  Vec2 best_p = Vec2::Zero();
  bool found = false;
  for (const Vec2& p : candidates) {
    if (!p.allFinite() || !geom.feasible(p, feas_tol)) continue;
    const double v = cost.eval(p);
    if (v < best) {
      best = v;
      best_p = p;
      found = true;
    }
  }
  if (!found) {
    // Frictionless maximum compression is always admissible.
    best_p = Vec2(0.0, -geom.v_n / f.m_c_inv(1, 1));
  }
  return Impulse::from(best_p);
}

std::vector<BoundaryPoint> boundary_polyline(const EnergyEllipse& ellipse, int n) {
  if (n < 16) throw std::invalid_argument("boundary_polyline: n must be >= 16");
  require_impact(ellipse);
  const ContactFrame& f = ellipse.frame;

  const Eigen::LLT<Mat2> llt(f.m_c_inv);
  const Mat2 l = llt.matrixL();
  const Mat2 linv_t = l.transpose().inverse();
  const double scale = std::sqrt(ellipse.e0);

  std::vector<BoundaryPoint> poly;
  poly.reserve(static_cast<std::size_t>(n) + 8);
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * M_PI * i / n;
    BoundaryPoint bp;
    bp.p = ellipse.stick_point + scale * (linv_t * Vec2(std::cos(phi), std::sin(phi)));
    bp.tag = BoundaryTag::Ellipse;
    poly.push_back(bp);
  }

  // Sutherland-Hodgman clip against each admissibility half-plane.
  struct Clip {
    Vec2 normal;
    double offset;  // keep normal . p >= offset
    BoundaryTag tag;
  };
  const Clip clips[2] = {
      {Vec2(0.0, 1.0), 0.0, BoundaryTag::ClipNormalImpulse},
      {Vec2(f.m_c_inv(1, 0), f.m_c_inv(1, 1)), -f.v_n(), BoundaryTag::ClipSeparation},
  };
  for (const Clip& c : clips) {
    std::vector<BoundaryPoint> out;
    out.reserve(poly.size() + 2);
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
      const BoundaryPoint& cur = poly[i];
      const BoundaryPoint& nxt = poly[(i + 1) % m];
      const double dc = c.normal.dot(cur.p) - c.offset;
      const double dn = c.normal.dot(nxt.p) - c.offset;
      if (dc >= 0.0) out.push_back(cur);
      if ((dc >= 0.0) != (dn >= 0.0)) {
        const double t = dc / (dc - dn);
        BoundaryPoint bp;
        bp.p = cur.p + t * (nxt.p - cur.p);
        bp.tag = c.tag;
        out.push_back(bp);
      }
    }
    poly = std::move(out);
    if (poly.empty()) break;
  }
  return poly;
}

double polyline_area(const std::vector<BoundaryPoint>& poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i].p;
    const Vec2& q = poly[(i + 1) % n].p;
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::abs(a);
}

}  // namespace impactlab
