#include "impactlab/contact_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "impactlab/errors.hpp"

namespace impactlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

void check_inputs(const ContactCoeffs& c, double mu, double eps) {
  if (!(c.v_n < 0.0))
    throw NotApproaching("predict: contact point is not approaching (v_n >= 0)");
  if (!(mu >= 0.0)) throw std::invalid_argument("predict: mu must be >= 0");
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("predict: eps must be in [0,1]");
}

// Impulse that carries the contact point from v_c to the given target.
void stick_to(const ContactCoeffs& c, double target_vt, double target_vn,
              double& p_t, double& p_n) {
  const double dt = target_vt - c.v_t;
  const double dn = target_vn - c.v_n;
  p_t = c.m_tt * dt + c.m_tn * dn;
  p_n = c.m_tn * dt + c.m_nn * dn;
}

// mu = 0: all hypotheses coincide; tangential impulse is identically zero and
// the tangential velocity follows the coupling freely.
ImpulsePrediction frictionless(const ContactCoeffs& c, double eps) {
  ImpulsePrediction r;
  r.p_t = 0.0;
  r.p_n = (1.0 + eps) * (-c.v_n) / c.a_nn;
  r.v_tf = c.v_t + c.a_tn * r.p_n;
  r.v_nf = -eps * c.v_n;
  r.mode = (c.v_t == 0.0 && c.a_tn == 0.0) ? ContactMode::Stick : ContactMode::Slide;
  r.compression_impulse = -c.v_n / c.a_nn;
  r.compression_work = -0.5 * c.v_n * c.v_n / c.a_nn;
  r.restitution_work = eps * eps * (-r.compression_work);
  return r;
}

// ---------------------------------------------------------------------------
// Anitescu-Potra with Newton restitution: v_nf = -eps v_n exactly, tangential
// impulse from impulse-level Coulomb complementarity (stick / slide), slip
// reversal clamped to stick.
ImpulsePrediction ap_newton_core(const ContactCoeffs& c, double mu, double eps) {
  ImpulsePrediction r;
  r.v_nf = -eps * c.v_n;

  double sp_t, sp_n;
  stick_to(c, 0.0, r.v_nf, sp_t, sp_n);
  const bool stick_ok = sp_n > 0.0 && std::abs(sp_t) <= mu * sp_n * (1.0 + 1e-12);
  if (stick_ok) {
    r.p_t = sp_t;
    r.p_n = sp_n;
    r.v_tf = 0.0;
    r.mode = ContactMode::Stick;
    return r;
  }

  auto try_slide = [&](double sig) -> bool {
    const double den = c.a_nn - mu * sig * c.a_tn;
    if (!(den > 0.0)) return false;
    const double pn = -(1.0 + eps) * c.v_n / den;
    if (!(pn >= 0.0)) return false;
    const double pt = -mu * sig * pn;
    const double vtf = c.v_t + c.a_tt * pt + c.a_tn * pn;
    if (!(sig * vtf > 0.0)) return false;
    r.p_t = pt;
    r.p_n = pn;
    r.v_tf = vtf;
    r.mode = ContactMode::Slide;
    return true;
  };

  if (c.v_t != 0.0) {
    if (try_slide(sgn(c.v_t))) return r;
  } else {
    if (try_slide(1.0) || try_slide(-1.0)) return r;
  }

  // Persisting slip is inconsistent and the cone cannot hold the stick:
  // clamp to the sticking line, keeping the restitution rule exact.
  r.p_t = sp_t;
  r.p_n = sp_n;
  r.v_tf = 0.0;
  r.mode = ContactMode::Stick;
  r.cone_violated = true;
  return r;
}

// ---------------------------------------------------------------------------
// Whittaker: Coulomb slide assumed throughout, solved together with Newton
// restitution; clamped to the line of sticking if the slip would reverse.
ImpulsePrediction whittaker_core(const ContactCoeffs& c, double mu, double eps) {
  ImpulsePrediction r;
  r.v_nf = -eps * c.v_n;

  const double sig = sgn(c.v_t);
  if (sig != 0.0) {
    const double den = c.a_nn - mu * sig * c.a_tn;
    if (den > 0.0) {
      const double pn = -(1.0 + eps) * c.v_n / den;
      const double pt = -mu * sig * pn;
      const double vtf = c.v_t + c.a_tt * pt + c.a_tn * pn;
      if (sig * vtf >= 0.0) {
        r.p_t = pt;
        r.p_n = pn;
        r.v_tf = vtf;
        r.mode = ContactMode::Slide;
        return r;
      }
    }
  } else {
    // No initial slip: the nonlinear system degenerates to the normal
    // restitution equation alone.
    r.p_t = 0.0;
    r.p_n = (1.0 + eps) * (-c.v_n) / c.a_nn;
    r.v_tf = c.v_t + c.a_tn * r.p_n;
    r.mode = (r.v_tf == 0.0) ? ContactMode::Stick : ContactMode::Slide;
    return r;
  }

  double sp_t, sp_n;
  stick_to(c, 0.0, r.v_nf, sp_t, sp_n);
  r.p_t = sp_t;
  r.p_n = sp_n;
  r.v_tf = 0.0;
  r.mode = ContactMode::Stick;
  r.cone_violated = !(sp_n > 0.0 && std::abs(sp_t) <= mu * sp_n * (1.0 + 1e-12));
  return r;
}

// ---------------------------------------------------------------------------
// Anitescu-Potra with Poisson restitution: algebraic compression phase to
// v_n = 0 under Coulomb complementarity, then a restitution normal impulse of
// eps times the compression impulse.
ImpulsePrediction app_core(const ContactCoeffs& c, double mu, double eps) {
  ImpulsePrediction r;

  // Compression: resolve to v_n = 0.
  double pc_t, pc_n;     // compression impulse
  double v_mct = 0.0;    // tangential velocity at max compression
  bool stuck = false;
  bool slid = false;
  bool clamped = false;

  double st_t, st_n;
  stick_to(c, 0.0, 0.0, st_t, st_n);
  const bool stick_ok = st_n > 0.0 && std::abs(st_t) <= mu * st_n * (1.0 + 1e-12);

  auto slide_comp = [&](double sig, double& out_pt, double& out_pn, double& out_vt) {
    const double den = c.a_nn - mu * sig * c.a_tn;
    if (!(den > 0.0)) return false;
    const double pn = -c.v_n / den;
    if (!(pn >= 0.0)) return false;
    const double pt = -mu * sig * pn;
    const double vt = c.v_t + c.a_tt * pt + c.a_tn * pn;
    if (!(sig * vt > 0.0)) return false;
    out_pt = pt;
    out_pn = pn;
    out_vt = vt;
    return true;
  };

  if (stick_ok) {
    pc_t = st_t;
    pc_n = st_n;
    stuck = true;
    slid = std::abs(c.v_t) > 0.0;
  } else {
    bool ok = false;
    if (c.v_t != 0.0) {
      ok = slide_comp(sgn(c.v_t), pc_t, pc_n, v_mct);
    } else {
      ok = slide_comp(1.0, pc_t, pc_n, v_mct) || slide_comp(-1.0, pc_t, pc_n, v_mct);
    }
    if (ok) {
      slid = true;
    } else {
      pc_t = st_t;
      pc_n = st_n;
      stuck = true;
      clamped = true;
      slid = std::abs(c.v_t) > 0.0;
    }
  }
  r.compression_impulse = pc_n;

  // Restitution: normal impulse eps * pc_n.
  const double dpn = eps * pc_n;
  const double a_eff = c.a_nn - c.a_tn * c.a_tn / c.a_tt;
  double dp_t = 0.0;
  double v_tf = 0.0, v_nf = 0.0;
  const double sig0 = sgn(c.v_t);

  if (dpn <= 0.0) {
    v_tf = v_mct;
    v_nf = 0.0;
  } else if (stuck) {
    const double hold = -(c.a_tn / c.a_tt) * dpn;
    if (std::abs(hold) <= mu * dpn * (1.0 + 1e-12)) {
      dp_t = hold;
      v_tf = 0.0;
      v_nf = a_eff * dpn;
    } else {
      // Slip restarts during restitution.
      const double sig_r = (c.a_tn > mu * c.a_tt) ? 1.0 : -1.0;
      if (sig0 != 0.0 && sig_r * sig0 < 0.0) {
        dp_t = hold;  // no back-spin: hold the stick beyond the cone
        v_tf = 0.0;
        v_nf = a_eff * dpn;
        clamped = true;
      } else {
        dp_t = -mu * sig_r * dpn;
        v_tf = c.a_tt * dp_t + c.a_tn * dpn;
        v_nf = c.a_tn * dp_t + c.a_nn * dpn;
      }
    }
  } else {
    // Still sliding at max compression.
    const double sig = sgn(v_mct);
    const double d_t = c.a_tn - mu * sig * c.a_tt;  // dv_t per unit normal impulse
    const double vt_end = v_mct + d_t * dpn;
    if (sig * vt_end >= 0.0) {
      dp_t = -mu * sig * dpn;
      v_tf = vt_end;
      v_nf = (c.a_nn - mu * sig * c.a_tn) * dpn;
    } else {
      // Slip stops partway through restitution; hold stick for the rest.
      const double s1 = -v_mct / d_t;
      const double s2 = dpn - s1;
      const double hold = -(c.a_tn / c.a_tt);
      dp_t = -mu * sig * s1 + hold * s2;
      v_tf = 0.0;
      v_nf = (c.a_nn - mu * sig * c.a_tn) * s1 + a_eff * s2;
      stuck = true;
      if (std::abs(hold) > mu * (1.0 + 1e-12)) clamped = true;
    }
  }

  r.p_t = pc_t + dp_t;
  r.p_n = pc_n + dpn;
  r.v_tf = v_tf;
  r.v_nf = v_nf;
  r.cone_violated = clamped;
  r.mode = (std::abs(v_tf) == 0.0 && (stuck || sig0 == 0.0))
               ? (slid ? ContactMode::SlideThenStick : ContactMode::Stick)
               : ContactMode::Slide;
  if (stick_ok && std::abs(c.v_t) == 0.0 && v_tf == 0.0) r.mode = ContactMode::Stick;
  return r;
}

// ---------------------------------------------------------------------------
// Drumwright-Shell: compression minimizes post-impulse contact-space kinetic
// energy on the max-compression line inside the cone; restitution fixes the
// normal impulse at eps * pc_n and picks the KE-minimizing tangential impulse
// in the cone box (the KE gradient in p_t is v_tf, so the target is the
// sticking point), guarded by non-penetration and no-back-spin.
ImpulsePrediction ds_core(const ContactCoeffs& c, double mu, double eps) {
  ImpulsePrediction r;
  const double sig0 = sgn(c.v_t);
  bool clamped = false;

  // Compression: points on {v_n(p) = 0} parameterized by p_t.
  auto pn_on_line = [&](double pt) { return (-c.v_n - c.a_tn * pt) / c.a_nn; };
  auto vt_on_line = [&](double pt) {
    return c.v_t + c.a_tt * pt + c.a_tn * pn_on_line(pt);
  };

  double st_t, st_n;
  stick_to(c, 0.0, 0.0, st_t, st_n);

  // Cone edges give the finite endpoints of the feasible p_t interval.
  double t_lo = -kInf, t_hi = kInf;
  for (double sig : {1.0, -1.0}) {
    const double den = c.a_nn - mu * sig * c.a_tn;
    if (den > 0.0) {
      const double pn = -c.v_n / den;
      const double pt = -mu * sig * pn;
      if (sig > 0.0) t_lo = pt; else t_hi = pt;
    }
  }
  if (t_lo > t_hi) std::swap(t_lo, t_hi);

  double pc_t = std::clamp(st_t, t_lo, t_hi);
  bool stuck = (pc_t == st_t) && st_n > 0.0;
  double v_mct = stuck ? 0.0 : vt_on_line(pc_t);
  if (sig0 != 0.0 && v_mct * sig0 < 0.0) {
    // Best cone point already crosses the sticking line: clamp.
    pc_t = st_t;
    v_mct = 0.0;
    stuck = true;
    clamped = true;
  }
  const double pc_n = stuck ? st_n : pn_on_line(pc_t);
  const bool slid = std::abs(c.v_t) > 0.0 || !stuck;
  r.compression_impulse = pc_n;

  // Restitution: 1-D KE minimization over dp_t.
  const double dpn = eps * pc_n;
  double dp_t = 0.0;
  double v_tf = v_mct, v_nf = 0.0;
  if (dpn > 0.0) {
    const double vt0 = v_mct + c.a_tn * dpn;  // v_tf at dp_t = 0
    const double opt = -vt0 / c.a_tt;          // zeroes v_tf (KE stationary point)
    double lo = -mu * dpn, hi = mu * dpn;
    // No back-spin: keep v_tf on the incoming-slip side.
    if (sig0 > 0.0) lo = std::max(lo, opt);
    if (sig0 < 0.0) hi = std::min(hi, opt);
    // Non-penetration: v_nf = a_tn dp_t + a_nn dpn >= 0.
    if (c.a_tn > 0.0) lo = std::max(lo, -c.a_nn * dpn / c.a_tn);
    if (c.a_tn < 0.0) hi = std::min(hi, -c.a_nn * dpn / c.a_tn);

    if (lo <= hi) {
      dp_t = std::clamp(opt, lo, hi);
    } else {
      dp_t = opt;  // guards conflict with the cone: hold the sticking line
      clamped = true;
    }
    v_tf = vt0 + c.a_tt * dp_t;
    v_nf = c.a_tn * dp_t + c.a_nn * dpn;
    if (std::abs(dp_t) > mu * dpn * (1.0 + 1e-12)) clamped = true;
  }

  r.p_t = pc_t + dp_t;
  r.p_n = pc_n + dpn;
  r.v_tf = v_tf;
  r.v_nf = v_nf;
  r.cone_violated = clamped;
  const bool final_stick = std::abs(v_tf) <= 0.0;
  r.mode = final_stick ? (slid ? ContactMode::SlideThenStick : ContactMode::Stick)
                       : ContactMode::Slide;
  if (final_stick && std::abs(c.v_t) == 0.0 && stuck) r.mode = ContactMode::Stick;
  return r;
}

// ---------------------------------------------------------------------------
// Exact Routh path-follower. The contact dynamics are linear in the normal
// impulse within a (slide/stick) segment, so each segment is closed form.
struct RouthPath {
  ImpulsePrediction pred;
  bool hit_max_steps = false;
};

ImpulsePrediction routh_exact(const ContactCoeffs& c, double mu,
                              RouthTermination term, double eps) {
  if (mu == 0.0) {
    ImpulsePrediction r = frictionless(c, eps);
    if (term == RouthTermination::MaxCompression) {
      r.p_n = r.compression_impulse;
      r.v_nf = 0.0;
      r.v_tf = c.v_t + c.a_tn * r.p_n;
      r.restitution_work = 0.0;
    }
    return r;
  }

  ImpulsePrediction r;
  double v_t = c.v_t, v_n = c.v_n;
  double p_t = 0.0, p_n = 0.0, w = 0.0;
  double p_mc = 0.0, w_c = 0.0;
  bool in_restitution = false;
  bool stuck = false;
  bool slid = false;

  // Direction of motion in impulse space per unit normal impulse.
  auto direction = [&]() -> double {
    if (stuck) {
      if (std::abs(c.a_tn) > mu * c.a_tt * (1.0 + 1e-12)) r.cone_violated = true;
      return -c.a_tn / c.a_tt;
    }
    if (v_t != 0.0) {
      slid = true;
      return -mu * sgn(v_t);
    }
    // Tangential rest at the start: stick if the cone holds, otherwise slip
    // develops in the coupling direction.
    if (std::abs(c.a_tn) <= mu * c.a_tt) {
      stuck = true;
      return -c.a_tn / c.a_tt;
    }
    slid = true;
    return -mu * sgn(c.a_tn);
  };

  const double w_goal_factor = eps * eps;
  for (int seg = 0; seg < 16; ++seg) {
    const double d_t = direction();
    const double dv_t = c.a_tt * d_t + c.a_tn;  // per unit normal impulse
    const double dv_n = c.a_tn * d_t + c.a_nn;

    // Candidate segment lengths (in normal impulse).
    double s_end = kInf;
    int end_kind = -1;  // 0: v_t -> 0, 1: v_n -> 0 (max compression), 2: terminate

    if (!stuck && v_t != 0.0 && dv_t * sgn(v_t) < 0.0) {
      const double s = -v_t / dv_t;
      if (s < s_end) { s_end = s; end_kind = 0; }
    }
    if (!in_restitution) {
      // dv_n > 0 guaranteed eventually; guard anyway.
      if (dv_n > 0.0) {
        const double s = -v_n / dv_n;
        if (s < s_end) { s_end = s; end_kind = 1; }
      }
    } else {
      if (term == RouthTermination::Poisson) {
        const double s = (1.0 + eps) * p_mc - p_n;
        if (s <= s_end) { s_end = std::max(s, 0.0); end_kind = 2; }
      } else {  // Energetic
        const double w_goal = w_goal_factor * (-w_c);
        const double w_rest = w - w_c;
        // Solve w_rest + v_n s + 0.5 dv_n s^2 = w_goal for the positive root.
        const double cc = w_rest - w_goal;
        if (dv_n > 0.0) {
          const double disc = v_n * v_n - 2.0 * dv_n * cc;
          if (disc >= 0.0) {
            const double s = (-v_n + std::sqrt(disc)) / dv_n;
            if (s >= 0.0 && s <= s_end) { s_end = s; end_kind = 2; }
          }
        } else if (v_n > 0.0) {
          const double s = -cc / v_n;
          if (s >= 0.0 && s <= s_end) { s_end = s; end_kind = 2; }
        }
      }
    }

    if (!std::isfinite(s_end) || end_kind < 0)
      throw NoConsistentBranch("routh: no terminating event found");

    // Advance exactly.
    w += v_n * s_end + 0.5 * dv_n * s_end * s_end;
    v_t += dv_t * s_end;
    v_n += dv_n * s_end;
    p_t += d_t * s_end;
    p_n += s_end;

    if (end_kind == 0) {
      v_t = 0.0;
      stuck = true;  // slip reversal clamped to stick
      continue;
    }
    if (end_kind == 1) {
      v_n = 0.0;
      p_mc = p_n;
      w_c = w;
      if (term == RouthTermination::MaxCompression || eps == 0.0) break;
      in_restitution = true;
      continue;
    }
    break;  // terminated
  }

  r.p_t = p_t;
  r.p_n = p_n;
  r.v_tf = v_t;
  r.v_nf = v_n;
  r.compression_impulse = p_mc;
  r.compression_work = w_c;
  r.restitution_work = w - w_c;
  const bool final_stick = (v_t == 0.0 && stuck);
  r.mode = final_stick ? (slid ? ContactMode::SlideThenStick : ContactMode::Stick)
                       : ContactMode::Slide;
  return r;
}

ImpulsePrediction predict_core(ModelId model, const ContactCoeffs& c, double mu,
                               double eps) {
  check_inputs(c, mu, eps);
  if (mu == 0.0) return frictionless(c, eps);
  switch (model) {
    case ModelId::ApNewton: return ap_newton_core(c, mu, eps);
    case ModelId::Whittaker: return whittaker_core(c, mu, eps);
    case ModelId::ApPoisson: return app_core(c, mu, eps);
    case ModelId::DrumwrightShell: return ds_core(c, mu, eps);
    case ModelId::Mirtich: return routh_exact(c, mu, RouthTermination::Energetic, eps);
    case ModelId::WangMason: return routh_exact(c, mu, RouthTermination::Poisson, eps);
  }
  throw std::invalid_argument("predict: unknown model");
}

ImpulseResult to_result(const ImpulsePrediction& p) {
  ImpulseResult r;
  r.impulse = Impulse{p.p_t, p.p_n};
  r.mode = p.mode;
  r.post_contact_velocity = Vec2(p.v_tf, p.v_nf);
  r.diagnostics["compression_impulse"] = p.compression_impulse;
  r.diagnostics["compression_work"] = p.compression_work;
  r.diagnostics["restitution_work"] = p.restitution_work;
  r.diagnostics["cone_violated"] = p.cone_violated ? 1.0 : 0.0;
  return r;
}

}  // namespace

const std::array<ModelId, 6>& all_models() {
  static const std::array<ModelId, 6> models = {
      ModelId::ApNewton,       ModelId::ApPoisson, ModelId::DrumwrightShell,
      ModelId::Mirtich,        ModelId::WangMason, ModelId::Whittaker,
  };
  return models;
}

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::ApNewton: return "ap_newton";
    case ModelId::ApPoisson: return "ap_poisson";
    case ModelId::DrumwrightShell: return "drumwright_shell";
    case ModelId::Mirtich: return "mirtich";
    case ModelId::WangMason: return "wang_mason";
    case ModelId::Whittaker: return "whittaker";
  }
  return "unknown";
}

ModelId model_from_string(const std::string& name) {
  for (ModelId id : all_models())
    if (to_string(id) == name) return id;
  throw std::invalid_argument("unknown model name: " + name);
}

std::string to_string(ContactMode mode) {
  switch (mode) {
    case ContactMode::Stick: return "stick";
    case ContactMode::Slide: return "slide";
    case ContactMode::SlideThenStick: return "slide_then_stick";
  }
  return "unknown";
}

ContactCoeffs ContactCoeffs::from_frame(const ContactFrame& f) {
  ContactCoeffs c;
  c.a_tt = f.m_c_inv(0, 0);
  c.a_tn = f.m_c_inv(0, 1);
  c.a_nn = f.m_c_inv(1, 1);
  c.m_tt = f.m_c(0, 0);
  c.m_tn = f.m_c(0, 1);
  c.m_nn = f.m_c(1, 1);
  c.v_t = f.v_c.x();
  c.v_n = f.v_c.y();
  return c;
}

ImpulsePrediction predict_impulse(ModelId model, const ContactCoeffs& c, double mu,
                                  double eps) {
  return predict_core(model, c, mu, eps);
}

ImpulseResult predict(ModelId model, const ContactFrame& frame, const ModelParams& params) {
  return to_result(predict_core(model, ContactCoeffs::from_frame(frame), params.mu,
                                params.eps));
}

ImpulseResult ap_newton(const ContactFrame& f, const ModelParams& p) {
  return predict(ModelId::ApNewton, f, p);
}
ImpulseResult ap_poisson(const ContactFrame& f, const ModelParams& p) {
  return predict(ModelId::ApPoisson, f, p);
}
ImpulseResult drumwright_shell(const ContactFrame& f, const ModelParams& p) {
  return predict(ModelId::DrumwrightShell, f, p);
}
ImpulseResult mirtich(const ContactFrame& f, const ModelParams& p) {
  return predict(ModelId::Mirtich, f, p);
}
ImpulseResult wang_mason(const ContactFrame& f, const ModelParams& p) {
  return predict(ModelId::WangMason, f, p);
}
ImpulseResult whittaker(const ContactFrame& f, const ModelParams& p) {
  return predict(ModelId::Whittaker, f, p);
}

ImpulseResult routh_integrate(const ContactFrame& frame, double mu,
                              RouthTermination term, double eps, double step) {
  const ContactCoeffs c = ContactCoeffs::from_frame(frame);
  check_inputs(c, mu, eps);
  if (!(step > 0.0)) throw std::invalid_argument("routh_integrate: step must be > 0");
  if (mu == 0.0 && c.a_tn == 0.0) {
    // fully decoupled; fall through to the generic loop anyway
  }

  ImpulsePrediction r;
  double v_t = c.v_t, v_n = c.v_n;
  double p_t = 0.0, p_n = 0.0, w = 0.0;
  double p_mc = 0.0, w_c = 0.0;
  bool in_restitution = false;
  bool stuck = (mu > 0.0 && v_t == 0.0 && std::abs(c.a_tn) <= mu * c.a_tt);
  bool slid = false;

  const long max_steps = 20'000'000;
  long steps = 0;
  while (true) {
    if (++steps > max_steps)
      throw StepTooCoarse("routh_integrate: step budget exhausted");

    double d_t;
    if (mu == 0.0) {
      d_t = 0.0;
      slid = v_t != 0.0 || c.a_tn != 0.0;
    } else if (stuck) {
      d_t = -c.a_tn / c.a_tt;
      if (std::abs(c.a_tn) > mu * c.a_tt * (1.0 + 1e-12)) r.cone_violated = true;
    } else if (v_t != 0.0) {
      d_t = -mu * sgn(v_t);
      slid = true;
    } else {
      d_t = -mu * sgn(c.a_tn);
      slid = true;
    }
    const double dv_t = c.a_tt * d_t + c.a_tn;
    const double dv_n = c.a_tn * d_t + c.a_nn;

    double h = step;
    bool stick_event = false;
    bool mc_event = false;

    // Event location inside the step by bisection (64 iterations max).
    if (mu > 0.0 && !stuck && v_t != 0.0) {
      const double vt_end = v_t + dv_t * h;
      if (vt_end == 0.0 || (vt_end > 0.0) != (v_t > 0.0)) {
        double lo = 0.0, hi = h;
        int it = 0;
        for (; it < 64; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double v = v_t + dv_t * mid;
          if (v == 0.0) { lo = hi = mid; break; }
          if ((v > 0.0) == (v_t > 0.0)) lo = mid; else hi = mid;
        }
        if (it >= 64 && std::abs(v_t + dv_t * hi) > 1e-9 * std::max(1.0, std::abs(c.v_t)))
          throw StepTooCoarse("routh_integrate: tangential event location failed");
        h = hi;
        stick_event = true;
      }
    }
    if (!in_restitution) {
      const double vn_end = v_n + dv_n * h;
      if (vn_end >= 0.0) {
        double lo = 0.0, hi = h;
        int it = 0;
        for (; it < 64; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (v_n + dv_n * mid < 0.0) lo = mid; else hi = mid;
        }
        if (it >= 64 && std::abs(v_n + dv_n * hi) > 1e-9 * std::abs(c.v_n))
          throw StepTooCoarse("routh_integrate: normal event location failed");
        if (hi < h) {
          h = hi;
          mc_event = true;
          stick_event = false;
        } else {
          mc_event = true;
        }
      }
    }

    // Rectangle-rule work accumulation (deliberately first order).
    w += v_n * h;
    v_t += dv_t * h;
    v_n += dv_n * h;
    p_t += d_t * h;
    p_n += h;

    if (stick_event) {
      v_t = 0.0;
      stuck = mu > 0.0;
      continue;
    }
    if (mc_event) {
      v_n = std::max(v_n, 0.0);
      p_mc = p_n;
      w_c = w;
      if (term == RouthTermination::MaxCompression || eps == 0.0) break;
      in_restitution = true;
      continue;
    }
    if (in_restitution) {
      if (term == RouthTermination::Poisson) {
        if (p_n >= (1.0 + eps) * p_mc) break;
      } else {
        if (w - w_c >= eps * eps * (-w_c)) break;
      }
    }
  }

  r.p_t = p_t;
  r.p_n = p_n;
  r.v_tf = v_t;
  r.v_nf = v_n;
  r.compression_impulse = p_mc;
  r.compression_work = w_c;
  r.restitution_work = w - w_c;
  const bool final_stick = (v_t == 0.0 && stuck);
  r.mode = final_stick ? (slid ? ContactMode::SlideThenStick : ContactMode::Stick)
                       : ContactMode::Slide;
  return to_result(r);
}

double mu_s(ModelId model, const ContactFrame& frame, double eps, double mu_max) {
  const ContactCoeffs c = ContactCoeffs::from_frame(frame);
  if (!(c.v_n < 0.0))
    throw NotApproaching("mu_s: contact point is not approaching");
  if (c.v_t == 0.0) return 0.0;

  auto sticks = [&](double mu) {
    const ImpulsePrediction p = predict_core(model, c, mu, eps);
    return p.mode == ContactMode::Stick || p.mode == ContactMode::SlideThenStick;
  };
  if (!sticks(mu_max)) return kInf;
  double lo = 0.0, hi = mu_max;
  for (int i = 0; i < 64 && hi - lo > 1e-7; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (sticks(mid)) hi = mid; else lo = mid;
  }
  return hi;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a == b; }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

RegionTrace region_trace(ModelId model, const ContactFrame& frame, int n_mu, int n_eps,
                         double mu_max) {
  if (n_mu < 8 || n_eps < 8)
    throw std::invalid_argument("region_trace: grid must be at least 8x8");
  const ContactCoeffs c = ContactCoeffs::from_frame(frame);
  RegionTrace out;
  out.points.reserve(static_cast<std::size_t>(n_mu) * n_eps);
  std::vector<Vec2> pts;
  for (int j = 0; j < n_eps; ++j) {
    const double eps = static_cast<double>(j) / (n_eps - 1);
    const double cap = std::min(mu_s(model, frame, eps, mu_max), mu_max);
    for (int i = 0; i < n_mu; ++i) {
      const double mu = cap * static_cast<double>(i) / (n_mu - 1);
      const ImpulsePrediction p = predict_core(model, c, mu, eps);
      out.points.push_back({mu, eps, Impulse{p.p_t, p.p_n}});
      pts.emplace_back(p.p_t, p.p_n);
    }
  }
  out.hull = convex_hull(std::move(pts));
  return out;
}

}  // namespace impactlab
