#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "impactlab/dynamics.hpp"

namespace impactlab {

inline constexpr double kDefaultMuMax = 2.0;

// Friction / restitution pair shared by every model.
struct ModelParams {
  double mu = 0.0;   // >= 0
  double eps = 0.0;  // in [0, 1]
};

enum class ModelId {
  ApNewton,
  ApPoisson,
  DrumwrightShell,
  Mirtich,
  WangMason,
  Whittaker,
};

const std::array<ModelId, 6>& all_models();
std::string to_string(ModelId id);
ModelId model_from_string(const std::string& name);  // throws std::invalid_argument

enum class ContactMode { Stick, Slide, SlideThenStick };
std::string to_string(ContactMode mode);

// Frame data reduced to the scalars the models consume. Cached per event so
// batch parameter sweeps stay allocation-free.
struct ContactCoeffs {
  double a_tt = 0.0, a_tn = 0.0, a_nn = 0.0;  // M_c^-1
  double m_tt = 0.0, m_tn = 0.0, m_nn = 0.0;  // M_c
  double v_t = 0.0, v_n = 0.0;

  static ContactCoeffs from_frame(const ContactFrame& frame);
};

// Lean prediction record for grid oracles and fitting loops.
struct ImpulsePrediction {
  double p_t = 0.0, p_n = 0.0;
  double v_tf = 0.0, v_nf = 0.0;
  ContactMode mode = ContactMode::Slide;
  bool cone_violated = false;  // no-back-spin clamp exceeded the friction cone
  double compression_impulse = 0.0;
  double compression_work = 0.0;   // normal work during compression, <= 0
  double restitution_work = 0.0;   // normal work after max compression, >= 0
};

// Allocation-free model evaluation. Preconditions as predict().
ImpulsePrediction predict_impulse(ModelId model, const ContactCoeffs& c, double mu,
                                  double eps);

struct ImpulseResult {
  Impulse impulse;
  ContactMode mode = ContactMode::Slide;
  Vec2 post_contact_velocity = Vec2::Zero();
  std::map<std::string, double> diagnostics;
};

// Dispatch to the named model. Throws NotApproaching when v_n >= 0.
ImpulseResult predict(ModelId model, const ContactFrame& frame, const ModelParams& params);

ImpulseResult ap_newton(const ContactFrame& frame, const ModelParams& params);
ImpulseResult ap_poisson(const ContactFrame& frame, const ModelParams& params);
ImpulseResult drumwright_shell(const ContactFrame& frame, const ModelParams& params);
ImpulseResult mirtich(const ContactFrame& frame, const ModelParams& params);
ImpulseResult wang_mason(const ContactFrame& frame, const ModelParams& params);
ImpulseResult whittaker(const ContactFrame& frame, const ModelParams& params);

enum class RouthTermination { MaxCompression, Poisson, Energetic };

// Fixed-step incremental (Routh-style) integrator in normal-impulse
// increments. Slip reversal is clamped to stick; work is accumulated with a
// rectangle rule and termination is checked at step boundaries, so the
// impulse error is O(step) against the exact piecewise-linear solution.
ImpulseResult routh_integrate(const ContactFrame& frame, double mu,
                              RouthTermination termination, double eps, double step);

// Smallest friction coefficient for which the model predicts sticking at this
// impact state, to 1e-6; +inf when nothing at or below mu_max sticks.
double mu_s(ModelId model, const ContactFrame& frame, double eps,
            double mu_max = kDefaultMuMax);

struct RegionTrace {
  struct Sample {
    double mu = 0.0, eps = 0.0;
    Impulse p;
  };
  std::vector<Sample> points;
  std::vector<Vec2> hull;  // convex hull of the impulses, CCW
};

// Predictions over the (mu, eps) box [0, mu_s] x [0, 1] plus their hull.
RegionTrace region_trace(ModelId model, const ContactFrame& frame, int n_mu, int n_eps,
                         double mu_max = kDefaultMuMax);

std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

}  // namespace impactlab
