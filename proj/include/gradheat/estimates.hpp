#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradheat/params.hpp"
#include "gradheat/solver.hpp"

namespace gradheat::estimates {

/// Closed-form gradient-bound envelopes, one per estimate regime.
enum class BoundTemplate {
  Subcritical,          // R^{-1} + R^{-1/(q-1)} + t^{-1/q}
  Critical,             // b·(R^{-1} + R^{-(p+1)/(p-1)} + t^{-(p+1)/(2p)})
  SupercriticalGeneral, // M-terms + R^{-1/(q-1)} + t^{-1/(2(q-1))}
  SupercriticalLarge,   // R^{-1/(q-1)} + t^{-1/(2(q-1))}
  Universal,            // d_P^{-2/(p-1)} (handled by universal_bound_check)
};

std::string to_string(BoundTemplate t);

/// The constant C(N,p,q) pinned by the subcritical proof:
/// ((q-1)/q)(6p)^{q/(q-1)} (2N/(q(q-1)))^{1/(q-1)}.
double proof_constant(int dim, double p, double q);

/// Amplitude ceiling c_{N,p,q} M^{2/(2p-(p+1)q)} for the subcritical
/// hypotheses; c defaults to (2N·C(N,p,q)/(q-1))^{(q-1)/((p+1)q-2p)} and can
/// be overridden from configuration.
double amplitude_threshold(const ProblemParams& params,
                           std::optional<double> c_override = {});

/// Lower floor c_{N,p,q}(M^{-2/((p+1)q-2p)} + τ^{1/p}) for the
/// large-solution supercritical estimate.
double lower_threshold(const ProblemParams& params, double tau,
                       std::optional<double> c_override = {});

/// Envelope value at (R, t).  Throws std::invalid_argument for Universal
/// (that bound is not an (R, t) form) and for t ≤ 0.
double envelope(BoundTemplate t, const ProblemParams& params, double radius,
                double time, double b = 1.0, double tau = 0.0);

struct HypothesisReport {
  BoundTemplate tmpl = BoundTemplate::Subcritical;
  bool regime_ok = false;      // (p, q) regime matches the template
  bool coefficient_ok = true;  // e.g. M ≥ M₀ for the critical estimate
  bool bound_pass = true;      // amplitude ceiling / floor per template
  double bound_threshold = 0.0;
  double bound_margin = 0.0;   // ceiling − max u (or min u − floor)
  double monotonicity_max = 0.0;  // max discrete u_t, inner cylinder, t ≥ dt
  bool monotone_pass = true;      // monotonicity_max ≤ τ (+ tolerance)
  double tau = 0.0;

  bool pass() const {
    return regime_ok && coefficient_ok && bound_pass && monotone_pass;
  }
};

/// Evaluates the template's standing hypotheses on a finished run: amplitude
/// bounds over all snapshots with t ≥ dt, time-monotonicity over the inner
/// cylinder.  `b` is the critical-case ceiling, `tau` the u_t cap.
HypothesisReport check_hypotheses(const Trajectory& traj, BoundTemplate tmpl,
                                  double tau = 0.0, double b = 1.0,
                                  std::optional<double> c_override = {});

/// Least-squares slope of log(y) against log(x); r2 is the usual coefficient
/// of determination.  Requires at least two strictly positive samples.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  int points = 0;
};

SlopeFit fit_log_slope(const std::vector<double>& xs,
                       const std::vector<double>& ys);

struct EstimateReport {
  BoundTemplate tmpl = BoundTemplate::Subcritical;
  double fitted_c = 0.0;       // smallest C making the bound hold
  long violations_at_fit = 0;  // recount at fitted C (0 by construction)
  long sample_count = 0;
  double max_gradient = 0.0;
};

/// Fits the smallest C with |∇u| ≤ C·envelope on the inner cylinder
/// Q_{T,R/2}, snapshots with t ≥ dt.  Throws std::invalid_argument when the
/// (p, q) regime disagrees with the template.
EstimateReport fit_bound(const Trajectory& traj, BoundTemplate tmpl,
                         double b = 1.0, double tau = 0.0);

/// Slope of log sup_x |∇u(·,t)| vs log t over snapshots in [t_lo, t_hi]
/// (inner ball).  Needs at least three snapshots in the window.
SlopeFit gradient_decay_fit(const Trajectory& traj, double t_lo, double t_hi);

struct UniversalReport {
  double fitted_c = 0.0;       // for u + |∇u|^{2/(p+1)} ≤ C d_P^{-2/(p-1)}
  long violations_at_fit = 0;
  long sample_count = 0;
  SlopeFit early_envelope;     // log sup_x lhs vs log t, earliest window
  double interior_margin_ratio = 0.0;  // bound/lhs at (center, T/2)
};

/// Universal-form audit over the whole run; d_P((x,t), ∂D) =
/// min(dist(x, ∂Ω), √t, √(T−t)) on the simulated cylinder.
UniversalReport universal_bound_check(const Trajectory& traj);

enum class Trend { Decaying, Stagnant, Growing };
std::string to_string(Trend t);

struct LiouvilleReport {
  double initial_sup = 0.0;
  double final_sup = 0.0;
  double ratio = 0.0;        // final_sup / initial_sup (0 when degenerate)
  Trend trend = Trend::Stagnant;
  double max_ut = 0.0;       // a-posteriori monotonicity audit
  bool degenerate = false;   // identically zero data
};

/// Decay probe: sup u(T)/sup u(0) with trend classification.  When `ut_tol`
/// is finite, a run with max u_t > ut_tol throws HypothesisError (the probe's
/// theorem assumed time-decrease).  `decay_threshold` splits Decaying from
/// Stagnant; ratio > 1 + 1e-6 reads Growing.
LiouvilleReport liouville_probe(const Trajectory& traj,
                                double ut_tol = 1e-9,
                                double decay_threshold = 0.5);

}  // namespace gradheat::estimates
