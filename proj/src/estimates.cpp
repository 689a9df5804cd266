#include "gradheat/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gradheat/errors.hpp"
#include "gradheat/fdm.hpp"

namespace gradheat::estimates {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double regime_gap(const ProblemParams& params) {
  // (p+1)q − 2p as a double; sign encodes the regime.
  return (params.p_value() + 1.0) * params.q_value() - 2.0 * params.p_value();
}

bool template_matches(BoundTemplate tmpl, Regime regime) {
  switch (tmpl) {
    case BoundTemplate::Subcritical:
      return regime == Regime::Subcritical;
    case BoundTemplate::Critical:
    case BoundTemplate::Universal:
      return regime == Regime::Critical;
    case BoundTemplate::SupercriticalGeneral:
    case BoundTemplate::SupercriticalLarge:
      return regime == Regime::Supercritical;
  }
  return false;
}

}  // namespace

std::string to_string(BoundTemplate t) {
  switch (t) {
    case BoundTemplate::Subcritical: return "subcritical";
    case BoundTemplate::Critical: return "critical";
    case BoundTemplate::SupercriticalGeneral: return "supercritical-general";
    case BoundTemplate::SupercriticalLarge: return "supercritical-large";
    case BoundTemplate::Universal: return "universal";
  }
  return "?";
}

double proof_constant(int dim, double p, double q) {
  if (dim < 1 || !(p > 1.0) || !(q > 1.0)) {
    throw std::invalid_argument("proof constant needs N >= 1, p > 1, q > 1");
  }
  const double n = static_cast<double>(dim);
  return (q - 1.0) / q * std::pow(6.0 * p, q / (q - 1.0)) *
         std::pow(2.0 * n / (q * (q - 1.0)), 1.0 / (q - 1.0));
}

double amplitude_threshold(const ProblemParams& params,
                           std::optional<double> c_override) {
  const double gap = regime_gap(params);
  if (std::abs(gap) < 1e-15) {
    throw std::invalid_argument(
        "amplitude threshold is undefined at the critical exponent");
  }
  const double p = params.p_value();
  const double q = params.q_value();
  double c;
  if (c_override) {
    c = *c_override;
  } else {
    const double big = proof_constant(params.dim, p, q);
    c = std::pow(2.0 * params.dim * big / (q - 1.0), (q - 1.0) / gap);
  }
  return c * std::pow(params.gradient_coeff, -2.0 / gap);
}

double lower_threshold(const ProblemParams& params, double tau,
                       std::optional<double> c_override) {
  const double gap = regime_gap(params);
  if (!(gap > 0.0)) {
    throw std::invalid_argument(
        "the lower amplitude floor applies to the supercritical regime only");
  }
  if (tau < 0.0) throw std::invalid_argument("tau must be nonnegative");
  const double p = params.p_value();
  const double q = params.q_value();
  double c;
  if (c_override) {
    c = *c_override;
  } else {
    const double big = proof_constant(params.dim, p, q);
    c = std::pow(2.0 * params.dim * big / (q - 1.0), (q - 1.0) / gap);
  }
  return c * (std::pow(params.gradient_coeff, -2.0 / gap) +
              std::pow(tau, 1.0 / p));
}

double envelope(BoundTemplate t, const ProblemParams& params, double radius,
                double time, double b, double tau) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(time > 0.0)) {
    throw std::invalid_argument("envelopes are defined for t > 0 only");
  }
  const double p = params.p_value();
  const double q = params.q_value();
  const double m = params.gradient_coeff;
  switch (t) {
    case BoundTemplate::Subcritical:
      return 1.0 / radius + std::pow(radius, -1.0 / (q - 1.0)) +
             std::pow(time, -1.0 / q);
    case BoundTemplate::Critical:
      if (b < 1.0) throw std::invalid_argument("critical ceiling b must be >= 1");
      return b * (1.0 / radius + std::pow(radius, -(p + 1.0) / (p - 1.0)) +
                  std::pow(time, -(p + 1.0) / (2.0 * p)));
    case BoundTemplate::SupercriticalGeneral: {
      const double gap = regime_gap(params);
      if (!(gap > 0.0)) {
        throw std::invalid_argument("template needs supercritical exponents");
      }
      const double mterms =
          std::pow(m, -(p + 1.0) / gap) +
          ((tau > 0.0) ? std::pow(m, -1.0 / q) * std::pow(tau, 1.0 / q) : 0.0);
      return mterms + std::pow(radius, -1.0 / (q - 1.0)) +
             std::pow(time, -1.0 / (2.0 * (q - 1.0)));
    }
    case BoundTemplate::SupercriticalLarge:
      return std::pow(radius, -1.0 / (q - 1.0)) +
             std::pow(time, -1.0 / (2.0 * (q - 1.0)));
    case BoundTemplate::Universal:
      throw std::invalid_argument(
          "the universal bound is not an (R, t) envelope");
  }
  throw std::logic_error("unknown template");
}

HypothesisReport check_hypotheses(const Trajectory& traj, BoundTemplate tmpl,
                                  double tau, double b,
                                  std::optional<double> c_override) {
  const ProblemParams& params = traj.params;
  HypothesisReport report;
  report.tmpl = tmpl;
  report.tau = tau;
  report.regime_ok = template_matches(tmpl, classify(params));
  if (tmpl == BoundTemplate::Critical) {
    report.coefficient_ok =
        params.gradient_coeff >=
        coeff_threshold(params.dim, params.p) * (1.0 - 1e-12);
  }

  const Grid& grid = *traj.grid;
  const double dt = traj.dt();
  double max_u = -kInf;
  double min_u = kInf;
  int counted = 0;
  for (int k = 0; k < traj.snapshot_count(); ++k) {
    const Field& snap = traj.snapshot(k);
    if (snap.time < dt * (1.0 - 1e-9)) continue;
    ++counted;
    max_u = std::max(max_u, snap.sup_norm());
    min_u = std::min(min_u, snap.min_value());
  }
  if (counted == 0) {
    throw std::invalid_argument("no snapshots with t >= dt to audit");
  }

  switch (tmpl) {
    case BoundTemplate::Subcritical:
      report.bound_threshold = amplitude_threshold(params, c_override);
      report.bound_margin = report.bound_threshold - max_u;
      report.bound_pass = max_u <= report.bound_threshold * (1.0 + 1e-12);
      break;
    case BoundTemplate::Critical:
      if (b < 1.0) throw std::invalid_argument("critical ceiling b must be >= 1");
      report.bound_threshold = b;
      report.bound_margin = b - max_u;
      report.bound_pass = max_u <= b * (1.0 + 1e-12);
      break;
    case BoundTemplate::SupercriticalGeneral:
      report.bound_threshold = kInf;
      report.bound_margin = kInf;
      report.bound_pass = true;
      break;
    case BoundTemplate::SupercriticalLarge:
      report.bound_threshold = lower_threshold(params, tau, c_override);
      report.bound_margin = min_u - report.bound_threshold;
      report.bound_pass = min_u >= report.bound_threshold * (1.0 - 1e-12);
      break;
    case BoundTemplate::Universal:
      report.bound_threshold = 0.0;
      report.bound_margin = min_u;
      report.bound_pass = min_u >= -1e-15;
      break;
  }

  const auto inner = grid.nodes_within(grid.radius() / 2.0);
  double max_ut = -kInf;
  for (int k = 1; k < traj.snapshot_count(); ++k) {
    const Field& a = traj.snapshot(k - 1);
    const Field& bsnap = traj.snapshot(k);
    if (bsnap.time < dt * (1.0 - 1e-9)) continue;
    const double span = bsnap.time - a.time;
    if (!(span > 0.0)) continue;
    for (int id : inner) {
      max_ut = std::max(max_ut, (bsnap.values[id] - a.values[id]) / span);
    }
  }
  report.monotonicity_max = std::isfinite(max_ut) ? max_ut : 0.0;
  report.monotone_pass = report.monotonicity_max <= tau + 1e-10;
  return report;
}

SlopeFit fit_log_slope(const std::vector<double>& xs,
                       const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("slope fit needs matched sample vectors");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0.0 && ys[i] > 0.0 && std::isfinite(xs[i]) &&
        std::isfinite(ys[i])) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  }
  const std::size_t n = lx.size();
  if (n < 2) {
    throw std::invalid_argument("slope fit needs at least two positive samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) {
    throw std::invalid_argument("slope fit needs distinct abscissae");
  }
  SlopeFit fit;
  fit.points = static_cast<int>(n);
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fitv = fit.intercept + fit.slope * lx[i];
    ss_res += (ly[i] - fitv) * (ly[i] - fitv);
    ss_tot += (ly[i] - mean) * (ly[i] - mean);
  }
  fit.r2 = (ss_tot > 1e-300) ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

EstimateReport fit_bound(const Trajectory& traj, BoundTemplate tmpl, double b,
                         double tau) {
  if (tmpl == BoundTemplate::Universal) {
    throw std::invalid_argument(
        "use universal_bound_check for the distance-form bound");
  }
  if (!template_matches(tmpl, classify(traj.params))) {
    throw std::invalid_argument("template does not match the (p, q) regime");
  }
  const Grid& grid = *traj.grid;
  const double radius = grid.radius();
  const double dt = traj.dt();

  std::vector<int> inner;
  for (int id : grid.nodes_within(radius / 2.0)) {
    if (grid.has_interior_margin(id, 1)) inner.push_back(id);
  }
  if (inner.empty()) {
    throw std::invalid_argument("inner cylinder holds no stencil nodes");
  }

  EstimateReport report;
  report.tmpl = tmpl;
  for (int k = 0; k < traj.snapshot_count(); ++k) {
    const Field& snap = traj.snapshot(k);
    if (snap.time < dt * (1.0 - 1e-9)) continue;
    const double env = envelope(tmpl, traj.params, radius, snap.time, b, tau);
    const GradientField g = gradient(snap);
    for (int id : inner) {
      const double mag = std::sqrt(g.magnitude2(id));
      report.max_gradient = std::max(report.max_gradient, mag);
      report.fitted_c = std::max(report.fitted_c, mag / env);
      ++report.sample_count;
    }
  }
  // Recount against the fitted constant; zero by construction.
  for (int k = 0; k < traj.snapshot_count(); ++k) {
    const Field& snap = traj.snapshot(k);
    if (snap.time < dt * (1.0 - 1e-9)) continue;
    const double cap = report.fitted_c *
                       envelope(tmpl, traj.params, radius, snap.time, b, tau) *
                       (1.0 + 1e-12);
    const GradientField g = gradient(snap);
    for (int id : inner) {
      if (std::sqrt(g.magnitude2(id)) > cap) ++report.violations_at_fit;
    }
  }
  return report;
}

SlopeFit gradient_decay_fit(const Trajectory& traj, double t_lo, double t_hi) {
  const Grid& grid = *traj.grid;
  std::vector<int> inner;
  for (int id : grid.nodes_within(grid.radius() / 2.0)) {
    if (grid.has_interior_margin(id, 1)) inner.push_back(id);
  }
  std::vector<double> ts, sups;
  for (int k = 0; k < traj.snapshot_count(); ++k) {
    const Field& snap = traj.snapshot(k);
    if (snap.time < t_lo || snap.time > t_hi) continue;
    const GradientField g = gradient(snap);
    double sup = 0.0;
    for (int id : inner) sup = std::max(sup, std::sqrt(g.magnitude2(id)));
    if (sup > 0.0) {
      ts.push_back(snap.time);
      sups.push_back(sup);
    }
  }
  if (ts.size() < 3) {
    throw std::invalid_argument("decay fit needs at least three snapshots");
  }
  return fit_log_slope(ts, sups);
}

UniversalReport universal_bound_check(const Trajectory& traj) {
  const ProblemParams& params = traj.params;
  if (classify(params) != Regime::Critical) {
    throw std::invalid_argument("universal bound audit expects critical q");
  }
  const Grid& grid = *traj.grid;
  const double p = params.p_value();
  const double horizon = traj.final_time;
  const double grad_pow = 2.0 / (p + 1.0);
  const double dist_pow = 2.0 / (p - 1.0);

  std::vector<int> inner;
  for (int id = 0; id < grid.node_count(); ++id) {
    if (grid.has_interior_margin(id, 1)) inner.push_back(id);
  }

  UniversalReport report;
  std::vector<double> early_t, early_sup;
  int center_id = 0;
  double best = kInf;
  for (int id : inner) {
    const double d = grid.dist2_from_center(id);
    if (d < best) {
      best = d;
      center_id = id;
    }
  }

  struct Sample {
    double lhs, dist;
  };
  std::vector<std::vector<Sample>> per_snapshot(traj.snapshot_count());
  for (int k = 0; k < traj.snapshot_count(); ++k) {
    const Field& snap = traj.snapshot(k);
    if (!(snap.time > 0.0) || !(snap.time < horizon)) continue;
    const GradientField g = gradient(snap);
    double sup_lhs = 0.0;
    auto& bucket = per_snapshot[k];
    bucket.reserve(inner.size());
    for (int id : inner) {
      const double mag = std::sqrt(g.magnitude2(id));
      const double lhs = snap.values[id] + std::pow(mag, grad_pow);
      const double wall =
          grid.radius() - std::sqrt(grid.dist2_from_center(id));
      const double d = std::min({wall, std::sqrt(snap.time),
                                 std::sqrt(horizon - snap.time)});
      if (!(d > 0.0)) continue;
      bucket.push_back({lhs, d});
      sup_lhs = std::max(sup_lhs, lhs);
      report.fitted_c =
          std::max(report.fitted_c, lhs * std::pow(d, dist_pow));
      ++report.sample_count;
    }
    if (sup_lhs > 0.0) {
      early_t.push_back(snap.time);
      early_sup.push_back(sup_lhs);
    }
  }
  for (const auto& bucket : per_snapshot) {
    for (const Sample& s : bucket) {
      if (s.lhs > report.fitted_c * std::pow(s.dist, -dist_pow) *
                      (1.0 + 1e-12)) {
        ++report.violations_at_fit;
      }
    }
  }

  // Early-time envelope fit over the first tenth of the horizon (at least
  // three snapshots, widening the window when the stride is coarse).
  std::vector<double> ts, sups;
  double window = horizon / 10.0;
  while (ts.size() < 3 && window <= horizon) {
    ts.clear();
    sups.clear();
    for (std::size_t i = 0; i < early_t.size(); ++i) {
      if (early_t[i] <= window) {
        ts.push_back(early_t[i]);
        sups.push_back(early_sup[i]);
      }
    }
    window *= 2.0;
  }
  if (ts.size() >= 3) report.early_envelope = fit_log_slope(ts, sups);

  // Interior slack probe at (closest-to-center node, t ≈ T/2).
  int mid = traj.snapshot_index_near(horizon / 2.0);
  const Field& snap = traj.snapshot(mid);
  if (snap.time > 0.0 && snap.time < horizon) {
    const GradientField g = gradient(snap);
    const double mag = std::sqrt(g.magnitude2(center_id));
    const double lhs = snap.values[center_id] + std::pow(mag, grad_pow);
    const double wall =
        grid.radius() - std::sqrt(grid.dist2_from_center(center_id));
    const double d = std::min({wall, std::sqrt(snap.time),
                               std::sqrt(horizon - snap.time)});
    const double bound = report.fitted_c * std::pow(d, -dist_pow);
    report.interior_margin_ratio = (lhs > 1e-300) ? bound / lhs : kInf;
  }
  return report;
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::Decaying: return "decaying";
    case Trend::Stagnant: return "stagnant";
    case Trend::Growing: return "growing";
  }
  return "?";
}

LiouvilleReport liouville_probe(const Trajectory& traj, double ut_tol,
                                double decay_threshold) {
  if (traj.snapshot_count() < 2) {
    throw std::invalid_argument("probe needs at least two snapshots");
  }
  LiouvilleReport report;
  double max_ut = -kInf;
  for (int k = 1; k < traj.snapshot_count(); ++k) {
    const Field& a = traj.snapshot(k - 1);
    const Field& b = traj.snapshot(k);
    const double span = b.time - a.time;
    if (!(span > 0.0)) continue;
    for (std::size_t id = 0; id < b.values.size(); ++id) {
      max_ut = std::max(max_ut, (b.values[id] - a.values[id]) / span);
    }
  }
  report.max_ut = std::isfinite(max_ut) ? max_ut : 0.0;
  if (std::isfinite(ut_tol) && report.max_ut > ut_tol) {
    throw HypothesisError("probe run is not decreasing in time");
  }
  report.initial_sup = traj.snapshot(0).sup_norm();
  report.final_sup = traj.snapshot(traj.snapshot_count() - 1).sup_norm();
  if (report.initial_sup <= 0.0) {
    report.degenerate = true;
    report.ratio = 0.0;
    report.trend = Trend::Decaying;
    return report;
  }
  report.ratio = report.final_sup / report.initial_sup;
  if (report.ratio < decay_threshold) {
    report.trend = Trend::Decaying;
  } else if (report.ratio <= 1.0 + 1e-6) {
    report.trend = Trend::Stagnant;
  } else {
    report.trend = Trend::Growing;
  }
  return report;
}

}  // namespace gradheat::estimates
