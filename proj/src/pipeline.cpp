#include "gradheat/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "gradheat/bernstein.hpp"
#include "gradheat/doubling.hpp"
#include "gradheat/errors.hpp"
#include "gradheat/estimates.hpp"
#include "gradheat/fdm.hpp"
#include "gradheat/integral.hpp"

namespace gradheat::pipeline {

namespace {

struct SummaryEntry {
  std::string check;
  std::string label;
  bool pass = false;
  std::string detail;
};

/// Everything a worker produces for one sweep point. Emission happens later,
/// in sweep order, on the collector thread.
struct PointResult {
  std::string label;
  std::vector<std::string> solve_row;
  std::vector<std::vector<std::string>> bernstein_rows;
  std::vector<std::vector<std::string>> integral_rows;
  std::vector<std::vector<std::string>> estimates_rows;
  std::vector<std::vector<std::string>> doubling_rows;
  std::vector<std::vector<std::string>> rescaling_rows;
  std::vector<SummaryEntry> summaries;
  std::vector<double> grad_times;
  std::vector<double> grad_sups;
  double mass = 0.0;
  bool has_mass = false;
  int failures = 0;
};

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == '/') c = '-';
  }
  return s;
}

bool wants(const ExperimentConfig& cfg, CheckKind kind) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), kind) !=
         cfg.checks.end();
}

void note(PointResult& out, const std::string& check, bool pass,
          const std::string& detail) {
  out.summaries.push_back({check, out.label, pass, detail});
  if (!pass) ++out.failures;
}

/// Snapshot indices spread across (0, count-1), all with both neighbors.
std::vector<int> sample_indices(int count, int budget) {
  std::vector<int> out;
  if (count < 3) return out;
  const int lo = 1;
  const int hi = count - 2;
  const int n = std::min(budget, hi - lo + 1);
  for (int i = 0; i < n; ++i) {
    const int idx = lo + static_cast<int>(
                             std::llround(static_cast<double>(i) * (hi - lo) /
                                          std::max(1, n - 1)));
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

double gradient_sup(const Field& snap) {
  const GradientField g = gradient(snap);
  double best = 0.0;
  for (int id = 0; id < snap.grid->node_count(); ++id) {
    if (!g.valid[id]) continue;
    best = std::max(best, std::sqrt(g.magnitude2(id)));
  }
  return best;
}

void run_bernstein_check(const Trajectory& traj, PointResult& out) {
  const ProblemParams& params = traj.params;
  const Grid& grid = *traj.grid;
  const double qv = params.q_value();

  // Scale the auxiliary function so every snapshot stays in its domain.
  double sup_u = 0.0;
  for (int s = 0; s < traj.snapshot_count(); ++s) {
    sup_u = std::max(sup_u, traj.snapshot(s).sup_norm());
  }
  const double f_scale = std::max(1.0, sup_u * (1.0 + 1e-6));
  const auto f = bernstein::AuxiliaryFunction::power_shift(
      f_scale, aux_exponent(params.dim, params.q));

  std::vector<double> pts;
  const double top = f.domain_max();
  for (int i = 0; i < 16; ++i) pts.push_back(top * (i + 0.5) / 16.0);
  const double gamma_res =
      bernstein::gamma_identity_residual(f, params.dim, qv, pts);

  const auto eta = bernstein::Cutoff::make(grid.center(), grid.radius(), 0.5);
  const double h = grid.spacing();
  const double dt = traj.dt();
  const double t_cal =
      std::max(20.0 * dt, std::min(0.05, traj.final_time / 4.0));
  const double c0 = bernstein::calibrate_tolerance_coefficient(
      params, grid.radius(), h, dt, t_cal);
  const double tol = c0 * (h * h + dt);

  long violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int idx : sample_indices(traj.snapshot_count(), 8)) {
    const auto rep = bernstein::operator_inequality_residual(traj, idx, f, eta);
    worst = std::max(worst, rep.max_residual);
    const bool bad = rep.max_residual > tol;
    if (bad) ++violations;
    out.bernstein_rows.push_back(
        {out.label, format_real(traj.snapshot(idx).time),
         format_real(rep.max_residual), format_real(tol),
         std::to_string(rep.included), std::to_string(rep.excluded_low_gradient),
         std::to_string(rep.excluded_stencil), bad ? "1" : "0"});
  }

  const bool gamma_ok = gamma_res < 1e-10;
  const bool pass = gamma_ok && violations == 0;
  std::ostringstream detail;
  detail << "gamma_residual=" << format_real(gamma_res)
         << " tolerance=" << format_real(tol)
         << " worst=" << format_real(worst) << " violations=" << violations;
  note(out, "bernstein", pass, detail.str());
}

void run_integral_check(const Trajectory& traj, PointResult& out) {
  const ProblemParams& params = traj.params;
  const Grid& grid = *traj.grid;
  const double pv = params.p_value();
  const double theta = 1e-3;

  const double alpha_bar = integral::default_alpha_bar(pv);
  const double t_end = traj.final_time;
  const double r_phi = std::min(0.5 * grid.radius(), std::sqrt(0.45 * t_end));
  const auto phi = integral::TestFunction::space_time(
      params.dim, grid.center(), 0.5 * t_end, r_phi, alpha_bar);
  const double k = -integral::admissible_k_range(params.dim, params.p).midpoint();

  const auto check = integral::verify_space_time_inequality(traj, theta, phi, k);
  const double tol =
      integral::margin_tolerance(check, grid.spacing(), traj.dt());
  const bool pass = check.margin >= -tol;
  out.integral_rows.push_back(
      {out.label, format_real(theta), format_real(k), format_real(check.lhs),
       format_real(check.budget), format_real(check.margin),
       format_real(check.expansion_error_k),
       format_real(check.expansion_error_j), format_real(check.fitted_c)});
  std::ostringstream detail;
  detail << "margin=" << format_real(check.margin)
         << " scale=" << format_real(check.scale)
         << " fitted_c=" << format_real(check.fitted_c);
  note(out, "integral", pass, detail.str());
}

void run_estimates_check(const Trajectory& traj, PointResult& out) {
  using estimates::BoundTemplate;
  const ProblemParams& params = traj.params;
  const Regime regime = classify(params);

  double sup_u = 0.0;
  for (int s = 0; s < traj.snapshot_count(); ++s) {
    sup_u = std::max(sup_u, traj.snapshot(s).sup_norm());
  }

  BoundTemplate tmpl = BoundTemplate::Subcritical;
  double b = 1.0;
  if (regime == Regime::Critical) {
    tmpl = BoundTemplate::Critical;
    b = std::max(1.0, sup_u * (1.0 + 1e-9));
  } else if (regime == Regime::Supercritical) {
    tmpl = BoundTemplate::SupercriticalGeneral;
  }

  auto hyp = estimates::check_hypotheses(traj, tmpl, 0.0, b);
  double tau = 0.0;
  if (tmpl == BoundTemplate::SupercriticalGeneral && !hyp.monotone_pass) {
    // The general supercritical estimate is parametric in the u_t cap; adopt
    // the measured one.
    tau = hyp.monotonicity_max * (1.0 + 1e-9);
    hyp = estimates::check_hypotheses(traj, tmpl, tau, b);
  }

  double fitted_c = 0.0;
  long violations = 0;
  long samples = 0;
  double early_slope = std::numeric_limits<double>::quiet_NaN();
  bool pass = hyp.pass();
  if (pass) {
    const auto fit = estimates::fit_bound(traj, tmpl, b, tau);
    fitted_c = fit.fitted_c;
    violations = fit.violations_at_fit;
    samples = fit.sample_count;
    pass = violations == 0;
    try {
      const auto slope = estimates::gradient_decay_fit(
          traj, traj.dt(), std::max(traj.dt() * 4.0, traj.final_time / 5.0));
      early_slope = slope.slope;
    } catch (const std::invalid_argument&) {
      // Too few early snapshots for a slope; leave it unset.
    }
  }

  out.estimates_rows.push_back(
      {out.label, to_string(tmpl), format_real(hyp.bound_threshold),
       format_real(hyp.bound_margin), format_real(hyp.monotonicity_max),
       format_real(tau), format_real(fitted_c), std::to_string(violations),
       std::to_string(samples), format_real(early_slope)});
  std::ostringstream detail;
  detail << to_string(tmpl) << " hypotheses=" << (hyp.pass() ? "ok" : "fail")
         << " fitted_c=" << format_real(fitted_c)
         << " violations=" << violations;
  note(out, "estimates", pass, detail.str());
}

doubling::DoublingInstance subsample_instance(
    const doubling::DoublingInstance& inst, std::size_t cap,
    std::uint64_t seed) {
  std::vector<int> domain;
  std::vector<int> boundary;
  for (int i = 0; i < static_cast<int>(inst.points.size()); ++i) {
    (inst.in_domain[i] ? domain : boundary).push_back(i);
  }
  std::mt19937_64 rng(seed);
  auto pick = [&](std::vector<int>& ids) {
    if (ids.size() > cap) {
      std::shuffle(ids.begin(), ids.end(), rng);
      ids.resize(cap);
      std::sort(ids.begin(), ids.end());
    }
  };
  pick(domain);
  pick(boundary);
  std::vector<int> keep;
  keep.reserve(domain.size() + boundary.size());
  keep.insert(keep.end(), domain.begin(), domain.end());
  keep.insert(keep.end(), boundary.begin(), boundary.end());
  std::sort(keep.begin(), keep.end());

  doubling::DoublingInstance small;
  small.metric = inst.metric;
  small.k = inst.k;
  for (int id : keep) {
    small.points.push_back(inst.points[id]);
    small.in_domain.push_back(inst.in_domain[id]);
    small.m_values.push_back(inst.m_values[id]);
  }
  return small;
}

void run_doubling_check(const Trajectory& traj, std::uint64_t seed,
                        PointResult& out) {
  const Grid& grid = *traj.grid;
  const int space_stride =
      std::max(1, grid.node_count() / (grid.dim() == 1 ? 64 : 1024));
  const int time_stride = std::max(1, traj.snapshot_count() / 12);
  auto inst = doubling::from_trajectory(traj, 1.0, space_stride, time_stride);
  inst = subsample_instance(inst, 400, seed);

  // Choose k from the best attainable hypothesis value so the search has a
  // valid start whenever the field is not flat.
  double best_value = 0.0;
  for (int i = 0; i < static_cast<int>(inst.points.size()); ++i) {
    if (!inst.in_domain[i]) continue;
    const double v = inst.m_values[i] * inst.dist_to_complement(i);
    best_value = std::max(best_value, v);
  }
  if (!(best_value > 0.0) || !std::isfinite(best_value)) {
    note(out, "doubling", false, "no usable starting point (flat field)");
    return;
  }
  inst.k = best_value / 4.0;

  const int start = doubling::best_start(inst);
  if (start < 0) {
    note(out, "doubling", false, "hypothesis fails at every point");
    return;
  }
  const auto result = doubling::find_doubling_point(inst, start);
  const bool hop_ok = result.hops <= result.hop_bound;
  out.doubling_rows.push_back(
      {out.label, std::to_string(inst.points.size()),
       std::to_string(inst.domain_size()), format_real(inst.k),
       std::to_string(result.hops), std::to_string(result.hop_bound),
       format_real(result.m_times_dist), result.dominates_start ? "1" : "0",
       std::to_string(result.ball_violations)});
  std::ostringstream detail;
  detail << "hops=" << result.hops << "/" << result.hop_bound
         << " m_times_dist=" << format_real(result.m_times_dist)
         << " k=" << format_real(inst.k);
  note(out, "doubling", hop_ok, detail.str());
}

void run_rescaling_check(const Trajectory& traj, PointResult& out) {
  const Grid& grid = *traj.grid;
  const double h = grid.spacing();
  if (traj.snapshot_count() < 3) {
    note(out, "rescaling", false, "need at least three snapshots");
    return;
  }

  // Pick the strongest interior sample point by the scaling functional M.
  doubling::ParabolicPoint at;
  double best_m = 0.0;
  const auto inner = grid.nodes_within(0.5 * grid.radius());
  const int stride = std::max(1, static_cast<int>(inner.size()) / 64);
  for (int s : sample_indices(traj.snapshot_count(), 5)) {
    const double t = traj.snapshot(s).time;
    for (std::size_t j = 0; j < inner.size(); j += stride) {
      const auto c = grid.coord(inner[j]);
      doubling::ParabolicPoint cand{{c[0], c[1]}, t};
      const double m = doubling::sample_m(traj, cand, h);
      if (m > best_m) {
        best_m = m;
        at = cand;
      }
    }
  }
  if (!(best_m > 0.0)) {
    note(out, "rescaling", false, "field is flat; no scaling point");
    return;
  }

  const double lambda = 1.0 / best_m;
  const double space_margin =
      grid.radius() - std::hypot(at.x[0] - grid.center()[0],
                                 at.x[1] - grid.center()[1]) -
      2.0 * h;
  const double t_lo = at.t - traj.snapshot(0).time;
  const double t_hi = traj.final_time - at.t;
  const double frame_radius =
      0.9 * std::min({space_margin / lambda, std::sqrt(std::max(0.0, t_lo)) / lambda,
                      std::sqrt(std::max(0.0, t_hi)) / lambda});
  if (!(frame_radius > 1e-3)) {
    note(out, "rescaling", false, "window too small for a frame");
    return;
  }

  const auto frame =
      doubling::rescaling_frame(traj, at, lambda, frame_radius, 6);
  const bool pass = std::abs(frame.normalization - 1.0) <= 0.05;
  out.rescaling_rows.push_back(
      {out.label, format_real(lambda), format_real(frame_radius),
       format_real(frame.normalization), format_real(frame.sup_m),
       std::to_string(frame.samples)});
  std::ostringstream detail;
  detail << "normalization=" << format_real(frame.normalization)
         << " sup=" << format_real(frame.sup_m) << " samples=" << frame.samples;
  note(out, "rescaling", pass, detail.str());
}

double inner_mass(const Trajectory& traj) {
  const Grid& grid = *traj.grid;
  const double p2 = 2.0 * traj.params.p_value();
  const double cell = (grid.dim() == 1) ? grid.spacing()
                                        : grid.spacing() * grid.spacing();
  const auto inner = grid.nodes_within(0.5 * grid.radius());
  const double t_lo = 0.25 * traj.final_time;
  const double t_hi = 0.75 * traj.final_time;
  double total = 0.0;
  for (int s = 0; s < traj.snapshot_count(); ++s) {
    const Field& snap = traj.snapshot(s);
    if (snap.time < t_lo || snap.time > t_hi) continue;
    const double w_prev =
        (s > 0) ? snap.time - traj.snapshot(s - 1).time : 0.0;
    const double w_next = (s + 1 < traj.snapshot_count())
                              ? traj.snapshot(s + 1).time - snap.time
                              : 0.0;
    const double weight = 0.5 * (w_prev + w_next);
    double plane = 0.0;
    for (int id : inner) {
      plane += std::pow(std::max(0.0, snap.values[id]), p2);
    }
    total += plane * cell * weight;
  }
  return total;
}

PointResult process_point(const ExperimentConfig& cfg, const SweepPoint& pt) {
  PointResult out;
  out.label = point_label(pt);
  Trajectory traj = run_point(cfg, pt);

  out.solve_row = {out.label,
                   to_string(traj.status),
                   format_real(traj.final_time),
                   format_real(traj.snapshot(traj.snapshot_count() - 1)
                                   .sup_norm()),
                   std::to_string(traj.clamp_count),
                   format_real(traj.min_preclamp)};

  for (int s = 0; s < traj.snapshot_count(); ++s) {
    out.grad_times.push_back(traj.snapshot(s).time);
    out.grad_sups.push_back(gradient_sup(traj.snapshot(s)));
  }
  out.mass = inner_mass(traj);
  out.has_mass = true;

  auto guarded = [&](CheckKind kind, auto&& fn) {
    if (!wants(cfg, kind)) return;
    try {
      fn();
    } catch (const std::exception& e) {
      note(out, to_string(kind), false, std::string("error: ") + e.what());
    }
  };
  guarded(CheckKind::Bernstein, [&] { run_bernstein_check(traj, out); });
  guarded(CheckKind::Integral, [&] { run_integral_check(traj, out); });
  guarded(CheckKind::Estimates, [&] { run_estimates_check(traj, out); });
  guarded(CheckKind::Doubling,
          [&] { run_doubling_check(traj, cfg.seed, out); });
  guarded(CheckKind::Rescaling, [&] { run_rescaling_check(traj, out); });
  return out;
}

}  // namespace

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  for (const auto& p : cfg.sweep_p) {
    for (const auto& q : cfg.sweep_q) {
      for (double m : cfg.sweep_coeff) {
        for (double r : cfg.sweep_radius) {
          points.push_back({p, q, m, r});
        }
      }
    }
  }
  return points;
}

std::string point_label(const SweepPoint& pt) {
  std::ostringstream out;
  out << "p" << sanitize(pt.p.str()) << "_q" << sanitize(pt.q.str()) << "_M"
      << format_real(pt.coeff) << "_R" << format_real(pt.radius);
  return out.str();
}

Trajectory run_point(const ExperimentConfig& cfg, const SweepPoint& pt) {
  ProblemParams params = cfg.problem;
  params.p = pt.p;
  params.q = pt.q;
  params.gradient_coeff = pt.coeff;
  params.validate();

  const double scale = pt.radius / cfg.radius;
  const double h = cfg.spacing * scale;
  auto grid = (params.dim == 1)
                  ? Grid::make_interval(0.0, pt.radius, h)
                  : Grid::make_disc({0.0, 0.0}, pt.radius, h);

  SolverConfig sc;
  sc.dt = (cfg.dt > 0.0) ? cfg.dt * scale * scale : stable_dt(*grid, cfg.safety);
  sc.t_end = cfg.t_end;
  sc.bc = cfg.boundary;
  sc.snapshot_stride = cfg.snapshot_stride;

  Field initial = make_initial_field(cfg.initial, grid);
  return solve(initial, params, sc);
}

void emit_solution(const Trajectory& traj, const std::string& label,
                   ReportWriter& writer) {
  const Grid& grid = *traj.grid;
  const Field& last = traj.snapshot(traj.snapshot_count() - 1);
  std::vector<double> xs, ys, us;
  for (int id = 0; id < grid.node_count(); ++id) {
    const auto c = grid.coord(id);
    xs.push_back(c[0]);
    ys.push_back(c[1]);
    us.push_back(last.values[id]);
  }
  if (grid.dim() == 1) {
    writer.add_columns("profile_" + label, {"x", "u"}, {xs, us});
  } else {
    writer.add_columns("profile_" + label, {"x", "y", "u"}, {xs, ys, us});
  }
  if (!traj.sup_times.empty()) {
    writer.add_columns("sup_" + label, {"t", "sup_u"},
                       {traj.sup_times, traj.sup_values});
  }
}

int run_experiment(const ExperimentConfig& cfg, ReportWriter& writer) {
  cfg.validate();
  const auto points = sweep_points(cfg);
  std::vector<PointResult> results(points.size());

  const int workers =
      std::max(1, std::min<int>(cfg.jobs, static_cast<int>(points.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      try {
        results[i] = process_point(cfg, points[i]);
      } catch (const std::exception& e) {
        results[i].label = point_label(points[i]);
        results[i].summaries.push_back(
            {"solve", results[i].label, false, std::string("error: ") + e.what()});
        results[i].failures = 1;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= points.size()) break;
        try {
          results[i] = process_point(cfg, points[i]);
        } catch (const std::exception& e) {
          results[i].label = point_label(points[i]);
          results[i].summaries.push_back({"solve", results[i].label, false,
                                          std::string("error: ") + e.what()});
          results[i].failures = 1;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // Single-collector emission, fixed order.
  ReportTable solve_table(
      {"label", "status", "final_time", "sup_final", "clamps", "min_preclamp"});
  ReportTable bernstein_table({"label", "time", "max_residual", "tolerance",
                               "included", "excluded_low", "excluded_stencil",
                               "violation"});
  ReportTable integral_table({"label", "theta", "k", "lhs", "budget", "margin",
                              "expansion_error_k", "expansion_error_j",
                              "fitted_c"});
  ReportTable estimates_table({"label", "template", "threshold", "bound_margin",
                               "max_ut", "tau", "fitted_c", "violations",
                               "samples", "early_slope"});
  ReportTable doubling_table({"label", "points", "domain", "k", "hops",
                              "hop_bound", "m_times_dist", "dominates",
                              "ball_violations"});
  ReportTable rescaling_table({"label", "lambda", "frame_radius",
                               "normalization", "sup_m", "samples"});

  int failures = 0;
  std::vector<double> mass_radii, mass_values;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    failures += r.failures;
    if (!r.solve_row.empty()) solve_table.add_row(r.solve_row);
    for (auto& row : r.bernstein_rows) bernstein_table.add_row(row);
    for (auto& row : r.integral_rows) integral_table.add_row(row);
    for (auto& row : r.estimates_rows) estimates_table.add_row(row);
    for (auto& row : r.doubling_rows) doubling_table.add_row(row);
    for (auto& row : r.rescaling_rows) rescaling_table.add_row(row);
    for (auto& s : r.summaries) {
      writer.add_summary(s.check, s.label, s.pass, s.detail);
    }
    if (!r.grad_times.empty()) {
      writer.add_columns("grad_sup_" + r.label, {"t", "sup_grad"},
                         {r.grad_times, r.grad_sups});
    }
    if (r.has_mass) {
      mass_radii.push_back(points[i].radius);
      mass_values.push_back(r.mass);
    }
  }

  writer.add_table("solve", solve_table);
  if (wants(cfg, CheckKind::Bernstein)) {
    writer.add_table("bernstein", bernstein_table);
  }
  if (wants(cfg, CheckKind::Integral)) {
    writer.add_table("integral", integral_table);
  }
  if (wants(cfg, CheckKind::Estimates)) {
    writer.add_table("estimates", estimates_table);
  }
  if (wants(cfg, CheckKind::Doubling)) {
    writer.add_table("doubling", doubling_table);
  }
  if (wants(cfg, CheckKind::Rescaling)) {
    writer.add_table("rescaling", rescaling_table);
  }
  if (cfg.sweep_radius.size() >= 2 && cfg.sweep_p.size() == 1 &&
      cfg.sweep_q.size() == 1 && cfg.sweep_coeff.size() == 1) {
    writer.add_columns("mass_vs_radius", {"R", "mass"},
                       {mass_radii, mass_values});
  }
  return failures;
}

}  // namespace gradheat::pipeline
