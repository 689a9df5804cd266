#include "gradheat/integral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gradheat/errors.hpp"
#include "gradheat/estimates.hpp"
#include "gradheat/fdm.hpp"

namespace gradheat::integral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Beyond this squared-offset the bump underflows anyway; cutting early avoids
// inf·0 in the derivative prefactors.
constexpr double kEdge = 1.0 - 1e-8;

struct ProfileEval {
  double psi = 0.0;   // Ψ_b(s)
  double dpsi = 0.0;  // dΨ/ds
  double ddpsi = 0.0; // d²Ψ/ds²
};

ProfileEval eval_profile(double s, int b) {
  if (s >= kEdge) return {};
  if (s < 0.0) s = 0.0;
  const double g = 1.0 / (1.0 - s);
  ProfileEval out;
  out.psi = std::exp(b * (1.0 - g));
  out.dpsi = -b * g * g * out.psi;
  out.ddpsi = (static_cast<double>(b) * b * g * g * g * g -
               2.0 * b * g * g * g) *
              out.psi;
  return out;
}

}  // namespace

double AdmissibleRange::midpoint() const {
  if (std::isinf(hi)) return lo + 1.2;
  return 0.5 * (lo + hi);
}

AdmissibleRange admissible_k_range(int dim, const Rational& p) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(p > Rational(1))) throw std::domain_error("p must exceed 1");
  const RationalOrInf p_bv = bidaut_veron_exponent(dim);
  if (p_bv.is_finite() && !(p < p_bv.value())) {
    throw std::domain_error(
        "the admissible window is empty at and above the integral-method "
        "exponent ceiling");
  }
  AdmissibleRange range;
  const double n = static_cast<double>(dim);
  range.lo = p.to_double() * (n - 1.0) / (n + 2.0);
  range.hi = (dim == 1) ? kInf : n / (n - 1.0);
  return range;
}

InequalityCoefficients inequality_coefficients(double a, double k, int dim,
                                               double p) {
  if (std::abs(k + 1.0) < 1e-12) {
    throw std::invalid_argument("k = -1 is excluded from the inequality");
  }
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  const double n = static_cast<double>(dim);
  InequalityCoefficients c;
  c.a = a;
  c.k = k;
  c.alpha = -(n - 1.0) / n * k * k + (a - 1.0) * k - 0.5 * a * (a - 1.0);
  c.beta = (n + 2.0) / n * k - 1.5 * a;
  c.gamma = -(n - 1.0) / n;
  c.delta = -(k / p) * (n + 2.0) / n - (n - 1.0) / n;
  return c;
}

double default_alpha_bar(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  return 0.5 * ((3.0 * p + 1.0) / (4.0 * p) + 1.0);
}

int default_bump_power(double alpha_bar) {
  if (!(alpha_bar > 0.0) || !(alpha_bar < 1.0)) {
    throw std::invalid_argument("alpha-bar must lie in (0, 1)");
  }
  return static_cast<int>(std::ceil(2.0 / (1.0 - alpha_bar) + 1.0));
}

TestFunction TestFunction::spatial(int dim, std::array<double, 2> center,
                                   double radius, double alpha_bar,
                                   int power) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(alpha_bar > 0.0) || !(alpha_bar < 1.0)) {
    throw std::invalid_argument("alpha-bar must lie in (0, 1)");
  }
  TestFunction phi;
  phi.dim_ = dim;
  phi.center_ = center;
  phi.radius_ = radius;
  phi.alpha_bar_ = alpha_bar;
  phi.power_ = (power > 0) ? power : default_bump_power(alpha_bar);
  if (phi.power_ <= 2) throw std::invalid_argument("bump power must exceed 2");
  phi.has_time_ = false;
  return phi;
}

TestFunction TestFunction::space_time(int dim, std::array<double, 2> center,
                                      double t_center, double radius,
                                      double alpha_bar, int power) {
  TestFunction phi = spatial(dim, center, radius, alpha_bar, power);
  phi.t_center_ = t_center;
  phi.has_time_ = true;
  return phi;
}

double TestFunction::value(double x, double y, double t) const {
  const double dx = x - center_[0];
  const double dy = (dim_ == 2) ? y - center_[1] : 0.0;
  const double sx = (dx * dx + dy * dy) / (radius_ * radius_);
  const double space = eval_profile(sx, power_).psi;
  if (!has_time_) return space;
  const double tau = (t - t_center_) / (radius_ * radius_);
  return space * eval_profile(tau * tau, power_).psi;
}

std::array<double, 2> TestFunction::gradient(double x, double y,
                                             double t) const {
  const double dx = x - center_[0];
  const double dy = (dim_ == 2) ? y - center_[1] : 0.0;
  const double r2 = radius_ * radius_;
  const double sx = (dx * dx + dy * dy) / r2;
  const ProfileEval space = eval_profile(sx, power_);
  double tfac = 1.0;
  if (has_time_) {
    const double tau = (t - t_center_) / r2;
    tfac = eval_profile(tau * tau, power_).psi;
  }
  const double scale = space.dpsi * 2.0 / r2 * tfac;
  return {scale * dx, (dim_ == 2) ? scale * dy : 0.0};
}

double TestFunction::laplacian(double x, double y, double t) const {
  const double dx = x - center_[0];
  const double dy = (dim_ == 2) ? y - center_[1] : 0.0;
  const double r2 = radius_ * radius_;
  const double sx = (dx * dx + dy * dy) / r2;
  const ProfileEval space = eval_profile(sx, power_);
  double tfac = 1.0;
  if (has_time_) {
    const double tau = (t - t_center_) / r2;
    tfac = eval_profile(tau * tau, power_).psi;
  }
  // Δφ = Ψ''|∇s|² + Ψ'Δs with |∇s|² = 4s/R², Δs = 2·dim/R².
  return (space.ddpsi * 4.0 * sx / r2 +
          space.dpsi * 2.0 * static_cast<double>(dim_) / r2) *
         tfac;
}

double TestFunction::time_derivative(double x, double y, double t) const {
  if (!has_time_) return 0.0;
  const double dx = x - center_[0];
  const double dy = (dim_ == 2) ? y - center_[1] : 0.0;
  const double r2 = radius_ * radius_;
  const double sx = (dx * dx + dy * dy) / r2;
  const double space = eval_profile(sx, power_).psi;
  const double tau = (t - t_center_) / r2;
  const ProfileEval timef = eval_profile(tau * tau, power_);
  return space * timef.dpsi * 2.0 * tau / r2;
}

TestFunctionConstants measure_test_function_constants(
    const TestFunction& phi, const Grid& grid,
    const std::vector<double>& times) {
  TestFunctionConstants out;
  const double r = phi.radius();
  std::vector<double> sample_times = times;
  if (sample_times.empty()) sample_times.push_back(phi.t_center());
  for (double t : sample_times) {
    for (int id = 0; id < grid.node_count(); ++id) {
      const auto c = grid.coord(id);
      const double val = phi.value(c[0], c[1], t);
      if (val <= 0.0) continue;
      const auto g = phi.gradient(c[0], c[1], t);
      const double gnorm = std::hypot(g[0], g[1]);
      const double lap = std::abs(phi.laplacian(c[0], c[1], t));
      const double dt = std::abs(phi.time_derivative(c[0], c[1], t));
      const double pow_a = std::pow(val, phi.alpha_bar());
      out.grad_constant = std::max(out.grad_constant, gnorm * r / pow_a);
      out.second_constant =
          std::max(out.second_constant,
                   (lap + gnorm * gnorm / val + dt) * r * r / pow_a);
    }
  }
  return out;
}

namespace {

struct SpatialSums {
  double i_a = 0, j_a = 0, k_a = 0;
  double rhs_lap = 0, rhs_mixed = 0, rhs_cubic = 0;
};

SpatialSums spatial_pass(const AnalyticField& v, const TestFunction& phi,
                         double a, int dim, double step) {
  const auto c = phi.center();
  const double r = phi.radius();
  const long n = std::max<long>(4, std::lround(std::ceil(2.0 * r / step)));
  const double dx = 2.0 * r / static_cast<double>(n);
  const double cell = (dim == 2) ? dx * dx : dx;
  const long ny = (dim == 2) ? n : 1;

  SpatialSums sums;
  for (long i = 0; i < n; ++i) {
    const double x = c[0] - r + (static_cast<double>(i) + 0.5) * dx;
    for (long jj = 0; jj < ny; ++jj) {
      const double y =
          (dim == 2) ? c[1] - r + (static_cast<double>(jj) + 0.5) * dx : 0.0;
      const double w = phi.value(x, y, phi.t_center());
      const auto gphi = phi.gradient(x, y, phi.t_center());
      const double lphi = phi.laplacian(x, y, phi.t_center());
      if (w <= 0.0 && gphi[0] == 0.0 && gphi[1] == 0.0 && lphi == 0.0) {
        continue;
      }
      const double vv = v.value(x, y);
      if (!(vv > 0.0)) {
        throw HypothesisError("field must be positive on the weight support");
      }
      const auto gv = v.gradient(x, y);
      const double lv = v.laplacian(x, y);
      const double g2 = gv[0] * gv[0] + gv[1] * gv[1];
      const double dot = gv[0] * gphi[0] + gv[1] * gphi[1];
      sums.i_a += cell * w * std::pow(vv, a - 2.0) * g2 * g2;
      sums.j_a += cell * w * std::pow(vv, a - 1.0) * g2 * lv;
      sums.k_a += cell * w * std::pow(vv, a) * lv * lv;
      sums.rhs_lap += cell * std::pow(vv, a) * g2 * lphi;
      sums.rhs_mixed += cell * std::pow(vv, a) * lv * dot;
      sums.rhs_cubic += cell * std::pow(vv, a - 1.0) * g2 * dot;
    }
  }
  return sums;
}

}  // namespace

SpatialCheck verify_spatial_inequality(const AnalyticField& v,
                                       const TestFunction& phi, double a,
                                       double k, int dim, double h) {
  if (phi.has_time_factor()) {
    throw std::invalid_argument("spatial check needs a spatial-only weight");
  }
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");

  SpatialCheck check;
  // delta belongs to the space-time version only; the p argument feeds just
  // that field, so any p > 1 works here and delta is blanked afterwards.
  check.coeffs = inequality_coefficients(a, k, dim, 2.0);
  check.coeffs.delta = 0.0;

  const SpatialSums coarse = spatial_pass(v, phi, a, dim, h);
  const SpatialSums fine = spatial_pass(v, phi, a, dim, h / 4.0);

  const auto lhs_of = [&](const SpatialSums& s) {
    return check.coeffs.alpha * s.i_a + check.coeffs.beta * s.j_a +
           check.coeffs.gamma * s.k_a;
  };
  const auto rhs_of = [&](const SpatialSums& s) {
    return 0.5 * s.rhs_lap + s.rhs_mixed + (a - k) * s.rhs_cubic;
  };

  check.i_a = fine.i_a;
  check.j_a = fine.j_a;
  check.k_a = fine.k_a;
  check.lhs = lhs_of(fine);
  check.rhs = rhs_of(fine);
  check.coarse_lhs = lhs_of(coarse);
  check.coarse_rhs = rhs_of(coarse);
  check.margin = check.rhs - check.lhs;
  check.scale = std::max({std::abs(check.lhs), std::abs(check.rhs),
                          std::abs(check.coeffs.alpha) * fine.i_a,
                          std::abs(check.coeffs.gamma) * fine.k_a});

  const double denom = std::max(check.scale, 1e-300);
  check.disagreement =
      std::max(std::abs(check.lhs - check.coarse_lhs) / denom,
               std::abs(check.rhs - check.coarse_rhs) / denom);
  if (check.scale > 1e-12 && check.disagreement > 0.05) {
    throw QuadratureError("coarse and refined quadrature disagree beyond 5%");
  }
  return check;
}

namespace {

struct SpaceTimeSums {
  SpaceTimeQuantities q;
  double boundary = 0.0;
  double j_rest = 0.0;
  double k_rest = 0.0;  // expansion terms except L and F_θ
  double published = 0.0;
};

SpaceTimeSums space_time_pass(const Trajectory& traj, double theta,
                              const TestFunction& phi, double k) {
  if (!phi.has_time_factor()) {
    throw std::invalid_argument("space-time check needs a space-time weight");
  }
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  const Grid& grid = *traj.grid;
  if (grid.dim() != phi.dim()) {
    throw std::invalid_argument("weight and grid dimensions disagree");
  }
  const double h = grid.spacing();
  const auto pc = phi.center();
  const auto gc = grid.center();
  const double off = std::hypot(pc[0] - gc[0],
                                (grid.dim() == 2) ? pc[1] - gc[1] : 0.0);
  if (off + phi.radius() > grid.radius() - 2.0 * h + 1e-12) {
    throw SupportError("weight support leaves the grid's stencil interior");
  }
  if (traj.snapshot_count() < 3) {
    throw SupportError("need at least three snapshots for time derivatives");
  }
  const double t_lo = phi.t_center() - phi.time_halfwidth();
  const double t_hi = phi.t_center() + phi.time_halfwidth();
  if (traj.snapshots.front().time > t_lo + 1e-12 ||
      traj.snapshots.back().time < t_hi - 1e-12) {
    throw SupportError("recorded time range does not cover the weight");
  }

  const ProblemParams& params = traj.params;
  const double p = params.p_value();
  const double q = params.q_value();
  const double m = params.gradient_coeff;
  const double cell = (grid.dim() == 2) ? h * h : h;

  std::vector<int> nodes;
  for (int id = 0; id < grid.node_count(); ++id) {
    if (grid.has_interior_margin(id, 1)) nodes.push_back(id);
  }

  SpaceTimeSums sums;
  sums.q.theta = theta;
  sums.q.f_min = kInf;
  sums.q.f_max = -kInf;

  const int count = traj.snapshot_count();
  for (int s = 0; s < count; ++s) {
    const Field& snap = traj.snapshot(s);
    const double t_prev = traj.snapshot(std::max(0, s - 1)).time;
    const double t_next = traj.snapshot(std::min(count - 1, s + 1)).time;
    const double weight = 0.5 * (t_next - t_prev);
    if (!(weight > 0.0)) continue;
    if (snap.time < t_lo || snap.time > t_hi) continue;

    const GradientField gu = gradient(snap);
    const MaskedField lap = laplacian(snap);
    const TimeDerivative ut = time_derivative(traj.snapshots, s);

    for (int id : nodes) {
      const auto c = grid.coord(id);
      const double w_phi = phi.value(c[0], c[1], snap.time);
      const auto g_phi = phi.gradient(c[0], c[1], snap.time);
      const double l_phi = phi.laplacian(c[0], c[1], snap.time);
      const double dt_phi = phi.time_derivative(c[0], c[1], snap.time);
      const double gp_norm = std::hypot(g_phi[0], g_phi[1]);
      if (w_phi <= 0.0 && gp_norm == 0.0 && l_phi == 0.0 && dt_phi == 0.0) {
        continue;
      }
      const double vol = cell * weight;
      const double u = snap.values[id];
      const double v = u + theta;
      const double g2 = gu.magnitude2(id);
      const double gmag = std::sqrt(g2);
      const double lv = lap.values[id];
      const double vt = ut.field.values[id];
      const double vp = std::pow(v, p);
      const double gq = std::pow(g2, 0.5 * q);          // |∇v|^q
      const double f = std::pow(u, p) - vp;             // f_θ ≤ 0
      const double dot = gu.gx[id] * g_phi[0] + gu.gy[id] * g_phi[1];

      sums.q.f_min = std::min(sums.q.f_min, f);
      sums.q.f_max = std::max(sums.q.f_max, f);
      ++sums.q.cells;

      sums.q.i += vol * w_phi * g2 * g2 / (v * v);
      sums.q.l += vol * w_phi * vp * vp;
      sums.q.g += vol * m * w_phi * g2 * gq / v;
      sums.q.k_direct += vol * w_phi * lv * lv;
      sums.q.j_direct += vol * w_phi * g2 * lv / v;
      sums.q.f_big += vol * w_phi * (f * f - 2.0 * (vt - vp - m * gq) * f);

      sums.boundary += vol * (0.5 * g2 * l_phi + lv * dot - k * g2 * dot / v);

      sums.j_rest += vol * (w_phi * g2 * vt / v + vp * dot / p +
                            w_phi * vp * vt / p - m * w_phi * vp * gq / p -
                            w_phi * vp * f / p - w_phi * g2 * f / v);

      sums.k_rest += vol * (w_phi * vt * vt + m * m * w_phi * gq * gq +
                            2.0 / (p + 1.0) * dt_phi * vp * v -
                            2.0 * m * w_phi * vt * gq +
                            2.0 * m * w_phi * vp * gq);

      sums.published +=
          vol *
          (w_phi * (m * m * gq * gq + m * std::abs(vt) * gq +
                    std::abs(vt) * g2 / v + vp * std::abs(vt) +
                    m * vp * gq + vt * vt) +
           std::abs(dt_phi) * vp * v + std::abs(l_phi) * g2 +
           gp_norm * (g2 * gmag / v +
                      std::abs(vt - vp - m * gq) * gmag + vp * gmag) +
           (w_phi * g2 / v + w_phi * vp + gp_norm * gmag) * f +
           w_phi * (f * f - 2.0 * (vt - vp - m * gq) * f));
    }
  }
  if (sums.q.cells == 0) {
    sums.q.f_min = 0.0;
    sums.q.f_max = 0.0;
  }
  return sums;
}

}  // namespace

SpaceTimeQuantities space_time_quantities(const Trajectory& traj, double theta,
                                          const TestFunction& phi) {
  return space_time_pass(traj, theta, phi, 0.0).q;
}

SpaceTimeCheck verify_space_time_inequality(const Trajectory& traj,
                                            double theta,
                                            const TestFunction& phi,
                                            double k) {
  SpaceTimeCheck check;
  check.coeffs = inequality_coefficients(0.0, k, traj.grid->dim(),
                                         traj.params.p_value());
  const SpaceTimeSums sums = space_time_pass(traj, theta, phi, k);
  check.q = sums.q;
  check.boundary = sums.boundary;
  check.j_rest = sums.j_rest;
  check.k_rest = sums.k_rest + sums.q.f_big;
  check.lhs = check.coeffs.alpha * sums.q.i + check.coeffs.delta * sums.q.l -
              check.coeffs.beta * sums.q.g;
  check.budget = sums.boundary - check.coeffs.beta * check.j_rest -
                 check.coeffs.gamma * check.k_rest;
  check.margin = check.budget - check.lhs;
  check.scale = std::max(std::abs(check.lhs), std::abs(check.budget));
  check.expansion_error_k =
      std::abs(sums.q.k_direct - (check.k_rest + sums.q.l));
  check.expansion_error_j =
      std::abs(sums.q.j_direct -
               (check.j_rest - sums.q.l / traj.params.p_value() - sums.q.g));
  check.published_rhs_unit = sums.published;
  check.fitted_c = (sums.published > 0.0 && check.lhs > 0.0)
                       ? check.lhs / sums.published
                       : 0.0;
  return check;
}

double margin_tolerance(const SpaceTimeCheck& check, double h, double dt) {
  const double truncation = 10.0 * (h * h + dt) * check.scale;
  const double quadrature =
      10.0 * (std::abs(check.coeffs.beta) * check.expansion_error_j +
              std::max(1.0, std::abs(check.coeffs.gamma)) *
                  check.expansion_error_k);
  return truncation + quadrature + 1e-14 * (1.0 + check.scale);
}

ScalingReport critical_mass_scaling(const ProblemParams& params,
                                    const std::vector<double>& radii,
                                    int cells_per_radius, double amplitude) {
  if (classify(params) != Regime::Critical) {
    throw std::invalid_argument("the scaling audit expects critical q");
  }
  if (radii.size() < 2) {
    throw std::invalid_argument("need at least two radii for a slope");
  }
  if (cells_per_radius < 8 || cells_per_radius % 4 != 0) {
    throw std::invalid_argument("cells per radius must be >= 8, divisible by 4");
  }
  const double p = params.p_value();

  ScalingReport report;
  report.reference_slope = -4.0 * p / (p - 1.0) +
                           static_cast<double>(params.dim) + 2.0;
  for (double radius : radii) {
    const double h = radius / static_cast<double>(cells_per_radius);
    auto grid = (params.dim == 2)
                    ? Grid::make_disc({0.0, 0.0}, radius, h)
                    : Grid::make_interval(0.0, radius, h);
    const double scale_amp = amplitude * std::pow(radius, -2.0 / (p - 1.0));
    Field initial = make_field(
        grid,
        [&](double x, double y) {
          const double s =
              (x * x + ((params.dim == 2) ? y * y : 0.0)) / (radius * radius);
          return (s < 1.0 - 1e-8)
                     ? scale_amp * std::exp(1.0 - 1.0 / (1.0 - s))
                     : 0.0;
        },
        0.0);
    SolverConfig config;
    config.dt = stable_dt(*grid, 0.8);
    config.t_end = radius * radius;
    config.bc = BoundaryCondition::DirichletZero;
    const long steps = std::lround(config.t_end / config.dt);
    config.snapshot_stride = static_cast<int>(std::max<long>(1, steps / 160));
    config.record_sup_series = false;
    Trajectory traj = solve(initial, params, config);

    const double t_lo = 0.25 * config.t_end;
    const double t_hi = 0.75 * config.t_end;
    const double cell = (params.dim == 2) ? h * h : h;
    const auto inner = grid->nodes_within(radius / 2.0);
    double total = 0.0;
    for (int s = 0; s < traj.snapshot_count(); ++s) {
      const Field& snap = traj.snapshot(s);
      if (snap.time < t_lo || snap.time > t_hi) continue;
      const double tw = config.dt * config.snapshot_stride;
      for (int id : inner) {
        total += cell * tw * std::pow(snap.values[id], 2.0 * p);
      }
    }
    report.radii.push_back(radius);
    report.integrals.push_back(total);
    if (total < 1e-300) report.degenerate = true;
  }
  if (!report.degenerate) {
    const auto fit = estimates::fit_log_slope(report.radii, report.integrals);
    report.slope = fit.slope;
    report.r2 = fit.r2;
  }
  return report;
}

}  // namespace gradheat::integral
