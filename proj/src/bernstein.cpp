#include "gradheat/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gradheat/errors.hpp"
#include "gradheat/manufactured.hpp"

namespace gradheat::bernstein {

AuxiliaryFunction AuxiliaryFunction::power_shift(double scale,
                                                 double exponent) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("power-shift scale m must be positive");
  }
  if (!(exponent > 1.0)) {
    throw std::invalid_argument("power-shift exponent must exceed 1");
  }
  AuxiliaryFunction f;
  f.kind_ = Kind::PowerShift;
  f.scale_ = scale;
  f.exponent_ = exponent;
  return f;
}

AuxiliaryFunction AuxiliaryFunction::identity() {
  AuxiliaryFunction f;
  f.kind_ = Kind::Identity;
  return f;
}

double AuxiliaryFunction::value(double s) const {
  if (kind_ == Kind::Identity) return s;
  return scale_ * std::pow(s + 1.0, exponent_) - 2.0 * scale_;
}

double AuxiliaryFunction::deriv(double s) const {
  if (kind_ == Kind::Identity) return 1.0;
  return scale_ * exponent_ * std::pow(s + 1.0, exponent_ - 1.0);
}

double AuxiliaryFunction::second(double s) const {
  if (kind_ == Kind::Identity) return 0.0;
  return scale_ * exponent_ * (exponent_ - 1.0) *
         std::pow(s + 1.0, exponent_ - 2.0);
}

double AuxiliaryFunction::curvature_ratio(double s) const {
  if (kind_ == Kind::Identity) return 0.0;
  return (exponent_ - 1.0) / (s + 1.0);
}

double AuxiliaryFunction::curvature_ratio_deriv(double s) const {
  if (kind_ == Kind::Identity) return 0.0;
  return -(exponent_ - 1.0) / ((s + 1.0) * (s + 1.0));
}

double AuxiliaryFunction::domain_max() const {
  if (kind_ == Kind::Identity) {
    return std::numeric_limits<double>::infinity();
  }
  return std::pow(2.0, 1.0 / exponent_) - 1.0;
}

double AuxiliaryFunction::inverse_of_minus(double u) const {
  if (kind_ == Kind::Identity) return -u;
  if (u < -1e-14 * scale_ || u > scale_ * (1.0 + 1e-12)) {
    throw std::domain_error(
        "power-shift transform needs 0 <= u <= m (u out of range)");
  }
  const double clamped = std::clamp(u, 0.0, scale_);
  // m (v+1)^γ - 2m = -u  ⇒  v = (2 - u/m)^{1/γ} - 1
  return std::pow(2.0 - clamped / scale_, 1.0 / exponent_) - 1.0;
}

Field transform(const Field& u, const AuxiliaryFunction& f) {
  Field v;
  v.grid = u.grid;
  v.time = u.time;
  v.values.resize(u.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    v.values[i] = f.inverse_of_minus(u.values[i]);
  }
  return v;
}

double gamma_identity_residual(double gamma, int dim, double q,
                               std::span<const double> samples) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(q > 1.0)) throw std::invalid_argument("q must exceed 1");
  const double ratio_coeff = gamma - 1.0;  // f''/f' = (γ-1)/(s+1)
  const double weight = 3.0 * (q - 1.0) / dim;
  double worst = 0.0;
  for (double s : samples) {
    const double sp1 = s + 1.0;
    const double deriv = -ratio_coeff / (sp1 * sp1);
    const double square = weight * (ratio_coeff / sp1) * (ratio_coeff / sp1);
    worst = std::max(worst, std::abs(deriv + square));
  }
  return worst;
}

double gamma_identity_residual(const AuxiliaryFunction& f, int dim, double q,
                               std::span<const double> samples) {
  if (f.kind() == AuxiliaryFunction::Kind::Identity) {
    throw std::invalid_argument(
        "exponent identity is vacuous for the identity auxiliary function");
  }
  return gamma_identity_residual(f.exponent(), dim, q, samples);
}

Cutoff Cutoff::make(std::array<double, 2> center, double full_radius,
                    double alpha, double power) {
  if (!(full_radius > 0.0)) {
    throw std::invalid_argument("cutoff radius must be positive");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("cutoff alpha must lie in (0, 1)");
  }
  Cutoff eta;
  eta.center = center;
  eta.full_radius = full_radius;
  eta.support_radius = 0.75 * full_radius;
  eta.alpha = alpha;
  eta.power = (power > 0.0) ? power : std::ceil(2.0 / (1.0 - alpha));
  if (eta.power < 2.0 / (1.0 - alpha) - 1e-12) {
    throw std::invalid_argument("cutoff power must be >= 2/(1-alpha)");
  }
  return eta;
}

double Cutoff::rho(double x, double y) const {
  const double dx = x - center[0];
  const double dy = y - center[1];
  const double r2 = dx * dx + dy * dy;
  return std::max(0.0, 1.0 - r2 / (support_radius * support_radius));
}

double Cutoff::value(double x, double y) const {
  const double r = rho(x, y);
  return (r > 0.0) ? std::pow(r, power) : 0.0;
}

std::array<double, 2> Cutoff::grad(double x, double y) const {
  const double r = rho(x, y);
  if (r <= 0.0) return {0.0, 0.0};
  const double scale =
      -2.0 * power * std::pow(r, power - 1.0) / (support_radius * support_radius);
  return {scale * (x - center[0]), scale * (y - center[1])};
}

std::array<double, 3> Cutoff::hess(double x, double y) const {
  const double r = rho(x, y);
  if (r <= 0.0) return {0.0, 0.0, 0.0};
  const double inv = 1.0 / (support_radius * support_radius);
  const double dx = x - center[0];
  const double dy = y - center[1];
  // η = ρ^k, ∇ρ = -2 x̃ / R'², D²ρ = -2 I / R'².
  const double a = power * std::pow(r, power - 1.0);        // k ρ^{k-1}
  const double b = (power >= 2.0)
                       ? power * (power - 1.0) * std::pow(r, power - 2.0)
                       : 0.0;                               // k(k-1) ρ^{k-2}
  const double gxx = b * (2.0 * inv * dx) * (2.0 * inv * dx) - 2.0 * inv * a;
  const double gyy = b * (2.0 * inv * dy) * (2.0 * inv * dy) - 2.0 * inv * a;
  const double gxy = b * (2.0 * inv * dx) * (2.0 * inv * dy);
  return {gxx, gxy, gyy};
}

double Cutoff::grad2_over_value(double x, double y) const {
  const double r = rho(x, y);
  if (r <= 0.0) return 0.0;
  const double inv = 1.0 / (support_radius * support_radius);
  const double dx = x - center[0];
  const double dy = y - center[1];
  const double g2 = 4.0 * inv * inv * (dx * dx + dy * dy);
  // |∇η|²/η = k² ρ^{k-2} |∇ρ|²
  return power * power * std::pow(r, power - 2.0) * g2;
}

namespace {

double cutoff_hess_norm(const std::array<double, 3>& hmat, int dim) {
  if (dim == 1) return std::abs(hmat[0]);
  return std::sqrt(hmat[0] * hmat[0] + 2.0 * hmat[1] * hmat[1] +
                   hmat[2] * hmat[2]);
}

}  // namespace

CutoffConstants measure_cutoffs_impl(const Cutoff& eta, const Grid& grid) {
  CutoffConstants out;
  for (int id = 0; id < grid.node_count(); ++id) {
    const auto c = grid.coord(id);
    const double e = eta.value(c[0], c[1]);
    if (e <= 0.0) continue;
    const auto g = eta.grad(c[0], c[1]);
    const auto hmat = eta.hess(c[0], c[1]);
    const double gnorm = std::hypot(g[0], g[1]);
    const double hnorm = cutoff_hess_norm(hmat, grid.dim());
    const double ealpha = std::pow(e, eta.alpha);
    out.grad_constant = std::max(
        out.grad_constant, gnorm * eta.full_radius / ealpha);
    out.hess_constant = std::max(
        out.hess_constant,
        (hnorm + eta.grad2_over_value(c[0], c[1])) * eta.full_radius *
            eta.full_radius / ealpha);
  }
  out.overall = std::max(out.grad_constant, out.hess_constant);
  return out;
}

CutoffConstants measure_cutoff_constants(const Cutoff& eta, const Grid& grid) {
  return measure_cutoffs_impl(eta, grid);
}

double bochner_residual(const Field& v) {
  const Grid& g = *v.grid;
  const auto gv = gradient(v);
  const auto hv = hessian(v);
  const auto lv = laplacian(v);

  Field w;
  w.grid = v.grid;
  w.time = v.time;
  w.values.assign(g.node_count(), 0.0);
  for (int id = 0; id < g.node_count(); ++id) {
    if (gv.valid[id]) w.values[id] = gv.magnitude2(id);
  }
  Field lap_v_field;
  lap_v_field.grid = v.grid;
  lap_v_field.values = lv.values;
  const auto grad_lap = gradient(lap_v_field);
  const auto lap_w = laplacian(w);

  double worst = 0.0;
  for (int id = 0; id < g.node_count(); ++id) {
    if (!g.has_interior_margin(id, 2)) continue;
    const double lhs = 2.0 * (gv.gx[id] * grad_lap.gx[id] +
                              gv.gy[id] * grad_lap.gy[id]);
    const double rhs = lap_w.values[id] - 2.0 * hv.frobenius2(id);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

namespace {

// Everything needed from one snapshot for the operator audit.
struct SnapshotPack {
  Field v;
  GradientField gv;
  Field w;  // |∇v|² where the gradient stencil exists, else 0
  Field z;  // w η
};

SnapshotPack build_pack(const Field& u, const AuxiliaryFunction& f,
                        const Cutoff& eta) {
  SnapshotPack pack;
  pack.v = transform(u, f);
  pack.gv = gradient(pack.v);
  const Grid& g = *u.grid;
  pack.w.grid = u.grid;
  pack.w.time = u.time;
  pack.w.values.assign(g.node_count(), 0.0);
  pack.z = pack.w;
  for (int id = 0; id < g.node_count(); ++id) {
    if (!pack.gv.valid[id]) continue;
    const double w = pack.gv.magnitude2(id);
    pack.w.values[id] = w;
    const auto c = g.coord(id);
    pack.z.values[id] = w * eta.value(c[0], c[1]);
  }
  return pack;
}

}  // namespace

OperatorResidualReport operator_inequality_residual(
    const Trajectory& traj, int index, const AuxiliaryFunction& f,
    const Cutoff& eta, const OperatorOptions& opts) {
  if (index < 1 || index + 1 >= traj.snapshot_count()) {
    throw std::out_of_range(
        "operator residual needs snapshots on both sides of the index");
  }
  const Field& u_prev = traj.snapshot(index - 1);
  const Field& u_mid = traj.snapshot(index);
  const Field& u_next = traj.snapshot(index + 1);
  const Grid& g = *u_mid.grid;
  const ProblemParams& params = traj.params;
  const double p = params.p_value();
  const double q = params.q_value();
  const double m_coeff = params.gradient_coeff;
  const double sqrt_n = std::sqrt(static_cast<double>(g.dim()));

  SnapshotPack prev = build_pack(u_prev, f, eta);
  SnapshotPack mid = build_pack(u_mid, f, eta);
  SnapshotPack next = build_pack(u_next, f, eta);
  const HessianField hv = hessian(mid.v);

  const double ha = u_mid.time - u_prev.time;
  const double hb = u_next.time - u_mid.time;
  const double h = g.spacing();

  OperatorResidualReport report;
  report.residual.grid = u_mid.grid;
  report.residual.time = u_mid.time;
  report.residual.values.assign(g.node_count(), 0.0);
  report.residual.valid.assign(g.node_count(), 0);
  report.lhs = zero_field(u_mid.grid, u_mid.time);
  report.rhs = zero_field(u_mid.grid, u_mid.time);

  double max_ut = -std::numeric_limits<double>::infinity();
  double max_u = 0.0;
  double worst = -std::numeric_limits<double>::infinity();

  for (int id = 0; id < g.node_count(); ++id) {
    if (!g.has_interior_margin(id, 2)) {
      ++report.excluded_stencil;
      continue;
    }
    const auto c = g.coord(id);
    const double eta_val = eta.value(c[0], c[1]);
    if (eta_val <= 0.0) continue;  // outside the localization support

    const double u_val = u_mid.values[id];
    const double fp = f.deriv(mid.v.values[id]);
    // |∇u| = f'(v) |∇v| ; exclusion threshold acts on |∇u|.
    const double w_val = mid.w.values[id];
    const double grad_u = fp * std::sqrt(w_val);
    if (grad_u <= opts.gradient_threshold) {
      ++report.excluded_low_gradient;
      continue;
    }

    max_u = std::max(max_u, u_val);
    const double ut = (hb * hb * (u_mid.values[id] - u_prev.values[id]) +
                       ha * ha * (u_next.values[id] - u_mid.values[id])) /
                      (ha * hb * (ha + hb));
    max_ut = std::max(max_ut, ut);

    // L z = ∂_t z - Δ z + H · ∇z.
    const double zt = (hb * hb * (mid.z.values[id] - prev.z.values[id]) +
                       ha * ha * (next.z.values[id] - mid.z.values[id])) /
                      (ha * hb * (ha + hb));
    const int xm = g.neighbor(id, 0), xp = g.neighbor(id, 1);
    double lap_z = (mid.z.values[xp] - 2.0 * mid.z.values[id] +
                    mid.z.values[xm]) /
                   (h * h);
    double zgx = (mid.z.values[xp] - mid.z.values[xm]) / (2.0 * h);
    double zgy = 0.0;
    if (g.dim() == 2) {
      const int ym = g.neighbor(id, 2), yp = g.neighbor(id, 3);
      lap_z += (mid.z.values[yp] - 2.0 * mid.z.values[id] +
                mid.z.values[ym]) /
               (h * h);
      zgy = (mid.z.values[yp] - mid.z.values[ym]) / (2.0 * h);
    }
    const double curv = f.curvature_ratio(mid.v.values[id]);
    const double drift_scale =
        q * m_coeff * std::pow(fp, q - 1.0) * std::pow(w_val, 0.5 * q - 1.0) -
        2.0 * curv;
    const double hdotz =
        drift_scale * (mid.gv.gx[id] * zgx + mid.gv.gy[id] * zgy);
    const double lz = zt - lap_z + hdotz;

    // Matched right-hand side.
    const double fpp = f.second(mid.v.values[id]);
    const auto eg = eta.grad(c[0], c[1]);
    const double eg_norm = std::hypot(eg[0], eg[1]);
    const auto ehess = eta.hess(c[0], c[1]);
    const double rhs =
        2.0 * p * std::pow(u_val, p - 1.0) * w_val * eta_val +
        2.0 * (fpp / (fp * fp)) * std::pow(u_val, p) * w_val * eta_val +
        2.0 * f.curvature_ratio_deriv(mid.v.values[id]) * w_val * w_val *
            eta_val -
        2.0 * (q - 1.0) * m_coeff * std::pow(fp, q - 2.0) * fpp *
            std::pow(w_val, 0.5 * (q + 2.0)) * eta_val +
        sqrt_n * cutoff_hess_norm(ehess, g.dim()) * w_val +
        q * m_coeff * std::pow(fp, q - 1.0) * eg_norm *
            std::pow(w_val, 0.5 * (q + 1.0)) +
        2.0 * std::abs(curv) * eg_norm * std::pow(w_val, 1.5) +
        4.0 * eta.grad2_over_value(c[0], c[1]) * w_val -
        hv.frobenius2(id) * eta_val;

    report.lhs.values[id] = lz;
    report.rhs.values[id] = rhs;
    report.residual.values[id] = lz - rhs;
    report.residual.valid[id] = 1;
    ++report.included;
    worst = std::max(worst, lz - rhs);
  }

  if (std::isfinite(opts.bound) && max_u > opts.bound * (1.0 + 1e-12)) {
    throw HypothesisError("snapshot exceeds the hypothesis bound");
  }
  if (std::isfinite(opts.monotonicity_tol) && report.included > 0 &&
      max_ut > opts.monotonicity_tol) {
    throw HypothesisError("snapshot violates monotone decrease in time");
  }
  report.max_residual = (report.included > 0) ? worst : 0.0;
  return report;
}

Field inequality_rhs_interior(const Field& u, const AuxiliaryFunction& f,
                              const Cutoff& eta, const ProblemParams& params) {
  const Grid& g = *u.grid;
  const double p = params.p_value();
  const double q = params.q_value();
  const double m_coeff = params.gradient_coeff;
  SnapshotPack pack = build_pack(u, f, eta);
  Field out = zero_field(u.grid, u.time);
  for (int id = 0; id < g.node_count(); ++id) {
    if (!pack.gv.valid[id]) continue;
    const auto c = g.coord(id);
    const double eta_val = eta.value(c[0], c[1]);
    if (eta_val <= 0.0) continue;
    const double w_val = pack.w.values[id];
    const double u_val = u.values[id];
    const double s = pack.v.values[id];
    const double fp = f.deriv(s);
    const double fpp = f.second(s);
    out.values[id] =
        2.0 * p * std::pow(u_val, p - 1.0) * w_val * eta_val +
        2.0 * (fpp / (fp * fp)) * std::pow(u_val, p) * w_val * eta_val +
        2.0 * f.curvature_ratio_deriv(s) * w_val * w_val * eta_val -
        2.0 * (q - 1.0) * m_coeff * std::pow(fp, q - 2.0) * fpp *
            std::pow(w_val, 0.5 * (q + 2.0)) * eta_val;
  }
  return out;
}

double calibrate_tolerance_coefficient(const ProblemParams& params,
                                       double radius, double h, double dt,
                                       double t_sample) {
  const ManufacturedSolution ms = make_manufactured(params, radius);
  const long mid_step = std::lround(t_sample / dt);
  if (mid_step < 1) {
    throw std::invalid_argument("calibration sample time too early");
  }
  Trajectory traj =
      run_manufactured(ms, h, dt, (mid_step + 2) * dt, 1 << 30,
                       {mid_step - 1, mid_step, mid_step + 1});
  int index = -1;
  for (int k = 0; k < traj.snapshot_count(); ++k) {
    if (traj.snapshot_steps[k] == mid_step) index = k;
  }
  if (index < 1 || index + 1 >= traj.snapshot_count()) {
    throw std::logic_error("calibration snapshots missing");
  }

  const Grid& g = *traj.grid;
  const double p = params.p_value();
  const double q = params.q_value();
  const double m_coeff = params.gradient_coeff;
  const double gamma = aux_exponent(g.dim(), params.q);
  const AuxiliaryFunction f = AuxiliaryFunction::power_shift(1.0, gamma);
  const Cutoff eta = Cutoff::make({g.center()[0], g.center()[1]},
                                  g.radius(), 0.5);

  const Field& u_prev = traj.snapshot(index - 1);
  const Field& u_mid = traj.snapshot(index);
  const Field& u_next = traj.snapshot(index + 1);
  SnapshotPack prev = build_pack(u_prev, f, eta);
  SnapshotPack mid = build_pack(u_mid, f, eta);
  SnapshotPack next = build_pack(u_next, f, eta);
  const HessianField hv = hessian(mid.v);
  const GradientField gw = gradient(mid.w);

  const double ha = u_mid.time - u_prev.time;
  const double hb = u_next.time - u_mid.time;
  const double t_mid = u_mid.time;

  double worst = 0.0;
  for (int id = 0; id < g.node_count(); ++id) {
    if (!g.has_interior_margin(id, 2)) continue;
    const auto c = g.coord(id);
    const double eta_val = eta.value(c[0], c[1]);
    if (eta_val <= 0.0) continue;
    const double w_val = mid.w.values[id];
    const double fp = f.deriv(mid.v.values[id]);
    if (fp * std::sqrt(w_val) <= 1e-8) continue;

    const double zt = (hb * hb * (mid.z.values[id] - prev.z.values[id]) +
                       ha * ha * (next.z.values[id] - mid.z.values[id])) /
                      (ha * hb * (ha + hb));
    const double h_sp = g.spacing();
    const int xm = g.neighbor(id, 0), xp = g.neighbor(id, 1);
    double lap_z = (mid.z.values[xp] - 2.0 * mid.z.values[id] +
                    mid.z.values[xm]) /
                   (h_sp * h_sp);
    double zgx = (mid.z.values[xp] - mid.z.values[xm]) / (2.0 * h_sp);
    const double curv = f.curvature_ratio(mid.v.values[id]);
    const double drift_scale =
        q * m_coeff * std::pow(fp, q - 1.0) * std::pow(w_val, 0.5 * q - 1.0) -
        2.0 * curv;
    const double hdotz = drift_scale * mid.gv.gx[id] * zgx;
    const double lz = zt - lap_z + hdotz;

    // Exact identity: L z = η N(w) + w L(η) - 2 ∇w·∇η - 2|D²v|² η, where the
    // forced equation contributes 2 ∇v·∇F / f' - 2 F (f''/f'²) w inside N(w).
    const double u_val = u_mid.values[id];
    const double fpp = f.second(mid.v.values[id]);
    const double fx = ms.forcing(c[0], t_mid);
    const double fgx = ms.forcing_gradient(c[0], t_mid);
    const double interior =
        2.0 * p * std::pow(u_val, p - 1.0) * w_val +
        2.0 * (fpp / (fp * fp)) * std::pow(u_val, p) * w_val +
        2.0 * f.curvature_ratio_deriv(mid.v.values[id]) * w_val * w_val -
        2.0 * (q - 1.0) * m_coeff * std::pow(fp, q - 2.0) * fpp *
            std::pow(w_val, 0.5 * (q + 2.0)) +
        2.0 * mid.gv.gx[id] * fgx / fp -
        2.0 * fx * (fpp / (fp * fp)) * w_val;

    const auto eg = eta.grad(c[0], c[1]);
    const auto ehess = eta.hess(c[0], c[1]);
    const double lap_eta = ehess[0] + (g.dim() == 2 ? ehess[2] : 0.0);
    const double l_eta = -lap_eta + drift_scale * (mid.gv.gx[id] * eg[0] +
                                                   mid.gv.gy[id] * eg[1]);
    const double grad_w_dot_eta = gw.gx[id] * eg[0] + gw.gy[id] * eg[1];
    const double chain = eta_val * interior + w_val * l_eta -
                         2.0 * grad_w_dot_eta -
                         2.0 * hv.frobenius2(id) * eta_val;
    worst = std::max(worst, std::abs(lz - chain));
  }
  return worst / (h * h + dt);
}

}  // namespace gradheat::bernstein

namespace gradheat {

Trajectory run_manufactured(const ManufacturedSolution& ms, double h,
                            double dt, double t_end, int snapshot_stride,
                            const std::vector<long>& extra_steps) {
  auto grid = Grid::make_interval(0.0, ms.radius, h);
  Field initial = make_field(
      grid, [&ms](double x, double) { return ms.exact(x, 0.0); }, 0.0);
  SolverConfig config;
  config.dt = dt;
  config.t_end = t_end;
  config.bc = BoundaryCondition::DirichletZero;
  config.snapshot_stride = snapshot_stride;
  config.extra_snapshot_steps = extra_steps;
  config.forcing = [ms](double x, double, double t) {
    return ms.forcing(x, t);
  };
  return solve(initial, ms.params, config);
}

}  // namespace gradheat
