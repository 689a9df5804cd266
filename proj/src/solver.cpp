#include "gradheat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gradheat/errors.hpp"

namespace gradheat {

void SolverConfig::validate(const Grid& grid) const {
  if (!(dt > 0.0)) throw std::invalid_argument("solver dt must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("solver t_end must be positive");
  const double bound = grid.spacing() * grid.spacing() / (2.0 * grid.dim());
  if (dt > bound * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "solver dt violates the explicit stability bound h^2/(2 dim)");
  }
  if (bc == BoundaryCondition::Periodic && grid.dim() != 1) {
    throw std::invalid_argument("periodic boundary supported in 1D only");
  }
  if (snapshot_stride < 1) {
    throw std::invalid_argument("snapshot stride must be >= 1");
  }
}

double stable_dt(const Grid& grid, double safety) {
  if (!(safety > 0.0) || safety > 1.0) {
    throw std::invalid_argument("stable_dt safety factor must be in (0, 1]");
  }
  return safety * grid.spacing() * grid.spacing() / (2.0 * grid.dim());
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::CompletedHorizon:
      return "completed";
    case RunStatus::BlowUp:
      return "blowup";
    case RunStatus::Steady:
      return "steady";
  }
  return "unknown";
}

int Trajectory::snapshot_index_near(double t) const {
  int best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < snapshot_count(); ++k) {
    const double d = std::abs(snapshots[k].time - t);
    if (d < dist) {
      dist = d;
      best = k;
    }
  }
  return best;
}

namespace {

struct StepDiag {
  long clamped = 0;
  double min_preclamp = 0.0;
  double sup = 0.0;
  bool nonfinite = false;
  double max_update = 0.0;
};

// Advances `u` by one explicit Euler step into `next`.
// `frozen` holds rim boundary values (empty for periodic runs).
void step_into(const Field& u, const ProblemParams& params,
               const SolverConfig& cfg, const std::vector<double>& frozen,
               Field& next, StepDiag& diag) {
  const Grid& g = *u.grid;
  const int n = g.node_count();
  const double h = g.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const double inv_2h = 1.0 / (2.0 * h);
  const double p = params.p_value();
  const double q = params.q_value();
  const double m = params.gradient_coeff;
  const bool periodic = cfg.bc == BoundaryCondition::Periodic;

  next.grid = u.grid;
  next.time = u.time + cfg.dt;
  next.values.resize(n);

  diag = StepDiag{};
  diag.min_preclamp = std::numeric_limits<double>::infinity();

  for (int id = 0; id < n; ++id) {
    double candidate;
    if (!periodic && g.kind(id) == NodeKind::Rim) {
      candidate = frozen[id];  // Dirichlet value pinned for all time
      next.values[id] = candidate;
      diag.min_preclamp = std::min(diag.min_preclamp, candidate);
      diag.sup = std::max(diag.sup, std::abs(candidate));
      continue;
    }
    double lap = 0.0, gx = 0.0, gy = 0.0;
    if (periodic) {
      const int last = n - 1;
      const auto wrap = [&](int k) { return k < 0 ? last : (k > last ? 0 : k); };
      const double um = u.values[wrap(id - 1)];
      const double up = u.values[wrap(id + 1)];
      lap = (up - 2.0 * u.values[id] + um) * inv_h2;
      gx = (up - um) * inv_2h;
    } else {
      const int xm = g.neighbor(id, 0), xp = g.neighbor(id, 1);
      lap = (u.values[xp] - 2.0 * u.values[id] + u.values[xm]) * inv_h2;
      gx = (u.values[xp] - u.values[xm]) * inv_2h;
      if (g.dim() == 2) {
        const int ym = g.neighbor(id, 2), yp = g.neighbor(id, 3);
        lap += (u.values[yp] - 2.0 * u.values[id] + u.values[ym]) * inv_h2;
        gy = (u.values[yp] - u.values[ym]) * inv_2h;
      }
    }
    double rhs = lap;
    if (cfg.reaction_term) rhs += std::pow(std::max(u.values[id], 0.0), p);
    if (m != 0.0) rhs += m * std::pow(gx * gx + gy * gy, 0.5 * q);
    if (cfg.forcing) {
      const auto c = g.coord(id);
      rhs += cfg.forcing(c[0], c[1], u.time);
    }
    candidate = u.values[id] + cfg.dt * rhs;
    diag.max_update = std::max(diag.max_update, std::abs(cfg.dt * rhs));
    if (!std::isfinite(candidate)) {
      diag.nonfinite = true;
      candidate = std::numeric_limits<double>::quiet_NaN();
    }
    diag.min_preclamp = std::min(diag.min_preclamp, candidate);
    if (candidate < 0.0) {
      candidate = 0.0;
      ++diag.clamped;
    }
    next.values[id] = candidate;
    diag.sup = std::max(diag.sup, std::abs(candidate));
  }
}

std::vector<double> frozen_boundary(const Field& initial,
                                    const SolverConfig& cfg) {
  const Grid& g = *initial.grid;
  std::vector<double> frozen(g.node_count(), 0.0);
  if (cfg.bc == BoundaryCondition::DirichletFrozen) {
    for (int id = 0; id < g.node_count(); ++id) {
      if (g.kind(id) == NodeKind::Rim) frozen[id] = initial.values[id];
    }
  }
  return frozen;
}

}  // namespace

Field step(const Field& u, const ProblemParams& params,
           const SolverConfig& config) {
  params.validate();
  config.validate(*u.grid);
  Field next;
  StepDiag diag;
  step_into(u, params, config, frozen_boundary(u, config), next, diag);
  if (diag.nonfinite) {
    throw NonFiniteError("non-finite value produced at t = " +
                         std::to_string(next.time));
  }
  if (diag.sup > config.blowup_threshold) {
    throw BlowUpError("blow-up threshold crossed at t = " +
                      std::to_string(next.time));
  }
  return next;
}

Trajectory solve(const Field& initial, const ProblemParams& params,
                 const SolverConfig& config) {
  params.validate();
  config.validate(*initial.grid);

  Trajectory traj;
  traj.grid = initial.grid;
  traj.params = params;
  traj.config = config;

  const auto frozen = frozen_boundary(initial, config);
  const long total_steps =
      static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));

  std::vector<long> extra = config.extra_snapshot_steps;
  std::sort(extra.begin(), extra.end());
  auto extra_it = extra.begin();

  auto want_snapshot = [&](long step_index) {
    bool want = (step_index % config.snapshot_stride == 0) ||
                step_index == total_steps;
    while (extra_it != extra.end() && *extra_it < step_index) ++extra_it;
    if (extra_it != extra.end() && *extra_it == step_index) want = true;
    return want;
  };

  Field current = initial;
  current.time = 0.0;
  traj.snapshots.push_back(current);
  traj.snapshot_steps.push_back(0);
  traj.min_preclamp = current.min_value();
  if (config.record_sup_series) {
    traj.sup_times.push_back(0.0);
    traj.sup_values.push_back(current.sup_norm());
  }

  Field next;
  StepDiag diag;
  for (long s = 1; s <= total_steps; ++s) {
    step_into(current, params, config, frozen, next, diag);
    traj.clamp_count += diag.clamped;
    traj.min_preclamp = std::min(traj.min_preclamp, diag.min_preclamp);

    if (diag.nonfinite || diag.sup > config.blowup_threshold) {
      traj.status = RunStatus::BlowUp;
      traj.blowup_time = current.time;
      traj.final_time = current.time;
      return traj;
    }
    std::swap(current, next);
    if (config.record_sup_series) {
      traj.sup_times.push_back(current.time);
      traj.sup_values.push_back(current.sup_norm());
    }
    if (want_snapshot(s)) {
      traj.snapshots.push_back(current);
      traj.snapshot_steps.push_back(s);
    }
    if (diag.max_update < config.steady_tol) {
      traj.status = RunStatus::Steady;
      traj.final_time = current.time;
      if (traj.snapshot_steps.back() != s) {
        traj.snapshots.push_back(current);
        traj.snapshot_steps.push_back(s);
      }
      return traj;
    }
  }
  traj.status = RunStatus::CompletedHorizon;
  traj.final_time = current.time;
  return traj;
}

}  // namespace gradheat
