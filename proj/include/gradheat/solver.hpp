#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gradheat/grid.hpp"
#include "gradheat/params.hpp"

namespace gradheat {

enum class BoundaryCondition {
  DirichletZero,    // rim nodes pinned to 0
  DirichletFrozen,  // rim nodes pinned to their initial values
  Periodic,         // 1D only; every node evolves with wrapped stencils
};

/// Explicit forward-Euler configuration.  `dt` must respect the diffusive
/// stability bound dt ≤ safety · h² / (2 dim); use stable_dt() to derive it.
struct SolverConfig {
  double dt = 0.0;
  double t_end = 0.0;
  BoundaryCondition bc = BoundaryCondition::DirichletZero;
  double blowup_threshold = 1e8;
  double steady_tol = 1e-13;     // max |update| below this ⇒ steady state
  int snapshot_stride = 1;       // record every k-th step
  std::vector<long> extra_snapshot_steps;  // additional step indices to record
  bool reaction_term = true;     // include u^p (off for control experiments)
  bool record_sup_series = true;
  // Optional source term F(x, y, t) for manufactured solutions.
  std::function<double(double, double, double)> forcing;

  /// Throws std::invalid_argument if dt/t_end are unusable for this grid.
  void validate(const Grid& grid) const;
};

/// Largest stable step for the diffusion part, h²/(2 dim), times `safety`.
double stable_dt(const Grid& grid, double safety = 0.8);

enum class RunStatus { CompletedHorizon, BlowUp, Steady };

std::string to_string(RunStatus s);

/// Result of a time integration: recorded snapshots plus run diagnostics.
struct Trajectory {
  std::shared_ptr<const Grid> grid;
  ProblemParams params;
  SolverConfig config;
  std::vector<Field> snapshots;       // snapshots[k].time increasing
  std::vector<long> snapshot_steps;   // step index of each snapshot
  RunStatus status = RunStatus::CompletedHorizon;
  double final_time = 0.0;            // last stable time reached
  std::optional<double> blowup_time;  // last stable time before the flag fired
  long clamp_count = 0;               // negative values clamped to 0
  double min_preclamp = 0.0;          // most negative value seen pre-clamp
  std::vector<double> sup_times;      // per-step sup-norm series
  std::vector<double> sup_values;

  double dt() const { return config.dt; }
  const Field& snapshot(int k) const { return snapshots[k]; }
  int snapshot_count() const { return static_cast<int>(snapshots.size()); }

  /// Index of the snapshot whose time is closest to t.
  int snapshot_index_near(double t) const;
};

/// One explicit Euler step.  Throws BlowUpError / NonFiniteError on failure;
/// negative values are clamped to zero (use solve() to aggregate counts).
Field step(const Field& u, const ProblemParams& params,
           const SolverConfig& config);

/// Integrates from `initial` to t_end (or blow-up / steady state).
Trajectory solve(const Field& initial, const ProblemParams& params,
                 const SolverConfig& config);

}  // namespace gradheat
