#pragma once

#include <string>
#include <vector>

#include "gradheat/config.hpp"
#include "gradheat/report.hpp"
#include "gradheat/solver.hpp"

namespace gradheat::pipeline {

/// One point of the sweep lattice. Iteration order is fixed (p outermost,
/// then q, coefficient, radius) so reports are reproducible.
struct SweepPoint {
  Rational p;
  Rational q;
  double coeff = 1.0;
  double radius = 1.0;
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg);

/// Filesystem-safe label such as "p3_q3-2_M1_R2" ('/' in rationals becomes
/// '-').
std::string point_label(const SweepPoint& pt);

/// Solves one sweep point. The configured spacing belongs to the base
/// radius; both spacing and an explicit dt scale with the point radius
/// (h ∝ R, dt ∝ R²) so every point resolves the same cell count.
Trajectory run_point(const ExperimentConfig& cfg, const SweepPoint& pt);

/// Writes the final profile and the sup-norm history of one run as plain
/// columnar plot data.
void emit_solution(const Trajectory& traj, const std::string& label,
                   ReportWriter& writer);

/// Runs every configured check at every sweep point. Points are dispatched
/// to `cfg.jobs` workers; rows and summaries are emitted in sweep order
/// afterwards, so output is independent of scheduling. Returns the number
/// of failed check cases.
int run_experiment(const ExperimentConfig& cfg, ReportWriter& writer);

}  // namespace gradheat::pipeline
