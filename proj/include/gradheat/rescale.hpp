#pragma once

#include "gradheat/solver.hpp"

namespace gradheat {

/// Evaluation window for the rescaling residual, in the rescaled coordinates
/// (which coincide with physical coordinates relative to the grid center).
struct RescaleWindow {
  double eval_radius = 0.0;  // |x - center| ≤ eval_radius
  double t_lo = 0.0;         // evaluation times drawn from snapshots in
  double t_hi = 0.0;         // [t_lo, t_hi]
  int time_stride = 1;       // take every k-th snapshot in the window
};

/// Interpolates u(y, s) from the trajectory with bilinear (2D) / linear (1D)
/// interpolation in space and linear interpolation in time.
/// Throws OutOfWindowError when (y, s) is outside the computed cylinder.
double interpolate(const Trajectory& traj, double x, double y, double t);

/// Max-norm discrete residual of the rescaled field
///   u_λ(x,t) = λ^{-1} u(λ^{(1-p)/2} x, λ^{1-p} t)
/// against u_t - Δu = u^p + c M |∇u|^q, where c is the scaling coefficient
/// factor when `modified_coefficient` is set and 1 otherwise.
/// Stencils live on an evaluation lattice of spacing h/λ^{(1-p)/2} chosen so
/// every sample maps to an exact source node; at λ = 1 this degenerates to
/// the plain discrete PDE residual on the window.  Throws OutOfWindowError
/// when no complete stencil fits inside the computed cylinder.
double rescaling_residual(const Trajectory& traj, double lambda,
                          const RescaleWindow& window,
                          bool modified_coefficient);

}  // namespace gradheat
