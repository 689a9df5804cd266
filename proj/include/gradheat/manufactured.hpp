#pragma once

#include <cmath>
#include <functional>

#include "gradheat/params.hpp"
#include "gradheat/solver.hpp"

namespace gradheat {

/// Manufactured 1D solution u(x,t) = e^{-t} cos²(ω x) with ω = π/(2R):
/// the forcing below makes it an exact solution of
///   u_t - Δu = u^p + M |∇u|^q + F.
/// It vanishes to second order at x = ±R, is nonnegative, bounded by 1 and
/// decreasing in time, so it doubles as a hypothesis-satisfying reference.
struct ManufacturedSolution {
  ProblemParams params;
  double radius = 0.0;
  double omega = 0.0;

  double exact(double x, double t) const {
    const double c = std::cos(omega * x);
    return std::exp(-t) * c * c;
  }
  double exact_gradient(double x, double t) const {
    return -omega * std::exp(-t) * std::sin(2.0 * omega * x);
  }

  /// F = u_t - Δu - u^p - M |∇u|^q evaluated on the exact solution.
  double forcing(double x, double t) const {
    const double p = params.p_value();
    const double q = params.q_value();
    const double m = params.gradient_coeff;
    const double c = std::cos(omega * x);
    const double u = std::exp(-t) * c * c;
    const double lap = -2.0 * omega * omega * std::exp(-t) *
                       std::cos(2.0 * omega * x);
    const double gmag = std::abs(exact_gradient(x, t));
    return -u - lap - std::pow(u, p) - m * std::pow(gmag, q);
  }

  /// ∂F/∂x in closed form (needed by the calibration identity).
  double forcing_gradient(double x, double t) const {
    const double p = params.p_value();
    const double q = params.q_value();
    const double m = params.gradient_coeff;
    const double et = std::exp(-t);
    const double s2 = std::sin(2.0 * omega * x);
    const double c2 = std::cos(2.0 * omega * x);
    const double c = std::cos(omega * x);
    const double s = std::sin(omega * x);
    // d/dx of -u:
    double out = et * omega * s2;
    // d/dx of -Δu = +2ω² e^{-t} cos(2ωx) differentiated:
    out += -4.0 * omega * omega * omega * et * s2;
    // d/dx of -u^p = -(e^{-t})^p cos^{2p}:
    out += 2.0 * p * omega * std::pow(et, p) * std::pow(c, 2.0 * p - 1.0) * s;
    // d/dx of -M ω^q e^{-qt} |sin 2ωx|^q:
    const double mag = std::abs(s2);
    if (mag > 0.0) {
      out += -2.0 * q * m * std::pow(omega, q + 1.0) * std::pow(et, q) *
             std::pow(mag, q - 1.0) * (s2 > 0 ? 1.0 : -1.0) * c2;
    }
    return out;
  }
};

inline ManufacturedSolution make_manufactured(const ProblemParams& params,
                                              double radius) {
  ManufacturedSolution ms;
  ms.params = params;
  ms.radius = radius;
  ms.omega = std::acos(-1.0) / (2.0 * radius);
  return ms;
}

/// Runs the manufactured problem on a fresh interval grid.
/// `extra_steps` are recorded in addition to the stride (for exact time
/// stencils around a sampling instant).
Trajectory run_manufactured(const ManufacturedSolution& ms, double h,
                            double dt, double t_end, int snapshot_stride,
                            const std::vector<long>& extra_steps = {});

}  // namespace gradheat
