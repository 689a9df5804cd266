#pragma once

#include <array>
#include <span>
#include <vector>

#include "gradheat/fdm.hpp"
#include "gradheat/grid.hpp"
#include "gradheat/manufactured.hpp"
#include "gradheat/params.hpp"
#include "gradheat/solver.hpp"

namespace gradheat::bernstein {

/// The auxiliary change of variables u = -f(v).
///
/// PowerShift: f(s) = m (s+1)^γ - 2m, increasing and convex on s ≥ 0, which
/// maps [0, 2^{1/γ} - 1] onto [-m, 0] (so v = f⁻¹(-u) is defined for
/// 0 ≤ u ≤ m).  Its curvature ratio f''/f' = (γ-1)/(s+1) satisfies the
/// exponent identity tested by gamma_identity_residual when γ = 1 + N/(3(q-1)).
///
/// Identity: f(s) = s, used in the strongly supercritical regime (no
/// curvature, v = -u).
class AuxiliaryFunction {
 public:
  enum class Kind { PowerShift, Identity };

  static AuxiliaryFunction power_shift(double scale, double exponent);
  static AuxiliaryFunction identity();

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }        // m
  double exponent() const { return exponent_; }  // γ

  double value(double s) const;
  double deriv(double s) const;
  double second(double s) const;
  double curvature_ratio(double s) const;        // f''/f'
  double curvature_ratio_deriv(double s) const;  // (f''/f')'

  /// Upper end of the admissible v-range (2^{1/γ} - 1 for PowerShift,
  /// +inf for Identity).
  double domain_max() const;

  /// v = f⁻¹(-u).  Throws std::domain_error when u is outside the range
  /// covered by the variant (PowerShift needs 0 ≤ u ≤ m).
  double inverse_of_minus(double u) const;

 private:
  Kind kind_ = Kind::Identity;
  double scale_ = 1.0;
  double exponent_ = 1.0;
};

/// Applies v = f⁻¹(-u) nodewise.
Field transform(const Field& u, const AuxiliaryFunction& f);

/// Residual of the exponent identity
///   (f''/f')' + (3(q-1)/N) (f''/f')²  with f''/f' = (γ-1)/(s+1),
/// maximized over the sample points.  Zero (to rounding) exactly when
/// γ = 1 + N/(3(q-1)).
double gamma_identity_residual(double gamma, int dim, double q,
                               std::span<const double> samples);

/// Same, reading γ from the auxiliary function.  Rejects the Identity
/// variant (no curvature; the identity is vacuous) with std::invalid_argument.
double gamma_identity_residual(const AuxiliaryFunction& f, int dim, double q,
                               std::span<const double> samples);

/// Localizing cutoff η(x) = ρ(x)^k with ρ = max(0, 1 - |x-x₀|²/R'²) and
/// R' = 3R/4.  All derivatives are closed-form.
struct Cutoff {
  std::array<double, 2> center{0.0, 0.0};
  double full_radius = 0.0;     // R
  double support_radius = 0.0;  // R' = 3R/4
  double power = 2.0;           // k ≥ 2/(1-α)
  double alpha = 0.5;           // decay exponent in the derivative bounds

  /// Builds a cutoff; power defaults to ceil(2/(1-α)) when `power` ≤ 0.
  static Cutoff make(std::array<double, 2> center, double full_radius,
                     double alpha, double power = 0.0);

  double rho(double x, double y) const;
  double value(double x, double y) const;
  std::array<double, 2> grad(double x, double y) const;
  /// Hessian entries (xx, xy, yy).
  std::array<double, 3> hess(double x, double y) const;
  /// |∇η|²/η in closed form (finite on the whole support since k ≥ 2).
  double grad2_over_value(double x, double y) const;
};

/// Measured constants of the cutoff derivative bounds over a grid:
///   |∇η| ≤ C R⁻¹ η^α   and   |D²η| + η⁻¹|∇η|² ≤ C R⁻² η^α.
struct CutoffConstants {
  double grad_constant = 0.0;
  double hess_constant = 0.0;
  double overall = 0.0;
};
CutoffConstants measure_cutoff_constants(const Cutoff& eta, const Grid& grid);

/// Max-norm residual of the discrete Bochner identity
///   2 (∇v, ∇Δv) = Δ|∇v|² - 2|D²v|²
/// over nodes with two full stencil rings.
double bochner_residual(const Field& v);

struct OperatorOptions {
  double gradient_threshold = 1e-8;  // exclude nodes with |∇u| ≤ this
  // Optional hypothesis gate: sup u ≤ bound and max u_t ≤ monotonicity_tol
  // over included nodes.  Infinite values skip the gate.
  double bound = std::numeric_limits<double>::infinity();
  double monotonicity_tol = std::numeric_limits<double>::infinity();
};

/// Pointwise audit report for the parabolic inequality satisfied by
/// z = |∇v|² η along the drift operator L = ∂_t - Δ + H·∇.
struct OperatorResidualReport {
  MaskedField residual;  // L z - RHS at included nodes
  Field lhs;             // L z
  Field rhs;             // the matched right-hand side
  int included = 0;
  int excluded_low_gradient = 0;
  int excluded_stencil = 0;
  double max_residual = 0.0;  // max over included nodes (0 if none)
};

/// Evaluates the inequality residual at snapshot `index` of a trajectory
/// (needs snapshots index±1 for the time derivative of z).
/// Throws HypothesisError when the configured gate fails.
OperatorResidualReport operator_inequality_residual(
    const Trajectory& traj, int index, const AuxiliaryFunction& f,
    const Cutoff& eta, const OperatorOptions& opts = {});

/// The interior (cutoff-free) part of the inequality right-hand side,
/// i.e. the reaction/curvature terms multiplied by η.  Used by the
/// coefficient-sign audit: increasing M can only decrease this part
/// wherever the gradient is nonzero.
Field inequality_rhs_interior(const Field& u, const AuxiliaryFunction& f,
                              const Cutoff& eta, const ProblemParams& params);

/// Measures the discretization constant C₀ of the tolerance model
/// tol = C₀ (h² + dt): evaluates the exact operator identity on a
/// manufactured forced solution (where the continuum residual is zero) and
/// returns max |identity residual| / (h² + dt) at the sampling time.
double calibrate_tolerance_coefficient(const ProblemParams& params,
                                       double radius, double h, double dt,
                                       double t_sample);

}  // namespace gradheat::bernstein
