#pragma once

#include <string>

#include "gradheat/rational.hpp"

namespace gradheat {

/// Problem data for  u_t - Δu = u^p + M |∇u|^q  on a ball in dimension 1 or 2.
///
/// The exponents are kept as exact rationals: the regime boundary q = 2p/(p+1)
/// must be decided exactly, never through floating point.
struct ProblemParams {
  int dim = 1;                  // spatial dimension N ∈ {1, 2}
  Rational p{3};                // reaction exponent, p > 1
  Rational q{3, 2};             // gradient-source exponent, 1 < q < 2
  double gradient_coeff = 1.0;  // M ≥ 0

  double p_value() const { return p.to_double(); }
  double q_value() const { return q.to_double(); }

  /// Throws std::domain_error when outside the admissible box
  /// (dim ∈ {1,2}, p > 1, 1 < q < 2, M ≥ 0).
  void validate() const;
};

/// Position of q relative to the scaling-critical exponent 2p/(p+1).
enum class Regime { Subcritical, Critical, Supercritical };

std::string to_string(Regime r);

/// Classifies (p, q) by exact comparison of q(p+1) with 2p.
/// Throws std::domain_error for p ≤ 1 or q ≤ 1.
Regime classify(const ProblemParams& params);

/// The critical exponent q_c = 2p/(p+1) for a given p > 1.
Rational critical_q(const Rational& p);

/// Derived exponents and thresholds attached to a parameter choice.
struct CriticalExponents {
  Rational q_crit;            // 2p/(p+1), always in (1, 2)
  RationalOrInf p_sobolev;    // (N+2)/(N-2), infinite for N ≤ 2
  RationalOrInf p_bidaut_veron;  // N(N+2)/(N-1)^2, infinite for N = 1
  double coeff_threshold;     // (6N(p+1))^{p/(p+1)} ((p+1)/(p-1))^{1/2}
  double aux_exponent;        // 1 + N/(3(q-1)), exponent of the power-shift
                              // auxiliary function
};

/// Computes all entries of CriticalExponents for valid params.
CriticalExponents exponents(const ProblemParams& params);

/// (N+2)/(N-2), infinite for N ≤ 2. Valid for any N ≥ 1, beyond the
/// dimensions the solver handles.
RationalOrInf sobolev_exponent(int dim);

/// N(N+2)/(N-1)^2, infinite for N = 1. Valid for any N ≥ 1.
RationalOrInf bidaut_veron_exponent(int dim);

/// The coefficient threshold above as a standalone evaluation (N, p only).
double coeff_threshold(int dim, const Rational& p);

/// The auxiliary-function exponent 1 + N/(3(q-1)).
double aux_exponent(int dim, const Rational& q);

/// Scaling-family coefficient: u_λ(x,t) = λ^{-1} u(λ^{(1-p)/2} x, λ^{1-p} t)
/// solves the equation with gradient coefficient λ^{((p+1)q-2p)/2} M.
/// Returns that power of λ.
double scaling_coefficient_factor(const ProblemParams& params, double lambda);

}  // namespace gradheat
