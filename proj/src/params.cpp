#include "gradheat/params.hpp"

#include <cmath>
#include <stdexcept>

namespace gradheat {

void ProblemParams::validate() const {
  if (dim != 1 && dim != 2) {
    throw std::domain_error("spatial dimension must be 1 or 2");
  }
  if (!(p > Rational(1))) {
    throw std::domain_error("reaction exponent p must exceed 1");
  }
  if (!(q > Rational(1)) || !(q < Rational(2))) {
    throw std::domain_error("gradient exponent q must lie in (1, 2)");
  }
  if (!(gradient_coeff >= 0.0) || !std::isfinite(gradient_coeff)) {
    throw std::domain_error("gradient coefficient M must be finite and >= 0");
  }
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical:
      return "subcritical";
    case Regime::Critical:
      return "critical";
    case Regime::Supercritical:
      return "supercritical";
  }
  return "unknown";
}

Regime classify(const ProblemParams& params) {
  if (!(params.p > Rational(1))) {
    throw std::domain_error("classify: p must exceed 1");
  }
  if (!(params.q > Rational(1))) {
    throw std::domain_error("classify: q must exceed 1");
  }
  // Compare q with 2p/(p+1) through the cross product q(p+1) vs 2p.
  Rational lhs = params.q * (params.p + Rational(1));
  Rational rhs = Rational(2) * params.p;
  if (lhs < rhs) return Regime::Subcritical;
  if (rhs < lhs) return Regime::Supercritical;
  return Regime::Critical;
}

Rational critical_q(const Rational& p) {
  if (!(p > Rational(1))) {
    throw std::domain_error("critical_q: p must exceed 1");
  }
  return Rational(2) * p / (p + Rational(1));
}

double coeff_threshold(int dim, const Rational& p) {
  if (dim < 1) throw std::domain_error("coeff_threshold: dimension must be >= 1");
  if (!(p > Rational(1))) {
    throw std::domain_error("coeff_threshold: p must exceed 1");
  }
  const double pd = p.to_double();
  const double base = 6.0 * dim * (pd + 1.0);
  return std::pow(base, pd / (pd + 1.0)) * std::sqrt((pd + 1.0) / (pd - 1.0));
}

double aux_exponent(int dim, const Rational& q) {
  if (!(q > Rational(1))) {
    throw std::domain_error("aux_exponent: q must exceed 1");
  }
  return 1.0 + dim / (3.0 * (q.to_double() - 1.0));
}

RationalOrInf sobolev_exponent(int dim) {
  if (dim < 1) throw std::domain_error("dimension must be >= 1");
  if (dim <= 2) return RationalOrInf::infinity();
  return RationalOrInf(Rational(dim + 2, dim - 2));
}

RationalOrInf bidaut_veron_exponent(int dim) {
  if (dim < 1) throw std::domain_error("dimension must be >= 1");
  if (dim == 1) return RationalOrInf::infinity();
  return RationalOrInf(Rational(static_cast<std::int64_t>(dim) * (dim + 2),
                                static_cast<std::int64_t>(dim - 1) *
                                    (dim - 1)));
}

CriticalExponents exponents(const ProblemParams& params) {
  params.validate();
  CriticalExponents out;
  out.q_crit = critical_q(params.p);
  const int n = params.dim;
  out.p_sobolev = sobolev_exponent(n);
  out.p_bidaut_veron = bidaut_veron_exponent(n);
  out.coeff_threshold = coeff_threshold(n, params.p);
  out.aux_exponent = aux_exponent(n, params.q);
  return out;
}

double scaling_coefficient_factor(const ProblemParams& params, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::domain_error("scaling factor requires lambda > 0");
  }
  const Rational expo =
      ((params.p + Rational(1)) * params.q - Rational(2) * params.p) /
      Rational(2);
  return std::pow(lambda, expo.to_double());
}

}  // namespace gradheat
