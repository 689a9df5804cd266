#pragma once

#include <stdexcept>
#include <string>

namespace gradheat {

/// A stepped solution exceeded the blow-up threshold.
struct BlowUpError : std::runtime_error {
  explicit BlowUpError(const std::string& what) : std::runtime_error(what) {}
};

/// A stepped solution produced NaN/Inf without crossing the threshold.
struct NonFiniteError : std::runtime_error {
  explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

/// A rescaled or framed evaluation window is not covered by computed data.
struct OutOfWindowError : std::runtime_error {
  explicit OutOfWindowError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A check was invoked on data violating the hypotheses it assumes.
struct HypothesisError : std::runtime_error {
  explicit HypothesisError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A space-time test function's support is not covered by the trajectory.
struct SupportError : std::runtime_error {
  explicit SupportError(const std::string& what) : std::runtime_error(what) {}
};

/// Coarse/fine quadrature disagreement beyond the resolvable limit.
struct QuadratureError : std::runtime_error {
  explicit QuadratureError(const std::string& what)
      : std::runtime_error(what) {}
};

/// An experiment configuration file is unreadable or malformed.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gradheat
