#pragma once

#include <cstdint>
#include <vector>

#include "gradheat/grid.hpp"

namespace gradheat {

/// Gradient samples with a validity mask.  Components use central
/// differences at interior nodes and one-sided second-order stencils at rim
/// nodes; nodes where neither stencil fits are marked invalid.
struct GradientField {
  std::shared_ptr<const Grid> grid;
  double time = 0.0;
  std::vector<double> gx, gy;       // gy all-zero in 1D
  std::vector<std::uint8_t> valid;  // per node

  double magnitude2(int id) const {
    return gx[id] * gx[id] + gy[id] * gy[id];
  }
};

/// Scalar derived field (e.g. a Laplacian) with a validity mask.
struct MaskedField {
  std::shared_ptr<const Grid> grid;
  double time = 0.0;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
};

/// Symmetric Hessian samples; `xy` is only populated in 2D and requires the
/// four diagonal neighbors (otherwise the node is invalid).
struct HessianField {
  std::shared_ptr<const Grid> grid;
  double time = 0.0;
  std::vector<double> xx, xy, yy;
  std::vector<std::uint8_t> valid;

  /// Squared Frobenius norm |D²u|² (counts the off-diagonal twice).
  double frobenius2(int id) const {
    return xx[id] * xx[id] + 2.0 * xy[id] * xy[id] + yy[id] * yy[id];
  }
};

GradientField gradient(const Field& u);
MaskedField laplacian(const Field& u);
HessianField hessian(const Field& u);

/// Discrete time derivative at snapshot `index` of a list of fields using the
/// non-uniform 3-point formula (central where both neighbors exist).
/// `second_order` reports whether the central stencil was available.
struct TimeDerivative {
  MaskedField field;
  bool second_order = false;
};
TimeDerivative time_derivative(const std::vector<Field>& snapshots, int index);

}  // namespace gradheat
