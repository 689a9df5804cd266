#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace gradheat {

/// How a node sits in the discretized ball.
enum class NodeKind : std::uint8_t {
  Interior,  // full central stencil available inside the node set
  Rim,       // inside the ball but missing at least one stencil neighbor;
             // carries the Dirichlet value during time stepping
};

/// Uniform lattice restricted to a ball B(center, R), in dimension 1 or 2.
///
/// 1D: nodes at center + i h for |i h| ≤ R (the endpoints form the rim).
/// 2D: all lattice points of a square grid with |x - center| ≤ R (a disc
/// mask); nodes whose 4-point stencil leaves the mask form the rim ring.
///
/// Nodes are stored compactly; `neighbor(id, d)` resolves the four axis
/// neighbors (-1 when the neighbor is outside the mask).
class Grid {
 public:
  static std::shared_ptr<const Grid> make_interval(double center, double radius,
                                                   double spacing);
  static std::shared_ptr<const Grid> make_disc(std::array<double, 2> center,
                                               double radius, double spacing);

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  double spacing() const { return h_; }
  std::array<double, 2> center() const { return center_; }

  int node_count() const { return static_cast<int>(coords_.size()); }
  std::array<double, 2> coord(int id) const { return coords_[id]; }
  NodeKind kind(int id) const { return kinds_[id]; }
  int interior_count() const { return interior_count_; }

  /// Squared distance of a node from the grid center.
  double dist2_from_center(int id) const {
    const auto c = coords_[id];
    const double dx = c[0] - center_[0];
    const double dy = c[1] - center_[1];
    return dx * dx + dy * dy;
  }

  /// Axis neighbors: 0 = -x, 1 = +x, 2 = -y, 3 = +y.  -1 if outside.
  int neighbor(int id, int direction) const { return nbrs_[id][direction]; }

  /// True when every node of the (2 dim + 1)-point stencil centered at `id`,
  /// expanded `margin` times, stays in the node set.
  bool has_interior_margin(int id, int margin) const;

  /// Ids of all nodes with |x - center| ≤ r.
  std::vector<int> nodes_within(double r) const;

  /// Lattice lookup: id at lattice offset (i, j) from the center node,
  /// or -1 when outside the mask.
  int id_at(int i, int j) const;
  std::array<int, 2> lattice_index(int id) const { return lattice_[id]; }

 private:
  Grid() = default;
  void build(int dim, std::array<double, 2> center, double radius,
             double spacing);

  int dim_ = 1;
  std::array<double, 2> center_{0.0, 0.0};
  double radius_ = 0.0;
  double h_ = 0.0;
  int half_ = 0;  // lattice extends over offsets in [-half_, half_]
  int interior_count_ = 0;
  std::vector<std::array<double, 2>> coords_;
  std::vector<std::array<int, 2>> lattice_;
  std::vector<NodeKind> kinds_;
  std::vector<std::array<int, 4>> nbrs_;
  std::vector<std::int32_t> id_map_;  // dense (2 half_+1)^dim lattice → id
};

/// Scalar values on every node of a grid, tagged with a simulation time.
struct Field {
  std::shared_ptr<const Grid> grid;
  double time = 0.0;
  std::vector<double> values;

  double sup_norm() const;
  double min_value() const;
};

/// Builds a field by sampling fn(x, y) at every node (time defaults to 0).
Field make_field(std::shared_ptr<const Grid> grid,
                 const std::function<double(double, double)>& fn,
                 double time = 0.0);

Field zero_field(std::shared_ptr<const Grid> grid, double time = 0.0);

}  // namespace gradheat
