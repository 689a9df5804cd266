#include "gradheat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gradheat {

namespace {
constexpr double kMaskTol = 1e-9;
}

std::shared_ptr<const Grid> Grid::make_interval(double center, double radius,
                                                double spacing) {
  auto g = std::shared_ptr<Grid>(new Grid());
  g->build(1, {center, 0.0}, radius, spacing);
  return g;
}

std::shared_ptr<const Grid> Grid::make_disc(std::array<double, 2> center,
                                            double radius, double spacing) {
  auto g = std::shared_ptr<Grid>(new Grid());
  g->build(2, center, radius, spacing);
  return g;
}

void Grid::build(int dim, std::array<double, 2> center, double radius,
                 double spacing) {
  if (!(radius > 0.0) || !(spacing > 0.0)) {
    throw std::invalid_argument("grid needs positive radius and spacing");
  }
  if (!(spacing < radius / 4.0)) {
    throw std::invalid_argument(
        "grid spacing must satisfy h < R/4 (resolve the ball)");
  }
  dim_ = dim;
  center_ = center;
  radius_ = radius;
  h_ = spacing;
  half_ = static_cast<int>(std::floor(radius / spacing + kMaskTol));

  const int side = 2 * half_ + 1;
  const int jspan = (dim == 2) ? side : 1;
  id_map_.assign(static_cast<std::size_t>(side) * jspan, -1);

  const double r2max = radius * radius * (1.0 + kMaskTol);
  auto dense = [&](int i, int j) {
    return static_cast<std::size_t>(i + half_) +
           static_cast<std::size_t>(side) * static_cast<std::size_t>(
                                                 dim_ == 2 ? (j + half_) : 0);
  };

  for (int j = (dim == 2 ? -half_ : 0); j <= (dim == 2 ? half_ : 0); ++j) {
    for (int i = -half_; i <= half_; ++i) {
      const double x = i * h_;
      const double y = (dim == 2) ? j * h_ : 0.0;
      if (x * x + y * y > r2max) continue;
      id_map_[dense(i, j)] = static_cast<std::int32_t>(coords_.size());
      coords_.push_back({center[0] + x, center[1] + y});
      lattice_.push_back({i, j});
    }
  }

  const int n = node_count();
  nbrs_.resize(n);
  kinds_.resize(n);
  for (int id = 0; id < n; ++id) {
    const auto [i, j] = lattice_[id];
    auto at = [&](int ii, int jj) -> int {
      if (ii < -half_ || ii > half_) return -1;
      if (dim_ == 2 && (jj < -half_ || jj > half_)) return -1;
      return id_map_[dense(ii, jj)];
    };
    nbrs_[id] = {at(i - 1, j), at(i + 1, j),
                 dim_ == 2 ? at(i, j - 1) : -1,
                 dim_ == 2 ? at(i, j + 1) : -1};
    bool full = nbrs_[id][0] >= 0 && nbrs_[id][1] >= 0;
    if (dim_ == 2) full = full && nbrs_[id][2] >= 0 && nbrs_[id][3] >= 0;
    kinds_[id] = full ? NodeKind::Interior : NodeKind::Rim;
    if (full) ++interior_count_;
  }
  if (interior_count_ == 0) {
    throw std::invalid_argument("grid has no interior nodes");
  }
}

bool Grid::has_interior_margin(int id, int margin) const {
  const auto [i, j] = lattice_[id];
  for (int off = 1; off <= margin; ++off) {
    if (id_at(i - off, j) < 0 || id_at(i + off, j) < 0) return false;
    if (dim_ == 2 &&
        (id_at(i, j - off) < 0 || id_at(i, j + off) < 0)) {
      return false;
    }
    if (dim_ == 2 &&
        (id_at(i - off, j - off) < 0 || id_at(i + off, j - off) < 0 ||
         id_at(i - off, j + off) < 0 || id_at(i + off, j + off) < 0)) {
      return false;
    }
  }
  return true;
}

std::vector<int> Grid::nodes_within(double r) const {
  std::vector<int> out;
  const double r2 = r * r * (1.0 + kMaskTol);
  for (int id = 0; id < node_count(); ++id) {
    if (dist2_from_center(id) <= r2) out.push_back(id);
  }
  return out;
}

int Grid::id_at(int i, int j) const {
  if (i < -half_ || i > half_) return -1;
  if (dim_ == 2) {
    if (j < -half_ || j > half_) return -1;
  } else if (j != 0) {
    return -1;
  }
  const int side = 2 * half_ + 1;
  const std::size_t idx =
      static_cast<std::size_t>(i + half_) +
      static_cast<std::size_t>(side) *
          static_cast<std::size_t>(dim_ == 2 ? (j + half_) : 0);
  return id_map_[idx];
}

double Field::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double Field::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values) m = std::min(m, v);
  return m;
}

Field make_field(std::shared_ptr<const Grid> grid,
                 const std::function<double(double, double)>& fn,
                 double time) {
  Field f;
  f.grid = grid;
  f.time = time;
  f.values.resize(grid->node_count());
  for (int id = 0; id < grid->node_count(); ++id) {
    const auto c = grid->coord(id);
    f.values[id] = fn(c[0], c[1]);
  }
  return f;
}

Field zero_field(std::shared_ptr<const Grid> grid, double time) {
  Field f;
  f.grid = grid;
  f.time = time;
  f.values.assign(grid->node_count(), 0.0);
  return f;
}

}  // namespace gradheat
