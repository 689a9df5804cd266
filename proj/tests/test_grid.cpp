#include <cmath>
#include <set>

#include "doctest.h"
#include "gradheat/fdm.hpp"
#include "gradheat/grid.hpp"

using namespace gradheat;

TEST_CASE("interval grid has symmetric nodes and a two-point rim") {
  const auto grid = Grid::make_interval(0.0, 2.0, 0.25);
  CHECK(grid->dim() == 1);
  CHECK(grid->node_count() == 17);  // offsets -8..8
  int rim = 0;
  double min_x = 1e9, max_x = -1e9;
  for (int id = 0; id < grid->node_count(); ++id) {
    if (grid->kind(id) == NodeKind::Rim) ++rim;
    min_x = std::min(min_x, grid->coord(id)[0]);
    max_x = std::max(max_x, grid->coord(id)[0]);
  }
  CHECK(rim == 2);
  CHECK(grid->interior_count() == 15);
  CHECK(min_x == doctest::Approx(-2.0));
  CHECK(max_x == doctest::Approx(2.0));
}

TEST_CASE("spacing must resolve the radius") {
  CHECK_THROWS_AS(Grid::make_interval(0.0, 1.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make_disc({0.0, 0.0}, 1.0, 0.26),
                  std::invalid_argument);
  CHECK_NOTHROW(Grid::make_interval(0.0, 1.0, 0.24));
}

TEST_CASE("disc grid masks the lattice to the ball") {
  const double R = 1.0;
  const double h = 0.125;
  const auto grid = Grid::make_disc({0.5, -0.5}, R, h);
  CHECK(grid->dim() == 2);
  for (int id = 0; id < grid->node_count(); ++id) {
    const auto c = grid->coord(id);
    const double dist = std::hypot(c[0] - 0.5, c[1] + 0.5);
    CHECK(dist <= R + 1e-9);
    // Interior nodes have all four neighbors in the set.
    if (grid->kind(id) == NodeKind::Interior) {
      for (int d = 0; d < 4; ++d) CHECK(grid->neighbor(id, d) >= 0);
    } else {
      bool missing = false;
      for (int d = 0; d < 4; ++d) missing |= grid->neighbor(id, d) < 0;
      CHECK(missing);
    }
  }
  // Area sanity: node count ~ pi R^2 / h^2 within 10%.
  const double expected = std::acos(-1.0) * R * R / (h * h);
  CHECK(std::abs(grid->node_count() - expected) < 0.1 * expected);
}

TEST_CASE("neighbor lookup is involutive and lattice-consistent") {
  const auto grid = Grid::make_disc({0.0, 0.0}, 1.0, 0.2);
  for (int id = 0; id < grid->node_count(); ++id) {
    const auto latt = grid->lattice_index(id);
    CHECK(grid->id_at(latt[0], latt[1]) == id);
    const int right = grid->neighbor(id, 1);
    if (right >= 0) {
      CHECK(grid->neighbor(right, 0) == id);
      CHECK(grid->coord(right)[0] ==
            doctest::Approx(grid->coord(id)[0] + 0.2));
    }
  }
}

TEST_CASE("interior margin counts lattice rings inside the node set") {
  const auto grid = Grid::make_interval(0.0, 1.0, 0.125);  // offsets -8..8
  const int center = grid->id_at(0, 0);
  CHECK(grid->has_interior_margin(center, 8));
  CHECK_FALSE(grid->has_interior_margin(center, 9));
  const int next = grid->id_at(6, 0);
  CHECK(grid->has_interior_margin(next, 2));
  CHECK_FALSE(grid->has_interior_margin(next, 3));
}

TEST_CASE("nodes_within returns exactly the inner ball") {
  const auto grid = Grid::make_interval(0.0, 2.0, 0.25);
  const auto ids = grid->nodes_within(1.0);
  std::set<int> got(ids.begin(), ids.end());
  for (int id = 0; id < grid->node_count(); ++id) {
    const bool inside =
        std::abs(grid->coord(id)[0]) <= 1.0 + 1e-9;
    CHECK(got.count(id) == (inside ? 1u : 0u));
  }
}

TEST_CASE("field construction samples the function at the nodes") {
  const auto grid = Grid::make_interval(0.0, 1.0, 0.125);
  const Field f = make_field(grid, [](double x, double) { return 3.0 * x; },
                             0.25);
  CHECK(f.time == 0.25);
  CHECK(f.sup_norm() == doctest::Approx(3.0));
  CHECK(f.min_value() == doctest::Approx(-3.0));
  const Field z = zero_field(grid);
  CHECK(z.sup_norm() == 0.0);
}

TEST_CASE("finite differences are exact on the polynomials they resolve") {
  const auto grid = Grid::make_disc({0.0, 0.0}, 1.0, 0.1);
  // u = 2x^2 - xy + 3y^2 + x - 4: quadratic, so second-order stencils are
  // exact up to rounding.
  const Field u = make_field(grid, [](double x, double y) {
    return 2.0 * x * x - x * y + 3.0 * y * y + x - 4.0;
  });
  const auto g = gradient(u);
  const auto lap = laplacian(u);
  const auto hess = hessian(u);
  for (int id = 0; id < grid->node_count(); ++id) {
    const auto c = grid->coord(id);
    if (g.valid[id]) {
      CHECK(g.gx[id] == doctest::Approx(4.0 * c[0] - c[1] + 1.0).epsilon(1e-10));
      CHECK(g.gy[id] == doctest::Approx(-c[0] + 6.0 * c[1]).epsilon(1e-10));
    }
    if (lap.valid[id]) {
      CHECK(lap.values[id] == doctest::Approx(10.0).epsilon(1e-9));
    }
    if (hess.valid[id]) {
      CHECK(hess.xx[id] == doctest::Approx(4.0).epsilon(1e-9));
      CHECK(hess.xy[id] == doctest::Approx(-1.0).epsilon(1e-9));
      CHECK(hess.yy[id] == doctest::Approx(6.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("gradient converges at second order on a smooth 1D field") {
  double errs[2];
  double hs[2] = {0.02, 0.01};
  for (int pass = 0; pass < 2; ++pass) {
    const auto grid = Grid::make_interval(0.0, 1.0, hs[pass]);
    const Field u = make_field(
        grid, [](double x, double) { return std::sin(3.0 * x); });
    const auto g = gradient(u);
    double worst = 0.0;
    for (int id = 0; id < grid->node_count(); ++id) {
      if (!g.valid[id]) continue;
      const double exact = 3.0 * std::cos(3.0 * grid->coord(id)[0]);
      worst = std::max(worst, std::abs(g.gx[id] - exact));
    }
    errs[pass] = worst;
  }
  const double slope = std::log2(errs[0] / errs[1]);
  CHECK(slope > 1.7);
  CHECK(slope < 2.3);
}

TEST_CASE("time derivative uses the non-uniform central formula") {
  const auto grid = Grid::make_interval(0.0, 1.0, 0.2);
  // u(t) = t^2 at a single node; non-uniform central differences are exact
  // for quadratics in t.
  std::vector<Field> snaps;
  for (double t : {0.0, 0.1, 0.3, 0.6}) {
    Field f = zero_field(grid, t);
    for (auto& v : f.values) v = t * t;
    snaps.push_back(f);
  }
  const auto mid = time_derivative(snaps, 2);  // t = 0.3, uneven neighbors
  CHECK(mid.second_order);
  CHECK(mid.field.values[0] == doctest::Approx(0.6).epsilon(1e-12));
  const auto tail = time_derivative(snaps, 3);  // one-sided
  CHECK_FALSE(tail.second_order);
  CHECK(tail.field.values[0] == doctest::Approx(0.9).epsilon(0.34));
}
