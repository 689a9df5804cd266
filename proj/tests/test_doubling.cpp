#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gradheat/doubling.hpp"
#include "gradheat/errors.hpp"
#include "gradheat/rescale.hpp"
#include "gradheat/solver.hpp"

using namespace gradheat;
using namespace gradheat::doubling;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ParabolicPoint pnt(double x, double y, double t) {
  ParabolicPoint p;
  p.x = {x, y};
  p.t = t;
  return p;
}

// Distance recomputed off the library path, for the brute-force oracle.
double raw_dist(const DoublingInstance& inst, int i, int j) {
  const auto& a = inst.points[i];
  const auto& b = inst.points[j];
  const double dx = a.x[0] - b.x[0];
  const double dy = a.x[1] - b.x[1];
  if (inst.metric == Metric::Euclidean) {
    const double dt = a.t - b.t;
    return std::sqrt(dx * dx + dy * dy + dt * dt);
  }
  return std::sqrt(dx * dx + dy * dy) + std::sqrt(std::abs(a.t - b.t));
}

double raw_dist_to_gamma(const DoublingInstance& inst, int i) {
  double best = kInf;
  for (std::size_t j = 0; j < inst.points.size(); ++j) {
    if (!inst.in_domain[j]) {
      best = std::min(best, raw_dist(inst, i, static_cast<int>(j)));
    }
  }
  return best;
}

Trajectory bump_run(double radius, double h, double t_end, int stride) {
  ProblemParams params;
  params.dim = 1;
  params.p = Rational(2);
  params.q = Rational(4, 3);
  params.gradient_coeff = 0.01;
  const auto grid = Grid::make_interval(0.0, radius, h);
  SolverConfig cfg;
  cfg.dt = stable_dt(*grid);
  cfg.t_end = t_end;
  cfg.snapshot_stride = stride;
  Field u0 = make_field(grid, [&](double x, double) {
    const double s = x * x / (radius * radius);
    return (s < 1.0 - 1e-12) ? 0.5 * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
  });
  return solve(u0, params, cfg);
}

}  // namespace

TEST_CASE("parabolic distance: examples and the triangle inequality") {
  CHECK(parabolic_distance(pnt(0, 0, 0), pnt(0, 0, 0)) == 0.0);
  CHECK(parabolic_distance(pnt(1, 2, 4), pnt(1, 2, 0)) == doctest::Approx(2.0));
  CHECK(parabolic_distance(pnt(3, 0, 9), pnt(0, 4, 0)) == doctest::Approx(8.0));
  CHECK(parabolic_distance(pnt(0, 0, 1), pnt(0, 0, 0)) == doctest::Approx(1.0));
  CHECK(euclidean_distance(pnt(1, 2, 2), pnt(3, 4, 1)) ==
        doctest::Approx(3.0));

  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> box(-5.0, 5.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto a = pnt(box(rng), box(rng), box(rng));
    const auto b = pnt(box(rng), box(rng), box(rng));
    const auto c = pnt(box(rng), box(rng), box(rng));
    CHECK(parabolic_distance(a, c) <=
          parabolic_distance(a, b) + parabolic_distance(b, c) + 1e-12);
  }
}

TEST_CASE("instance validation rejects structural defects") {
  DoublingInstance inst;
  inst.k = 1.0;
  inst.points = {pnt(0, 0, 0), pnt(1, 0, 0)};
  inst.in_domain = {1, 0};
  inst.m_values = {2.0, 0.0};
  CHECK_NOTHROW(inst.validate());
  CHECK(inst.domain_size() == 1);
  CHECK(inst.dist_to_complement(0) == doctest::Approx(1.0));

  DoublingInstance bad = inst;
  bad.k = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = inst;
  bad.m_values = {0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = inst;
  bad.in_domain = {0, 0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = inst;
  bad.m_values.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // Gamma-free instances have an infinite complement distance.
  DoublingInstance open = inst;
  open.in_domain = {1, 1};
  open.m_values = {2.0, 2.0};
  CHECK(std::isinf(open.dist_to_complement(0)));
}

TEST_CASE("text form round-trips instances exactly") {
  DoublingInstance inst;
  inst.metric = Metric::Euclidean;
  inst.k = 0.1 + 0.2;  // deliberately non-representable sum
  inst.points = {pnt(std::sqrt(2.0), -1.0 / 3.0, 0.7), pnt(0, 0, 0),
                 pnt(1e-17, 2e300, -4.5)};
  inst.in_domain = {1, 0, 1};
  inst.m_values = {1.0 / 7.0, 0.0, 9.25};

  const DoublingInstance back = parse_instance(to_text(inst));
  CHECK(back.metric == inst.metric);
  CHECK(back.k == inst.k);
  REQUIRE(back.points.size() == inst.points.size());
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    CHECK(back.points[i].x[0] == inst.points[i].x[0]);
    CHECK(back.points[i].x[1] == inst.points[i].x[1]);
    CHECK(back.points[i].t == inst.points[i].t);
    CHECK(back.in_domain[i] == inst.in_domain[i]);
    CHECK(back.m_values[i] == inst.m_values[i]);
  }

  CHECK_THROWS_AS(parse_instance("metric banana\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_instance("pt 0 0 0 X\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_instance("points 3\npt 0 0 0 D 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_instance("pt 0 0 0 D 1\npt 1 0 0 D\n"),
                  std::invalid_argument);
}

TEST_CASE("flat weights yield the start itself with no hops") {
  DoublingInstance inst;
  inst.k = 0.5;
  for (int i = 0; i < 6; ++i) {
    inst.points.push_back(pnt(0.3 * i, 0, 0.1 * i));
    inst.in_domain.push_back(1);
    inst.m_values.push_back(1.0);
  }
  const auto result = find_doubling_point(inst, 2);
  CHECK(result.index == 2);
  CHECK(result.hops == 0);
  CHECK(result.path == std::vector<int>{2});
  CHECK(std::isinf(result.m_times_dist));
  CHECK(result.dominates_start);
  CHECK(result.ball_violations == 0);
  CHECK(result.hop_bound == 1);
}

TEST_CASE("one-hop instance and candidate tie-breaking") {
  DoublingInstance inst;
  inst.k = 1.0;
  inst.points = {pnt(0, 0, 0), pnt(0.1, 0, 0), pnt(10, 0, 0)};
  inst.in_domain = {1, 1, 0};
  inst.m_values = {1.0, 3.0, 0.0};

  const auto result = find_doubling_point(inst, 0);
  CHECK(result.index == 1);
  CHECK(result.hops == 1);
  CHECK(result.path == std::vector<int>{0, 1});
  CHECK(result.m_value == 3.0);
  CHECK(result.m_times_dist == doctest::Approx(3.0 * 9.9));
  CHECK(result.dominates_start);
  CHECK(result.hops <= result.hop_bound);

  // The best start maximizes Mfun·dist over the qualifying points.
  CHECK(best_start(inst) == 1);

  // Equal-weight candidates resolve by coordinate order: the x = -0.1
  // point wins over x = +0.1.
  DoublingInstance tie = inst;
  tie.points.insert(tie.points.begin() + 2, pnt(-0.1, 0, 0));
  tie.in_domain.insert(tie.in_domain.begin() + 2, 1);
  tie.m_values.insert(tie.m_values.begin() + 2, 3.0);
  const auto tied = find_doubling_point(tie, 0);
  CHECK(tied.index == 2);
  CHECK(tied.path == std::vector<int>{0, 2});
}

TEST_CASE("hypothesis and argument validation in the search") {
  DoublingInstance inst;
  inst.k = 1.0;
  inst.points = {pnt(0, 0, 0), pnt(1, 0, 0)};
  inst.in_domain = {1, 0};
  inst.m_values = {1.0, 0.0};
  // Mfun·dist = 1·1 = 1 ≤ 2k = 2: the search hypothesis fails here.
  CHECK_THROWS_AS(find_doubling_point(inst, 0), HypothesisError);
  CHECK(best_start(inst) == -1);
  CHECK_THROWS_AS(find_doubling_point(inst, 1), std::invalid_argument);
  CHECK_THROWS_AS(find_doubling_point(inst, -1), std::invalid_argument);
  CHECK_THROWS_AS(find_doubling_point(inst, 7), std::invalid_argument);
}

TEST_CASE("seeded random instances pass an independent certification") {
  std::mt19937_64 rng(20240819);
  std::uniform_real_distribution<double> box(-2.0, 2.0), tbox(0.0, 4.0),
      mlog(std::log(0.5), std::log(30.0)), kdist(0.05, 0.3), unit(0.0, 1.0);
  int executed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    DoublingInstance inst;
    inst.metric = (trial % 4 == 3) ? Metric::Euclidean : Metric::Parabolic;
    inst.k = kdist(rng);
    const int n = 5 + static_cast<int>(rng() % 56);
    for (int i = 0; i < n; ++i) {
      inst.points.push_back(pnt(box(rng), box(rng), tbox(rng)));
      const bool domain = (i == 0) || unit(rng) < 0.8;
      inst.in_domain.push_back(domain ? 1 : 0);
      inst.m_values.push_back(domain ? std::exp(mlog(rng)) : 0.0);
    }

    const int start = best_start(inst);
    if (start < 0) continue;
    ++executed;
    const auto result = find_doubling_point(inst, start);
    CAPTURE(trial);

    // First conclusion: the located point keeps Mfun·dist(·,Γ) > 2k.
    const double dist_gamma = raw_dist_to_gamma(inst, result.index);
    if (std::isinf(dist_gamma)) {
      CHECK(std::isinf(result.m_times_dist));
    } else {
      CHECK(result.m_times_dist ==
            doctest::Approx(inst.m_values[result.index] * dist_gamma)
                .epsilon(1e-12));
    }
    CHECK(result.m_times_dist > 2.0 * inst.k);

    // Second: it dominates the start.
    CHECK(result.m_value >= inst.m_values[start]);

    // Third: no doubling inside the ball of radius k/Mfun(x).
    const double ball = inst.k / result.m_value;
    for (int z = 0; z < n; ++z) {
      if (!inst.in_domain[z]) continue;
      if (raw_dist(inst, result.index, z) > ball) continue;
      CHECK(inst.m_values[z] <= 2.0 * result.m_value * (1.0 + 1e-12));
    }

    // The hop count obeys the doubling bound, recomputed here.
    double max_m = 0.0;
    for (int z = 0; z < n; ++z) {
      if (inst.in_domain[z]) max_m = std::max(max_m, inst.m_values[z]);
    }
    const long bound = static_cast<long>(std::ceil(std::max(
                           0.0, std::log2(max_m / inst.m_values[start])))) +
                       1;
    CHECK(result.hop_bound == bound);
    CHECK(result.hops <= result.hop_bound);

    // Path structure: starts at start, ends at the located point, and each
    // hop at least doubles Mfun within the current ball.
    REQUIRE(result.path.size() == static_cast<std::size_t>(result.hops) + 1);
    CHECK(result.path.front() == start);
    CHECK(result.path.back() == result.index);
    for (std::size_t i = 0; i + 1 < result.path.size(); ++i) {
      const int a = result.path[i];
      const int b = result.path[i + 1];
      CHECK(inst.m_values[b] > 2.0 * inst.m_values[a]);
      CHECK(raw_dist(inst, a, b) <=
            inst.k / inst.m_values[a] * (1.0 + 1e-12));
    }
  }
  // The generator must actually exercise the search.
  CHECK(executed >= 100);
}

TEST_CASE("trajectory sampling splits boundary and interior correctly") {
  const Trajectory traj = bump_run(2.0, 0.1, 0.2, 10);
  const double horizon = traj.final_time;
  const auto inst = from_trajectory(traj, 0.5, 2, 2);
  CHECK_NOTHROW(inst.validate());
  CHECK(inst.domain_size() >= 10);
  CHECK(inst.points.size() > static_cast<std::size_t>(inst.domain_size()));

  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    const auto& pt = inst.points[i];
    if (inst.in_domain[i]) {
      CHECK(pt.t > 0.0);
      CHECK(pt.t < horizon);
      CHECK(std::abs(pt.x[0]) < 2.0);
      CHECK(inst.m_values[i] > 1e-14);
    } else {
      const bool time_boundary = pt.t == 0.0 || pt.t == horizon;
      const bool space_boundary = std::abs(std::abs(pt.x[0]) - 2.0) < 1e-12;
      CHECK((time_boundary || space_boundary));
    }
  }

  // Spot-check the weight at one interior sample against the definition
  // Mfun = u^{(p-1)/2} + |∇u|^{(p-1)/(p+1)} with p = 2.
  int pick = -1;
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    if (inst.in_domain[i] && std::abs(inst.points[i].x[0]) < 0.05) {
      pick = static_cast<int>(i);
      break;
    }
  }
  REQUIRE(pick >= 0);
  const auto& at = inst.points[pick];
  const int snap_idx = traj.snapshot_index_near(at.t);
  const Field& snap = traj.snapshot(snap_idx);
  REQUIRE(snap.time == doctest::Approx(at.t).epsilon(1e-12));
  const double h = traj.grid->spacing();
  const double u = interpolate(traj, at.x[0], 0.0, at.t);
  const double grad = (interpolate(traj, at.x[0] + h, 0.0, at.t) -
                       interpolate(traj, at.x[0] - h, 0.0, at.t)) /
                      (2.0 * h);
  const double want = std::sqrt(std::max(0.0, u)) +
                      std::pow(std::abs(grad), 1.0 / 3.0);
  CHECK(inst.m_values[pick] == doctest::Approx(want).epsilon(1e-12));

  CHECK_THROWS_AS(from_trajectory(traj, 0.5, 0, 1), std::invalid_argument);
}

TEST_CASE("rescaled frames normalize to one at the frame origin") {
  const Trajectory traj = bump_run(2.0, 0.05, 0.2, 5);
  ParabolicPoint at = pnt(0.0, 0.0, 0.1);
  const double m0 = sample_m(traj, at, traj.grid->spacing());
  REQUIRE(m0 > 0.0);
  const double lambda = 1.0 / m0;

  // Keep the frame inside the recorded cylinder: space margin ~2, time
  // margin 0.1 on both sides.
  const double frame_radius =
      0.9 * std::min(1.5 / lambda, std::sqrt(0.1) / lambda);
  const auto frame = rescaling_frame(traj, at, lambda, frame_radius, 6);
  CHECK(frame.normalization == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(frame.samples > 20);
  CHECK(frame.sup_m >= frame.normalization);
  CHECK(std::isfinite(frame.sup_m));

  // A frame reaching past the horizon must refuse.
  CHECK_THROWS_AS(
      rescaling_frame(traj, at, lambda, 10.0 / lambda, 4),
      OutOfWindowError);
  CHECK_THROWS_AS(rescaling_frame(traj, at, -1.0, 0.1, 4),
                  std::invalid_argument);
}

TEST_CASE("normalized nonlinearity converges to the pure power") {
  // f(s) = s^p + s: the rescaled form is v^p + λ²v, so the residual against
  // l = 1 equals λ²v exactly.
  const auto f = [](double s) { return std::pow(s, 3.0) + s; };
  CHECK(nonlinearity_limit_residual(f, 1.0, 3.0, 2.0, 0.1) ==
        doctest::Approx(0.01 * 2.0).epsilon(1e-10));
  CHECK(nonlinearity_limit_residual(f, 1.0, 3.0, 2.0, 0.01) ==
        doctest::Approx(1e-4 * 2.0).epsilon(1e-8));

  // A pure power has zero residual at any λ.
  const auto pure = [](double s) { return std::pow(s, 3.0); };
  CHECK(nonlinearity_limit_residual(pure, 1.0, 3.0, 1.7, 0.37) <= 1e-12);

  CHECK_THROWS_AS(nonlinearity_limit_residual(f, 1.0, 1.0, 2.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(nonlinearity_limit_residual(f, 1.0, 3.0, 2.0, 0.0),
                  std::invalid_argument);
}
