#include "gradheat/rescale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gradheat/errors.hpp"

namespace gradheat {

namespace {

// Spatial interpolation of one snapshot at physical point (x, y).
// Snaps to the lattice when within rounding error so that lambda = 1
// reproduces node values exactly.
double interp_space(const Field& f, double x, double y) {
  const Grid& g = *f.grid;
  const double h = g.spacing();
  const auto c = g.center();
  const double fi = (x - c[0]) / h;
  const double fj = (g.dim() == 2) ? (y - c[1]) / h : 0.0;

  auto split = [](double v, int* lo, double* w) {
    double fl = std::floor(v);
    double frac = v - fl;
    if (frac < 1e-9) {
      frac = 0.0;
    } else if (frac > 1.0 - 1e-9) {
      fl += 1.0;
      frac = 0.0;
    }
    *lo = static_cast<int>(fl);
    *w = frac;
  };

  int i0, j0 = 0;
  double wx, wy = 0.0;
  split(fi, &i0, &wx);
  if (g.dim() == 2) split(fj, &j0, &wy);

  auto value_at = [&](int i, int j) {
    const int id = g.id_at(i, j);
    if (id < 0) {
      throw OutOfWindowError("interpolation point outside the node set");
    }
    return f.values[id];
  };

  if (g.dim() == 1) {
    if (wx == 0.0) return value_at(i0, 0);
    return (1.0 - wx) * value_at(i0, 0) + wx * value_at(i0 + 1, 0);
  }
  const double v00 = value_at(i0, j0);
  const double v10 = (wx == 0.0) ? v00 : value_at(i0 + 1, j0);
  const double v01 = (wy == 0.0) ? v00 : value_at(i0, j0 + 1);
  const double v11 =
      (wx == 0.0) ? v01 : ((wy == 0.0) ? v10 : value_at(i0 + 1, j0 + 1));
  return (1.0 - wx) * (1.0 - wy) * v00 + wx * (1.0 - wy) * v10 +
         (1.0 - wx) * wy * v01 + wx * wy * v11;
}

}  // namespace

double interpolate(const Trajectory& traj, double x, double y, double t) {
  const auto& snaps = traj.snapshots;
  if (snaps.empty()) throw OutOfWindowError("empty trajectory");
  const double t0 = snaps.front().time;
  const double t1 = snaps.back().time;
  const double tol = 1e-12 * std::max(1.0, std::abs(t1));
  if (t < t0 - tol || t > t1 + tol) {
    throw OutOfWindowError("time outside the computed trajectory");
  }
  // Bracketing snapshots by binary search over times.
  int lo = 0, hi = static_cast<int>(snaps.size()) - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (snaps[mid].time <= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double ta = snaps[lo].time, tb = snaps[hi].time;
  if (std::abs(t - ta) <= tol) return interp_space(snaps[lo], x, y);
  if (std::abs(t - tb) <= tol) return interp_space(snaps[hi], x, y);
  const double w = (t - ta) / (tb - ta);
  return (1.0 - w) * interp_space(snaps[lo], x, y) +
         w * interp_space(snaps[hi], x, y);
}

double rescaling_residual(const Trajectory& traj, double lambda,
                          const RescaleWindow& window,
                          bool modified_coefficient) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("rescaling requires lambda > 0");
  }
  const Grid& g = *traj.grid;
  const double h = g.spacing();
  const double p = traj.params.p_value();
  const double q = traj.params.q_value();
  const double m = traj.params.gradient_coeff;
  const double space_scale = std::pow(lambda, 0.5 * (1.0 - p));
  const double time_scale = std::pow(lambda, 1.0 - p);
  const double coeff =
      modified_coefficient
          ? scaling_coefficient_factor(traj.params, lambda) * m
          : m;

  // Evaluation times: snapshots within [t_lo, t_hi], strided.
  std::vector<double> times;
  for (int k = 0; k < traj.snapshot_count(); k += window.time_stride) {
    const double t = traj.snapshots[k].time;
    if (t >= window.t_lo - 1e-15 && t <= window.t_hi + 1e-15) {
      times.push_back(t);
    }
  }
  if (times.size() < 3) {
    throw OutOfWindowError(
        "rescaling window must contain at least three snapshot times");
  }

  // Evaluation lattice in rescaled coordinates with spacing h/space_scale:
  // every sample then lands exactly on a source node (space_scale·iH = i·h),
  // so the stencil sees node values, not interpolation kinks.  At λ = 1 the
  // lattice coincides with the grid itself.
  const double H = h / space_scale;
  const int span =
      static_cast<int>(std::floor(window.eval_radius / H + 1e-9)) + 1;
  const int width = 2 * span + 1;
  const auto c = g.center();
  const int rows = (g.dim() == 2) ? width : 1;

  auto cell = [&](int i, int j) { return (j + (rows / 2)) * width + i + span; };

  // u_lambda values on the lattice at every evaluation time.  Lattice points
  // whose source image leaves the node set are marked unusable rather than
  // failing outright; the residual loop skips stencils touching them.
  std::vector<std::vector<double>> ul(
      times.size(),
      std::vector<double>(static_cast<std::size_t>(width) * rows,
                          std::numeric_limits<double>::quiet_NaN()));
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double ts = time_scale * times[ti];
    for (int j = -(rows / 2); j <= rows / 2; ++j) {
      for (int i = -span; i <= span; ++i) {
        const double sx = c[0] + space_scale * (i * H);
        const double sy =
            (g.dim() == 2) ? c[1] + space_scale * (j * H) : c[1];
        try {
          ul[ti][cell(i, j)] = interpolate(traj, sx, sy, ts) / lambda;
        } catch (const OutOfWindowError&) {
          // leave NaN
        }
      }
    }
  }

  const double r2 = window.eval_radius * window.eval_radius * (1.0 + 1e-9);
  double worst = 0.0;
  long stencils = 0;
  for (std::size_t ti = 1; ti + 1 < times.size(); ++ti) {
    const double ha = times[ti] - times[ti - 1];
    const double hb = times[ti + 1] - times[ti];
    for (int j = -(rows / 2); j <= rows / 2; ++j) {
      for (int i = -span + 1; i <= span - 1; ++i) {
        if (H * H * (i * i + j * j) > r2) continue;
        if (g.dim() == 2 && std::abs(j) == rows / 2) continue;
        const double u0 = ul[ti][cell(i, j)];
        const double uxm = ul[ti][cell(i - 1, j)];
        const double uxp = ul[ti][cell(i + 1, j)];
        const double um = ul[ti - 1][cell(i, j)];
        const double up = ul[ti + 1][cell(i, j)];
        double lap = (uxp - 2.0 * u0 + uxm) / (H * H);
        double g2 = (uxp - uxm) / (2.0 * H);
        g2 *= g2;
        if (g.dim() == 2) {
          const double uym = ul[ti][cell(i, j - 1)];
          const double uyp = ul[ti][cell(i, j + 1)];
          lap += (uyp - 2.0 * u0 + uym) / (H * H);
          const double gy = (uyp - uym) / (2.0 * H);
          g2 += gy * gy;
        }
        if (!std::isfinite(u0 + uxm + uxp + um + up + lap)) continue;
        const double ut =
            (hb * hb * (u0 - um) + ha * ha * (up - u0)) /
            (ha * hb * (ha + hb));
        const double resid = ut - lap - std::pow(std::max(u0, 0.0), p) -
                             coeff * std::pow(g2, 0.5 * q);
        worst = std::max(worst, std::abs(resid));
        ++stencils;
      }
    }
  }
  if (stencils == 0) {
    throw OutOfWindowError(
        "no complete stencil fits the rescaling window");
  }
  return worst;
}

}  // namespace gradheat
