#include "gradheat/fdm.hpp"

#include <cmath>
#include <stdexcept>

namespace gradheat {

namespace {

// One axis of a second-derivative / first-derivative evaluation.
// Returns false when no second-order stencil fits at this node.
struct AxisDeriv {
  double first = 0.0;
  double second = 0.0;
  bool ok = false;
};

AxisDeriv axis_derivatives(const Grid& g, const std::vector<double>& v, int id,
                           int axis) {
  const double h = g.spacing();
  const auto [i, j] = g.lattice_index(id);
  auto at = [&](int off) {
    return axis == 0 ? g.id_at(i + off, j) : g.id_at(i, j + off);
  };
  AxisDeriv d;
  const int m1 = at(-1), p1 = at(+1);
  if (m1 >= 0 && p1 >= 0) {
    d.first = (v[p1] - v[m1]) / (2.0 * h);
    d.second = (v[p1] - 2.0 * v[id] + v[m1]) / (h * h);
    d.ok = true;
    return d;
  }
  // One-sided second-order stencils toward the available side.
  if (p1 >= 0) {
    const int p2 = at(+2), p3 = at(+3);
    if (p2 >= 0) {
      d.first = (-3.0 * v[id] + 4.0 * v[p1] - v[p2]) / (2.0 * h);
      if (p3 >= 0) {
        d.second =
            (2.0 * v[id] - 5.0 * v[p1] + 4.0 * v[p2] - v[p3]) / (h * h);
        d.ok = true;
      }
    }
    return d;
  }
  if (m1 >= 0) {
    const int m2 = at(-2), m3 = at(-3);
    if (m2 >= 0) {
      d.first = (3.0 * v[id] - 4.0 * v[m1] + v[m2]) / (2.0 * h);
      if (m3 >= 0) {
        d.second =
            (2.0 * v[id] - 5.0 * v[m1] + 4.0 * v[m2] - v[m3]) / (h * h);
        d.ok = true;
      }
    }
    return d;
  }
  return d;
}

// Gradient validity only needs the first-derivative stencil (3 points).
bool axis_first(const Grid& g, const std::vector<double>& v, int id, int axis,
                double* out) {
  const double h = g.spacing();
  const auto [i, j] = g.lattice_index(id);
  auto at = [&](int off) {
    return axis == 0 ? g.id_at(i + off, j) : g.id_at(i, j + off);
  };
  const int m1 = at(-1), p1 = at(+1);
  if (m1 >= 0 && p1 >= 0) {
    *out = (v[p1] - v[m1]) / (2.0 * h);
    return true;
  }
  if (p1 >= 0) {
    const int p2 = at(+2);
    if (p2 >= 0) {
      *out = (-3.0 * v[id] + 4.0 * v[p1] - v[p2]) / (2.0 * h);
      return true;
    }
  }
  if (m1 >= 0) {
    const int m2 = at(-2);
    if (m2 >= 0) {
      *out = (3.0 * v[id] - 4.0 * v[m1] + v[m2]) / (2.0 * h);
      return true;
    }
  }
  return false;
}

}  // namespace

GradientField gradient(const Field& u) {
  const Grid& g = *u.grid;
  const int n = g.node_count();
  GradientField out;
  out.grid = u.grid;
  out.time = u.time;
  out.gx.assign(n, 0.0);
  out.gy.assign(n, 0.0);
  out.valid.assign(n, 0);
  for (int id = 0; id < n; ++id) {
    double dx = 0.0, dy = 0.0;
    bool ok = axis_first(g, u.values, id, 0, &dx);
    if (g.dim() == 2) ok = axis_first(g, u.values, id, 1, &dy) && ok;
    out.gx[id] = dx;
    out.gy[id] = dy;
    out.valid[id] = ok ? 1 : 0;
  }
  return out;
}

MaskedField laplacian(const Field& u) {
  const Grid& g = *u.grid;
  const int n = g.node_count();
  MaskedField out;
  out.grid = u.grid;
  out.time = u.time;
  out.values.assign(n, 0.0);
  out.valid.assign(n, 0);
  for (int id = 0; id < n; ++id) {
    AxisDeriv dx = axis_derivatives(g, u.values, id, 0);
    double lap = dx.second;
    bool ok = dx.ok;
    if (g.dim() == 2) {
      AxisDeriv dy = axis_derivatives(g, u.values, id, 1);
      lap += dy.second;
      ok = ok && dy.ok;
    }
    out.values[id] = lap;
    out.valid[id] = ok ? 1 : 0;
  }
  return out;
}

HessianField hessian(const Field& u) {
  const Grid& g = *u.grid;
  const int n = g.node_count();
  HessianField out;
  out.grid = u.grid;
  out.time = u.time;
  out.xx.assign(n, 0.0);
  out.xy.assign(n, 0.0);
  out.yy.assign(n, 0.0);
  out.valid.assign(n, 0);
  const double h = g.spacing();
  for (int id = 0; id < n; ++id) {
    AxisDeriv dx = axis_derivatives(g, u.values, id, 0);
    bool ok = dx.ok;
    out.xx[id] = dx.second;
    if (g.dim() == 2) {
      AxisDeriv dy = axis_derivatives(g, u.values, id, 1);
      out.yy[id] = dy.second;
      ok = ok && dy.ok;
      const auto [i, j] = g.lattice_index(id);
      const int pp = g.id_at(i + 1, j + 1), mm = g.id_at(i - 1, j - 1);
      const int pm = g.id_at(i + 1, j - 1), mp = g.id_at(i - 1, j + 1);
      if (pp >= 0 && mm >= 0 && pm >= 0 && mp >= 0) {
        out.xy[id] = (u.values[pp] + u.values[mm] - u.values[pm] -
                      u.values[mp]) /
                     (4.0 * h * h);
      } else {
        ok = false;
      }
    }
    out.valid[id] = ok ? 1 : 0;
  }
  return out;
}

TimeDerivative time_derivative(const std::vector<Field>& snapshots,
                               int index) {
  if (snapshots.size() < 2) {
    throw std::invalid_argument("time derivative needs at least two snapshots");
  }
  if (index < 0 || index >= static_cast<int>(snapshots.size())) {
    throw std::out_of_range("time derivative: snapshot index out of range");
  }
  const int last = static_cast<int>(snapshots.size()) - 1;
  const Field& u = snapshots[index];
  TimeDerivative out;
  out.field.grid = u.grid;
  out.field.time = u.time;
  out.field.values.assign(u.values.size(), 0.0);
  out.field.valid.assign(u.values.size(), 1);

  if (index > 0 && index < last) {
    const Field& a = snapshots[index - 1];
    const Field& b = snapshots[index + 1];
    const double ha = u.time - a.time;
    const double hb = b.time - u.time;
    // Non-uniform central 3-point formula, second order in max(ha, hb).
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      out.field.values[i] =
          (hb * hb * (u.values[i] - a.values[i]) +
           ha * ha * (b.values[i] - u.values[i])) /
          (ha * hb * (ha + hb));
    }
    out.second_order = true;
  } else {
    const Field& o = (index == 0) ? snapshots[1] : snapshots[last - 1];
    const double dt = (index == 0) ? (o.time - u.time) : (u.time - o.time);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      out.field.values[i] = (index == 0)
                                ? (o.values[i] - u.values[i]) / dt
                                : (u.values[i] - o.values[i]) / dt;
    }
    out.second_order = false;
  }
  return out;
}

}  // namespace gradheat
