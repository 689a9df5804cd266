#include "gradheat/doubling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gradheat/errors.hpp"
#include "gradheat/fdm.hpp"
#include "gradheat/rescale.hpp"

namespace gradheat::doubling {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool coord_less(const ParabolicPoint& a, const ParabolicPoint& b) {
  if (a.x[0] != b.x[0]) return a.x[0] < b.x[0];
  if (a.x[1] != b.x[1]) return a.x[1] < b.x[1];
  return a.t < b.t;
}

}  // namespace

double parabolic_distance(const ParabolicPoint& a, const ParabolicPoint& b) {
  return std::hypot(a.x[0] - b.x[0], a.x[1] - b.x[1]) +
         std::sqrt(std::abs(a.t - b.t));
}

double euclidean_distance(const ParabolicPoint& a, const ParabolicPoint& b) {
  const double dx = a.x[0] - b.x[0];
  const double dy = a.x[1] - b.x[1];
  const double dt = a.t - b.t;
  return std::sqrt(dx * dx + dy * dy + dt * dt);
}

void DoublingInstance::validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("ball constant k must be positive");
  if (points.size() != in_domain.size() || points.size() != m_values.size()) {
    throw std::invalid_argument("instance arrays have mismatched lengths");
  }
  long d = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].x[0]) || !std::isfinite(points[i].x[1]) ||
        !std::isfinite(points[i].t)) {
      throw std::invalid_argument("instance point has non-finite coordinates");
    }
    if (in_domain[i]) {
      ++d;
      if (!(m_values[i] > 0.0) || !std::isfinite(m_values[i])) {
        throw std::invalid_argument("Mfun must be positive and finite on D");
      }
    }
  }
  if (d == 0) throw std::invalid_argument("the working set D is empty");
}

double DoublingInstance::distance(int i, int j) const {
  return (metric == Metric::Parabolic)
             ? parabolic_distance(points[i], points[j])
             : euclidean_distance(points[i], points[j]);
}

double DoublingInstance::dist_to_complement(int i) const {
  double best = kInf;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (!in_domain[j]) {
      best = std::min(best, distance(i, static_cast<int>(j)));
    }
  }
  return best;
}

long DoublingInstance::domain_size() const {
  long d = 0;
  for (auto flag : in_domain) d += flag ? 1 : 0;
  return d;
}

std::string to_text(const DoublingInstance& inst) {
  std::ostringstream out;
  out << "metric "
      << (inst.metric == Metric::Parabolic ? "parabolic" : "euclidean")
      << "\n";
  out << "k " << fmt(inst.k) << "\n";
  out << "points " << inst.points.size() << "\n";
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    const auto& pt = inst.points[i];
    out << "pt " << fmt(pt.x[0]) << " " << fmt(pt.x[1]) << " " << fmt(pt.t);
    if (inst.in_domain[i]) {
      out << " D " << fmt(inst.m_values[i]);
    } else {
      out << " G";
    }
    out << "\n";
  }
  return out.str();
}

DoublingInstance parse_instance(const std::string& text) {
  std::istringstream in(text);
  DoublingInstance inst;
  std::string word;
  std::size_t declared = 0;
  while (in >> word) {
    if (word == "metric") {
      std::string name;
      if (!(in >> name)) throw std::invalid_argument("truncated metric line");
      if (name == "parabolic") {
        inst.metric = Metric::Parabolic;
      } else if (name == "euclidean") {
        inst.metric = Metric::Euclidean;
      } else {
        throw std::invalid_argument("unknown metric: " + name);
      }
    } else if (word == "k") {
      if (!(in >> inst.k)) throw std::invalid_argument("truncated k line");
    } else if (word == "points") {
      if (!(in >> declared)) throw std::invalid_argument("truncated count");
    } else if (word == "pt") {
      ParabolicPoint pt;
      std::string tag;
      if (!(in >> pt.x[0] >> pt.x[1] >> pt.t >> tag)) {
        throw std::invalid_argument("truncated point record");
      }
      inst.points.push_back(pt);
      if (tag == "D") {
        double m = 0.0;
        if (!(in >> m)) throw std::invalid_argument("missing Mfun value");
        inst.in_domain.push_back(1);
        inst.m_values.push_back(m);
      } else if (tag == "G") {
        inst.in_domain.push_back(0);
        inst.m_values.push_back(0.0);
      } else {
        throw std::invalid_argument("point tag must be D or G");
      }
    } else if (!word.empty() && word[0] == '#') {
      std::string rest;
      std::getline(in, rest);
    } else {
      throw std::invalid_argument("unknown record: " + word);
    }
  }
  if (declared != 0 && declared != inst.points.size()) {
    throw std::invalid_argument("declared point count disagrees with records");
  }
  inst.validate();
  return inst;
}

DoublingResult find_doubling_point(const DoublingInstance& inst,
                                   int start_index) {
  inst.validate();
  const int n = static_cast<int>(inst.points.size());
  if (start_index < 0 || start_index >= n || !inst.in_domain[start_index]) {
    throw std::invalid_argument("start point must belong to D");
  }
  const double start_value =
      inst.m_values[start_index] * inst.dist_to_complement(start_index);
  if (!(start_value > 2.0 * inst.k)) {
    throw HypothesisError(
        "starting point violates Mfun·dist(·,Γ) > 2k; no doubling point is "
        "promised");
  }

  double max_m = 0.0;
  for (int i = 0; i < n; ++i) {
    if (inst.in_domain[i]) max_m = std::max(max_m, inst.m_values[i]);
  }
  DoublingResult result;
  result.start = start_index;
  result.hop_bound = static_cast<long>(std::ceil(std::max(
                         0.0, std::log2(max_m / inst.m_values[start_index])))) +
                     1;

  int current = start_index;
  result.path.push_back(current);
  while (true) {
    const double radius = inst.k / inst.m_values[current];
    int best = -1;
    for (int z = 0; z < n; ++z) {
      if (!inst.in_domain[z]) continue;
      if (inst.distance(current, z) > radius) continue;
      if (!(inst.m_values[z] > 2.0 * inst.m_values[current])) continue;
      if (best < 0 || inst.m_values[z] > inst.m_values[best] ||
          (inst.m_values[z] == inst.m_values[best] &&
           (coord_less(inst.points[z], inst.points[best]) ||
            (!coord_less(inst.points[best], inst.points[z]) && z < best)))) {
        best = z;
      }
    }
    if (best < 0) break;
    current = best;
    result.path.push_back(current);
    ++result.hops;
    if (result.hops > n) {
      throw std::logic_error("doubling search failed to terminate");
    }
  }

  result.index = current;
  result.m_value = inst.m_values[current];
  result.m_times_dist = result.m_value * inst.dist_to_complement(current);
  result.dominates_start =
      result.m_value >= inst.m_values[start_index];
  const double ball = inst.k / result.m_value;
  for (int z = 0; z < n; ++z) {
    if (!inst.in_domain[z]) continue;
    if (inst.distance(result.index, z) > ball) continue;
    if (inst.m_values[z] > 2.0 * result.m_value) ++result.ball_violations;
  }
  if (!(result.m_times_dist > 2.0 * inst.k) || !result.dominates_start ||
      result.ball_violations != 0) {
    throw std::logic_error("doubling conclusions failed certification");
  }
  return result;
}

int best_start(const DoublingInstance& inst) {
  inst.validate();
  int best = -1;
  double best_value = 2.0 * inst.k;
  for (int i = 0; i < static_cast<int>(inst.points.size()); ++i) {
    if (!inst.in_domain[i]) continue;
    const double value = inst.m_values[i] * inst.dist_to_complement(i);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

DoublingInstance from_trajectory(const Trajectory& traj, double k,
                                 int space_stride, int time_stride) {
  if (space_stride < 1 || time_stride < 1) {
    throw std::invalid_argument("strides must be at least 1");
  }
  const Grid& grid = *traj.grid;
  const ProblemParams& params = traj.params;
  const double p = params.p_value();
  const double u_pow = 0.5 * (p - 1.0);
  const double g_pow = (p - 1.0) / (p + 1.0);

  DoublingInstance inst;
  inst.k = k;
  const int count = traj.snapshot_count();
  for (int s = 0; s < count; ++s) {
    if (s % time_stride != 0 && s != count - 1) continue;
    const Field& snap = traj.snapshot(s);
    const bool time_boundary = (s == 0) || (s == count - 1);
    const GradientField g = gradient(snap);
    for (int id = 0; id < grid.node_count(); id += space_stride) {
      ParabolicPoint pt;
      const auto c = grid.coord(id);
      pt.x = {c[0], c[1]};
      pt.t = snap.time;
      const bool interior =
          !time_boundary && grid.has_interior_margin(id, 1);
      if (interior) {
        const double m = std::pow(std::max(0.0, snap.values[id]), u_pow) +
                         std::pow(std::sqrt(g.magnitude2(id)), g_pow);
        if (m <= 1e-14) continue;  // flat spots carry no doubling content
        inst.points.push_back(pt);
        inst.in_domain.push_back(1);
        inst.m_values.push_back(m);
      } else {
        inst.points.push_back(pt);
        inst.in_domain.push_back(0);
        inst.m_values.push_back(0.0);
      }
    }
  }
  inst.validate();
  return inst;
}

double sample_m(const Trajectory& traj, const ParabolicPoint& at,
                double probe_spacing) {
  const ProblemParams& params = traj.params;
  const double p = params.p_value();
  const double u = interpolate(traj, at.x[0], at.x[1], at.t);
  const double gx = (interpolate(traj, at.x[0] + probe_spacing, at.x[1], at.t) -
                     interpolate(traj, at.x[0] - probe_spacing, at.x[1], at.t)) /
                    (2.0 * probe_spacing);
  double g2 = gx * gx;
  if (traj.grid->dim() == 2) {
    const double gy =
        (interpolate(traj, at.x[0], at.x[1] + probe_spacing, at.t) -
         interpolate(traj, at.x[0], at.x[1] - probe_spacing, at.t)) /
        (2.0 * probe_spacing);
    g2 += gy * gy;
  }
  return std::pow(std::max(0.0, u), 0.5 * (p - 1.0)) +
         std::pow(std::sqrt(g2), (p - 1.0) / (p + 1.0));
}

RescalingFrame rescaling_frame(const Trajectory& traj,
                               const ParabolicPoint& at, double lambda,
                               double frame_radius, int lattice_per_side) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(frame_radius > 0.0)) {
    throw std::invalid_argument("frame radius must be positive");
  }
  if (lattice_per_side < 2) {
    throw std::invalid_argument("lattice needs at least two cells per side");
  }
  const Grid& grid = *traj.grid;
  const double probe = grid.spacing();

  RescalingFrame frame;
  frame.lambda = lambda;
  frame.normalization = lambda * sample_m(traj, at, probe);

  const int n = lattice_per_side;
  const double dy = frame_radius / n;
  const double ds = frame_radius * frame_radius / n;
  const int ny2 = (grid.dim() == 2) ? n : 0;
  for (int i = -n; i <= n; ++i) {
    for (int j = -ny2; j <= ny2; ++j) {
      for (int sidx = -n; sidx <= n; ++sidx) {
        const double y0 = i * dy;
        const double y1 = j * dy;
        const double s = sidx * ds;
        if (std::hypot(y0, y1) + std::sqrt(std::abs(s)) >
            frame_radius * (1.0 + 1e-12)) {
          continue;
        }
        ParabolicPoint phys;
        phys.x = {at.x[0] + lambda * y0, at.x[1] + lambda * y1};
        phys.t = at.t + lambda * lambda * s;
        frame.sup_m = std::max(frame.sup_m,
                               lambda * sample_m(traj, phys, probe));
        ++frame.samples;
      }
    }
  }
  return frame;
}

double nonlinearity_limit_residual(const std::function<double(double)>& f,
                                   double l, double p, double v,
                                   double lambda) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const double scale = std::pow(lambda, 2.0 * p / (p - 1.0));
  const double arg = std::pow(lambda, -2.0 / (p - 1.0)) * v;
  return std::abs(scale * f(arg) - l * std::pow(v, p));
}

}  // namespace gradheat::doubling
