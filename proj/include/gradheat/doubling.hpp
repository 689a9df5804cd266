#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gradheat/solver.hpp"

namespace gradheat::doubling {

/// A space-time point; 1D instances leave x[1] at zero.
struct ParabolicPoint {
  std::array<double, 2> x{0.0, 0.0};
  double t = 0.0;
};

/// d_P((x,t),(y,s)) = |x−y| + |t−s|^{1/2}.
double parabolic_distance(const ParabolicPoint& a, const ParabolicPoint& b);

/// Plain Euclidean distance on (x, t) for comparison instances.
double euclidean_distance(const ParabolicPoint& a, const ParabolicPoint& b);

enum class Metric { Parabolic, Euclidean };

/// A finite doubling instance: sample set Σ split into the working set D and
/// its complement Γ, with a positive weight Mfun on D and ball constant k.
struct DoublingInstance {
  Metric metric = Metric::Parabolic;
  double k = 1.0;
  std::vector<ParabolicPoint> points;
  std::vector<std::uint8_t> in_domain;  // 1 ⇔ point belongs to D
  std::vector<double> m_values;         // Mfun; read only on D entries

  /// Throws std::invalid_argument on structural problems (empty D,
  /// non-positive Mfun on D, k ≤ 0, mismatched lengths).
  void validate() const;

  double distance(int i, int j) const;
  /// min distance to Γ; +inf when Γ is empty (hypothesis then vacuous).
  double dist_to_complement(int i) const;
  long domain_size() const;
};

/// Diff-friendly text form (one record per point) and its parser.
std::string to_text(const DoublingInstance& inst);
DoublingInstance parse_instance(const std::string& text);

struct DoublingResult {
  int index = -1;       // located point x
  int start = -1;
  int hops = 0;
  long hop_bound = 0;   // ⌈log₂(max Mfun / Mfun(start))⌉ + 1
  double m_value = 0.0;
  double m_times_dist = 0.0;  // Mfun(x)·dist(x, Γ), first conclusion
  bool dominates_start = false;
  long ball_violations = 0;   // points z with Mfun(z) > 2 Mfun(x) in the ball
  std::vector<int> path;      // visited indices, start first
};

/// Iterative doubling search: while some z ∈ D within k/Mfun(x) has
/// Mfun(z) > 2 Mfun(x), hop to the Mfun-maximizing such z (ties broken by
/// coordinate order, then index).  Requires Mfun(start)·dist(start, Γ) > 2k
/// (HypothesisError otherwise).  All three conclusions are re-verified
/// exhaustively before returning; a failure is an internal logic error.
DoublingResult find_doubling_point(const DoublingInstance& inst,
                                   int start_index);

/// Index maximizing Mfun·dist(·, Γ) among points satisfying the hypothesis,
/// or −1 when no point qualifies.
int best_start(const DoublingInstance& inst);

/// Builds an instance from a finished run: D = interior nodes at interior
/// snapshot times with Mfun = u^{(p−1)/2} + |∇u|^{(p−1)/(p+1)}, Γ = the
/// parabolic boundary samples (rim nodes, first and last snapshots).
/// Nodes where Mfun vanishes are dropped from D.
DoublingInstance from_trajectory(const Trajectory& traj, double k,
                                 int space_stride = 1, int time_stride = 1);

/// Interpolation-based Mfun at an arbitrary point (central differences at
/// the probe spacing).  Used to cross-check instance weights.
double sample_m(const Trajectory& traj, const ParabolicPoint& at,
                double probe_spacing);

struct RescalingFrame {
  double lambda = 1.0;
  double normalization = 0.0;  // λ·Mfun at the frame origin, target 1
  double sup_m = 0.0;          // sup of λ·Mfun over the frame
  long samples = 0;
};

/// Rescaled-window audit around `at`: v(y,s) = λ^{2/(p−1)} u(x+λy, t+λ²s)
/// sampled on the parabolic ball |y| + √|s| ≤ frame_radius.  With λ taken
/// from a doubling point the sup stays ≤ 2 up to interpolation error.
/// Throws OutOfWindowError when the frame leaves the recorded cylinder.
RescalingFrame rescaling_frame(const Trajectory& traj,
                               const ParabolicPoint& at, double lambda,
                               double frame_radius, int lattice_per_side = 8);

/// Residual of the normalized-nonlinearity limit
/// λ^{2p/(p−1)} f(λ^{−2/(p−1)} v) → l v^p (λ → 0⁺), evaluated at one (v, λ).
double nonlinearity_limit_residual(const std::function<double(double)>& f,
                                   double l, double p, double v,
                                   double lambda);

}  // namespace gradheat::doubling
