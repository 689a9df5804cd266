#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradheat/params.hpp"
#include "gradheat/solver.hpp"

namespace gradheat {

/// The verification passes an experiment may request.
enum class CheckKind { Bernstein, Integral, Estimates, Doubling, Rescaling };

std::string to_string(CheckKind kind);

/// Parses a check name ("bernstein", "integral", ...). Throws ConfigError on
/// unknown names.
CheckKind parse_check(const std::string& name);

/// Closed-form initial data evaluated on a grid. `amplitude` scales the
/// profile; `sigma` is the Gaussian width; `offset` is added everywhere
/// (rim nodes included, so a frozen boundary keeps it).
struct InitialCondition {
  enum class Profile { Bump, Parabola, Cosine, Gaussian, Constant };
  Profile profile = Profile::Bump;
  double amplitude = 1.0;
  double sigma = 1.0;
  double offset = 0.0;
};

InitialCondition::Profile parse_profile(const std::string& name);
std::string to_string(InitialCondition::Profile profile);

/// Evaluates the profile at distance-squared s2 from the grid center on a
/// grid of the given radius.
double initial_value(const InitialCondition& ic, double s2, double radius);

Field make_initial_field(const InitialCondition& ic,
                         std::shared_ptr<const Grid> grid);

/// A parsed experiment description: one base problem plus optional sweep
/// axes. Sweep axes are never empty after parsing — axes the file does not
/// mention collapse to the singleton {base value}.
struct ExperimentConfig {
  ProblemParams problem;
  double radius = 2.0;
  double spacing = 0.05;
  double t_end = 0.5;
  double dt = 0.0;  // 0 means "derive from the stability limit"
  double safety = 0.8;
  BoundaryCondition boundary = BoundaryCondition::DirichletZero;
  int snapshot_stride = 1;
  InitialCondition initial;
  std::vector<CheckKind> checks;
  std::vector<Rational> sweep_p;
  std::vector<Rational> sweep_q;
  std::vector<double> sweep_coeff;
  std::vector<double> sweep_radius;
  std::string output_dir;
  std::uint64_t seed = 1;
  int jobs = 1;

  /// Number of sweep points (product of axis lengths).
  long sweep_size() const;

  /// Throws ConfigError if any invariant fails (axes nonempty, parameters
  /// admissible, spacing compatible with the radius).
  void validate() const;
};

/// Parses configuration text. Sections: [problem], [grid], [solver],
/// [initial], [checks], [sweep], [output]. '#' and ';' start comments.
/// Unknown sections or keys are errors, not warnings.
ExperimentConfig parse_config(const std::string& text);

/// Reads and parses a configuration file. Throws ConfigError when the file
/// cannot be read.
ExperimentConfig load_config(const std::string& path);

}  // namespace gradheat
