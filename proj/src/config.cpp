#include "gradheat/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gradheat/errors.hpp"

namespace gradheat {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!item.empty()) {
        out.push_back(item);
        item.clear();
      }
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

double parse_real(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse real value '" + s + "'");
  }
}

long parse_integer(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse integer '" + s + "'");
  }
}

Rational parse_rational_or_die(const std::string& s, const std::string& key) {
  try {
    return Rational::parse(s);
  } catch (const std::exception& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

BoundaryCondition parse_boundary(const std::string& s) {
  if (s == "zero") return BoundaryCondition::DirichletZero;
  if (s == "frozen") return BoundaryCondition::DirichletFrozen;
  if (s == "periodic") return BoundaryCondition::Periodic;
  throw ConfigError("unknown boundary condition '" + s +
                    "' (expected zero|frozen|periodic)");
}

}  // namespace

std::string to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::Bernstein: return "bernstein";
    case CheckKind::Integral: return "integral";
    case CheckKind::Estimates: return "estimates";
    case CheckKind::Doubling: return "doubling";
    case CheckKind::Rescaling: return "rescaling";
  }
  return "?";
}

CheckKind parse_check(const std::string& name) {
  if (name == "bernstein") return CheckKind::Bernstein;
  if (name == "integral") return CheckKind::Integral;
  if (name == "estimates") return CheckKind::Estimates;
  if (name == "doubling") return CheckKind::Doubling;
  if (name == "rescaling") return CheckKind::Rescaling;
  throw ConfigError("unknown check '" + name + "'");
}

InitialCondition::Profile parse_profile(const std::string& name) {
  using P = InitialCondition::Profile;
  if (name == "bump") return P::Bump;
  if (name == "parabola") return P::Parabola;
  if (name == "cosine") return P::Cosine;
  if (name == "gaussian") return P::Gaussian;
  if (name == "constant") return P::Constant;
  throw ConfigError("unknown initial profile '" + name + "'");
}

std::string to_string(InitialCondition::Profile profile) {
  using P = InitialCondition::Profile;
  switch (profile) {
    case P::Bump: return "bump";
    case P::Parabola: return "parabola";
    case P::Cosine: return "cosine";
    case P::Gaussian: return "gaussian";
    case P::Constant: return "constant";
  }
  return "?";
}

double initial_value(const InitialCondition& ic, double s2, double radius) {
  using P = InitialCondition::Profile;
  const double r2 = radius * radius;
  double shape = 0.0;
  switch (ic.profile) {
    case P::Bump: {
      const double s = s2 / r2;
      shape = (s >= 1.0 - 1e-12) ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - s));
      break;
    }
    case P::Parabola:
      shape = std::max(0.0, 1.0 - s2 / r2);
      break;
    case P::Cosine: {
      const double r = std::sqrt(s2);
      shape = (r >= radius) ? 0.0
                            : std::cos(0.5 * std::acos(-1.0) * r / radius);
      shape *= shape;
      break;
    }
    case P::Gaussian:
      shape = std::exp(-s2 / (2.0 * ic.sigma * ic.sigma));
      break;
    case P::Constant:
      shape = 1.0;
      break;
  }
  return ic.amplitude * shape + ic.offset;
}

Field make_initial_field(const InitialCondition& ic,
                         std::shared_ptr<const Grid> grid) {
  const double radius = grid->radius();
  Field field = zero_field(grid, 0.0);
  for (int id = 0; id < grid->node_count(); ++id) {
    field.values[id] = initial_value(ic, grid->dist2_from_center(id), radius);
  }
  return field;
}

long ExperimentConfig::sweep_size() const {
  return static_cast<long>(sweep_p.size()) *
         static_cast<long>(sweep_q.size()) *
         static_cast<long>(sweep_coeff.size()) *
         static_cast<long>(sweep_radius.size());
}

void ExperimentConfig::validate() const {
  try {
    problem.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("problem parameters: ") + e.what());
  }
  if (!(radius > 0.0)) throw ConfigError("grid radius must be positive");
  if (!(spacing > 0.0) || spacing >= radius / 4.0) {
    throw ConfigError("grid spacing must lie in (0, radius/4)");
  }
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (dt < 0.0) throw ConfigError("dt must be nonnegative (0 = automatic)");
  if (!(safety > 0.0) || safety > 1.0) {
    throw ConfigError("safety factor must lie in (0, 1]");
  }
  if (snapshot_stride < 1) throw ConfigError("snapshot stride must be >= 1");
  if (boundary == BoundaryCondition::Periodic && problem.dim != 1) {
    throw ConfigError("periodic boundaries are only available in 1D");
  }
  if (sweep_p.empty() || sweep_q.empty() || sweep_coeff.empty() ||
      sweep_radius.empty()) {
    throw ConfigError("sweep axes must be nonempty");
  }
  for (const auto& pv : sweep_p) {
    if (!(pv > Rational(1))) throw ConfigError("sweep p values must exceed 1");
  }
  for (const auto& qv : sweep_q) {
    if (!(qv > Rational(1)) || !(qv < Rational(2))) {
      throw ConfigError("sweep q values must lie in (1, 2)");
    }
  }
  for (double m : sweep_coeff) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw ConfigError("sweep coefficient values must be finite and >= 0");
    }
  }
  for (double r : sweep_radius) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw ConfigError("sweep radii must be positive");
    }
  }
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;

  auto fail = [&](const std::string& msg) {
    throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "problem" && section != "grid" && section != "solver" &&
          section != "initial" && section != "checks" && section != "sweep" &&
          section != "output") {
        fail("unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (value.empty()) fail("key '" + key + "' has no value");

    try {
      if (section == "problem") {
        if (key == "dim") {
          cfg.problem.dim = static_cast<int>(parse_integer(value, key));
        } else if (key == "p") {
          cfg.problem.p = parse_rational_or_die(value, key);
        } else if (key == "q") {
          cfg.problem.q = parse_rational_or_die(value, key);
        } else if (key == "coefficient") {
          cfg.problem.gradient_coeff = parse_real(value, key);
        } else {
          fail("unknown key '" + key + "' in [problem]");
        }
      } else if (section == "grid") {
        if (key == "radius") {
          cfg.radius = parse_real(value, key);
        } else if (key == "spacing") {
          cfg.spacing = parse_real(value, key);
        } else {
          fail("unknown key '" + key + "' in [grid]");
        }
      } else if (section == "solver") {
        if (key == "t_end") {
          cfg.t_end = parse_real(value, key);
        } else if (key == "dt") {
          cfg.dt = parse_real(value, key);
        } else if (key == "safety") {
          cfg.safety = parse_real(value, key);
        } else if (key == "boundary") {
          cfg.boundary = parse_boundary(value);
        } else if (key == "snapshot_stride") {
          cfg.snapshot_stride =
              static_cast<int>(parse_integer(value, key));
        } else {
          fail("unknown key '" + key + "' in [solver]");
        }
      } else if (section == "initial") {
        if (key == "profile") {
          cfg.initial.profile = parse_profile(value);
        } else if (key == "amplitude") {
          cfg.initial.amplitude = parse_real(value, key);
        } else if (key == "sigma") {
          cfg.initial.sigma = parse_real(value, key);
        } else if (key == "offset") {
          cfg.initial.offset = parse_real(value, key);
        } else {
          fail("unknown key '" + key + "' in [initial]");
        }
      } else if (section == "checks") {
        if (key == "run") {
          for (const auto& name : split_list(value)) {
            cfg.checks.push_back(parse_check(name));
          }
        } else {
          fail("unknown key '" + key + "' in [checks]");
        }
      } else if (section == "sweep") {
        const auto items = split_list(value);
        if (key == "p") {
          for (const auto& s : items) {
            cfg.sweep_p.push_back(parse_rational_or_die(s, key));
          }
        } else if (key == "q") {
          for (const auto& s : items) {
            cfg.sweep_q.push_back(parse_rational_or_die(s, key));
          }
        } else if (key == "coefficient") {
          for (const auto& s : items) {
            cfg.sweep_coeff.push_back(parse_real(s, key));
          }
        } else if (key == "radius") {
          for (const auto& s : items) {
            cfg.sweep_radius.push_back(parse_real(s, key));
          }
        } else {
          fail("unknown key '" + key + "' in [sweep]");
        }
      } else if (section == "output") {
        if (key == "dir") {
          cfg.output_dir = value;
        } else if (key == "seed") {
          cfg.seed = static_cast<std::uint64_t>(parse_integer(value, key));
        } else if (key == "jobs") {
          cfg.jobs = static_cast<int>(parse_integer(value, key));
        } else {
          fail("unknown key '" + key + "' in [output]");
        }
      } else {
        fail("key '" + key + "' appears before any section header");
      }
    } catch (const ConfigError& e) {
      // Re-tag nested parse errors with the line number once.
      const std::string what = e.what();
      if (what.rfind("line ", 0) == 0) throw;
      fail(what);
    }
  }

  // Unmentioned sweep axes collapse to the base problem value.
  if (cfg.sweep_p.empty()) cfg.sweep_p.push_back(cfg.problem.p);
  if (cfg.sweep_q.empty()) cfg.sweep_q.push_back(cfg.problem.q);
  if (cfg.sweep_coeff.empty()) {
    cfg.sweep_coeff.push_back(cfg.problem.gradient_coeff);
  }
  if (cfg.sweep_radius.empty()) cfg.sweep_radius.push_back(cfg.radius);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace gradheat
