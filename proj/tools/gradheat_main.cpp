#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gradheat/config.hpp"
#include "gradheat/doubling.hpp"
#include "gradheat/errors.hpp"
#include "gradheat/params.hpp"
#include "gradheat/pipeline.hpp"
#include "gradheat/report.hpp"

namespace {

using namespace gradheat;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config_path,
                              "experiment configuration file");
  if (config_required) opt->required();
  cmd->add_option("--out", flags.out_dir, "output directory for reports");
  cmd->add_option("--seed", flags.seed, "override the configured random seed");
  cmd->add_option("--jobs", flags.jobs, "override the configured worker count");
}

std::string resolve_out_dir(const std::string& flag_value,
                            const std::string& config_value) {
  if (!flag_value.empty()) return flag_value;
  if (!config_value.empty()) return config_value;
  if (const char* env = std::getenv("GRADHEAT_OUT")) {
    if (*env) return env;
  }
  return ".";
}

ExperimentConfig prepare(const CommonFlags& flags) {
  ExperimentConfig cfg = load_config(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.jobs > 0) cfg.jobs = flags.jobs;
  cfg.output_dir = resolve_out_dir(flags.out_dir, cfg.output_dir);
  return cfg;
}

int run_checks(ExperimentConfig cfg,
               std::optional<CheckKind> forced_check) {
  if (forced_check) cfg.checks = {*forced_check};
  if (cfg.checks.empty()) {
    std::cout << "no checks requested; nothing to do\n";
    return kExitOk;
  }
  ReportWriter writer(cfg.output_dir);
  const int failures = pipeline::run_experiment(cfg, writer);
  writer.write();
  std::cout << writer.summary_csv();
  std::cout << (failures == 0 ? "all checks passed\n"
                              : std::to_string(failures) +
                                    " check case(s) failed\n");
  return failures == 0 ? kExitOk : kExitRuntime;
}

int cmd_classify(const std::string& p_text, const std::string& q_text) {
  ProblemParams params;
  try {
    params.p = Rational::parse(p_text);
    params.q = Rational::parse(q_text);
  } catch (const std::exception& e) {
    std::cerr << "cannot parse exponent: " << e.what() << "\n";
    return kExitConfig;
  }
  const Regime regime = classify(params);
  std::string name = to_string(regime);
  name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  std::cout << name << "\n";
  std::cout << "q = " << params.q.str()
            << ", critical q = " << critical_q(params.p).str() << "\n";
  return kExitOk;
}

int cmd_exponents(int dim, const std::string& p_text,
                  const std::string& q_text) {
  Rational p = Rational::parse(p_text);
  Rational q = Rational::parse(q_text);
  const auto p_s = sobolev_exponent(dim);
  const auto p_bv = bidaut_veron_exponent(dim);
  std::cout << "q_crit = " << critical_q(p).str() << "\n";
  std::cout << "p_sobolev = " << (p_s.is_finite() ? p_s.value().str() : "inf")
            << "\n";
  std::cout << "p_bidaut_veron = "
            << (p_bv.is_finite() ? p_bv.value().str() : "inf") << "\n";
  std::cout << "coeff_threshold = " << format_real(coeff_threshold(dim, p))
            << "\n";
  std::cout << "aux_exponent = " << format_real(aux_exponent(dim, q)) << "\n";
  return kExitOk;
}

int cmd_solve(const CommonFlags& flags) {
  ExperimentConfig cfg = prepare(flags);
  const auto points = pipeline::sweep_points(cfg);
  ReportWriter writer(cfg.output_dir);
  int status = kExitOk;
  for (const auto& pt : points) {
    const std::string label = pipeline::point_label(pt);
    const Trajectory traj = pipeline::run_point(cfg, pt);
    pipeline::emit_solution(traj, label, writer);
    std::ostringstream detail;
    detail << "status=" << to_string(traj.status)
           << " final_time=" << format_real(traj.final_time)
           << " clamps=" << traj.clamp_count;
    writer.add_summary("solve", label, true, detail.str());
    std::cout << label << ": " << detail.str() << "\n";
  }
  writer.write();
  return status;
}

int cmd_doubling_check(const std::string& fixture, int start) {
  std::ifstream in(fixture);
  if (!in) {
    std::cerr << "cannot read fixture: " << fixture << "\n";
    return kExitConfig;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  doubling::DoublingInstance inst;
  try {
    inst = doubling::parse_instance(buf.str());
  } catch (const std::exception& e) {
    std::cerr << "bad fixture: " << e.what() << "\n";
    return kExitConfig;
  }
  int begin = start;
  if (begin < 0) {
    begin = doubling::best_start(inst);
    if (begin < 0) {
      std::cerr << "hypothesis fails at every domain point\n";
      return kExitRuntime;
    }
  }
  const auto result = doubling::find_doubling_point(inst, begin);
  std::cout << "start = " << result.start << "\n";
  std::cout << "index = " << result.index << "\n";
  std::cout << "hops = " << result.hops << " (bound " << result.hop_bound
            << ")\n";
  std::cout << "m_times_dist = " << format_real(result.m_times_dist) << " > "
            << format_real(2.0 * inst.k) << "\n";
  std::cout << "dominates_start = " << (result.dominates_start ? "yes" : "no")
            << "\n";
  std::cout << "ball_violations = " << result.ball_violations << "\n";
  std::cout << "pass\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gradheat: numerical checks for the heat equation with a power "
      "reaction and a gradient source"};
  app.require_subcommand(1);

  // classify
  std::string cl_p, cl_q;
  auto* classify_cmd =
      app.add_subcommand("classify", "classify (p, q) against the scaling-"
                                     "critical exponent 2p/(p+1)");
  classify_cmd->add_option("p", cl_p, "reaction exponent (rational, e.g. 3)")
      ->required();
  classify_cmd
      ->add_option("q", cl_q, "gradient exponent (rational, e.g. 3/2)")
      ->required();

  // exponents
  int ex_dim = 1;
  std::string ex_p = "3", ex_q = "3/2";
  auto* exponents_cmd = app.add_subcommand(
      "exponents", "print the derived exponents and thresholds");
  exponents_cmd->add_option("dim", ex_dim, "spatial dimension")->required();
  exponents_cmd->add_option("--p", ex_p, "reaction exponent");
  exponents_cmd->add_option("--q", ex_q, "gradient exponent");

  // config-driven subcommands
  CommonFlags solve_flags, bern_flags, integ_flags, est_flags, resc_flags,
      sweep_flags;
  auto* solve_cmd =
      app.add_subcommand("solve", "run the configured simulation(s) and dump "
                                  "profiles and sup-norm histories");
  add_common(solve_cmd, solve_flags, true);

  auto* bern_cmd = app.add_subcommand(
      "verify-bernstein", "pointwise drift-operator inequality audit");
  add_common(bern_cmd, bern_flags, true);

  auto* integ_cmd = app.add_subcommand(
      "verify-integral", "weighted space-time integral inequality audit");
  add_common(integ_cmd, integ_flags, true);

  auto* est_cmd = app.add_subcommand(
      "verify-estimates", "gradient-bound hypothesis checks and envelope fits");
  add_common(est_cmd, est_flags, true);

  auto* resc_cmd = app.add_subcommand(
      "rescale-check", "doubling-point rescaling frame normalization");
  add_common(resc_cmd, resc_flags, true);

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "run every configured check across the sweep axes");
  add_common(sweep_cmd, sweep_flags, true);

  // doubling-check
  std::string fixture_path;
  int start_index = -1;
  auto* doubling_cmd = app.add_subcommand(
      "doubling-check", "run the doubling search on a fixture file");
  doubling_cmd->add_option("fixture", fixture_path, "instance fixture path")
      ->required();
  doubling_cmd->add_option("--start", start_index,
                           "starting index (default: best admissible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (classify_cmd->parsed()) return cmd_classify(cl_p, cl_q);
    if (exponents_cmd->parsed()) return cmd_exponents(ex_dim, ex_p, ex_q);
    if (solve_cmd->parsed()) return cmd_solve(solve_flags);
    if (bern_cmd->parsed()) {
      return run_checks(prepare(bern_flags), CheckKind::Bernstein);
    }
    if (integ_cmd->parsed()) {
      ExperimentConfig cfg = prepare(integ_flags);
      return run_checks(cfg, CheckKind::Integral);
    }
    if (est_cmd->parsed()) {
      return run_checks(prepare(est_flags), CheckKind::Estimates);
    }
    if (resc_cmd->parsed()) {
      return run_checks(prepare(resc_flags), CheckKind::Rescaling);
    }
    if (sweep_cmd->parsed()) return run_checks(prepare(sweep_flags), {});
    if (doubling_cmd->parsed()) {
      return cmd_doubling_check(fixture_path, start_index);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
