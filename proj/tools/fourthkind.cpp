// Command-line front end: solve games, sweep curves, validate Monte Carlo
// significance and manage scenario files.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fourthkind/cases.hpp"
#include "fourthkind/io.hpp"
#include "fourthkind/miniball.hpp"

#ifndef FOURTHKIND_VERSION_STRING
#define FOURTHKIND_VERSION_STRING "unknown"
#endif

namespace fk = fourthkind;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCalibration = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNonconverged = 4;
constexpr int kExitIo = 5;
constexpr int kExitValidation = 6;

int exit_code(fk::ErrorCategory category) {
  switch (category) {
    case fk::ErrorCategory::calibration: return kExitCalibration;
    case fk::ErrorCategory::infeasible: return kExitInfeasible;
    case fk::ErrorCategory::nonconverged: return kExitNonconverged;
    case fk::ErrorCategory::io: return kExitIo;
    default: return kExitError;
  }
}

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& common, bool with_format) {
  cmd->add_option("--seed", common.seed, "Master random seed")->capture_default_str();
  cmd->add_option("--out", common.out, "Output directory (files are written only when given)");
  if (with_format) {
    cmd->add_option("--format", common.format, "Standard output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
  }
}

/// Flags that override parts of a scenario.
struct Overrides {
  std::optional<double> alpha;
  std::optional<double> beta_star;
  std::string method;
  std::string mode;
  std::optional<int> dof;
  std::optional<int> n;
  std::optional<std::size_t> trials;
  std::string theta_grid;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::string data_file;
  std::optional<std::uint64_t> data_seed;
};

void add_overrides(CLI::App* cmd, Overrides& o, bool with_levels) {
  if (with_levels) {
    auto* alpha = cmd->add_option("--alpha", o.alpha, "Rarity level alpha (skips calibration)");
    auto* beta = cmd->add_option("--beta-star", o.beta_star, "Target significance beta*");
    alpha->excludes(beta);
  }
  cmd->add_option("--method", o.method, "Calibration: asymptotic | gaussian-surrogate | monte-carlo");
  cmd->add_option("--mode", o.mode, "Likelihood region: exact | surrogate");
  cmd->add_option("--dof", o.dof, "Degrees of freedom (k for asymptotic, r for gaussian-surrogate)");
  cmd->add_option("--n", o.n, "Sample count N for the gaussian-surrogate formula");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials per theta");
  cmd->add_option("--theta-grid", o.theta_grid, "Monte Carlo theta grid: lhs:COUNT or local:PER_AXIS:HALF_WIDTH");
  cmd->add_option("--epsilon", o.epsilon, "Miniball stopping tolerance");
  cmd->add_option("--delta", o.delta, "Declared farthest-point oracle quality");
  cmd->add_option("--data", o.data_file, "Dataset CSV replacing the scenario data");
  cmd->add_option("--data-seed", o.data_seed, "Seed for generated data");
}

void apply(const Overrides& o, fk::Scenario& s) {
  if (o.alpha) s.alpha = *o.alpha;
  if (o.beta_star) {
    s.beta_star = *o.beta_star;
    s.alpha.reset();
  }
  if (!o.method.empty()) s.calibration.method = fk::parse_beta_method(o.method);
  if (!o.mode.empty()) s.mode = fk::parse_likelihood_mode(o.mode);
  if (o.dof) s.calibration.dof = *o.dof;
  if (o.n) s.calibration.samples = *o.n;
  if (o.trials) s.calibration.trials = *o.trials;
  if (!o.theta_grid.empty()) s.calibration.theta_grid = o.theta_grid;
  if (o.epsilon) s.game.epsilon = *o.epsilon;
  if (o.delta) s.game.delta = *o.delta;
  if (!o.data_file.empty()) {
    s.data.reset();
    s.data_file = o.data_file;
  }
  if (o.data_seed) {
    s.data.reset();
    s.data_file.clear();
    s.data_seed = *o.data_seed;
  }
  s.validate();
}

bool is_builtin(const std::string& name) {
  for (const std::string& b : fk::builtin_scenario_names()) {
    if (b == name) return true;
  }
  return false;
}

fk::Scenario load_scenario(const std::string& name_or_path) {
  if (is_builtin(name_or_path)) return fk::builtin_scenario(name_or_path);
  // A bare word that is neither a built-in nor a file is a misspelt name.
  if (name_or_path.find_first_of("/.") == std::string::npos && !std::filesystem::exists(name_or_path)) {
    std::string names;
    for (const std::string& n : fk::builtin_scenario_names()) names += (names.empty() ? "" : ", ") + n;
    throw fk::DomainError("unknown scenario '" + name_or_path + "' (built-in: " + names + ")");
  }
  return fk::read_scenario(name_or_path);
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || field.find_first_not_of(" \t", used) != std::string::npos) {
      throw fk::DomainError("invalid number '" + field + "' in " + what);
    }
    values.push_back(v);
  }
  if (values.empty()) throw fk::DomainError(what + " is empty");
  return values;
}

class Output {
 public:
  Output(const Common& common, std::string command, std::vector<std::string> args)
      : dir_(common.out), command_(std::move(command)), args_(std::move(args)), seed_(common.seed) {
    if (!dir_.empty()) {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw fk::IoError("cannot create '" + dir_.string() + "': " + ec.message());
    }
  }

  bool enabled() const { return !dir_.empty(); }
  const fs::path& dir() const { return dir_; }

  void file(const std::string& name, std::string_view text) const {
    if (enabled()) fk::write_text_file(dir_ / name, text);
  }

  /// run.json: everything needed to replay the invocation.
  void record(const json& config) const {
    if (!enabled()) return;
    json run;
    run["tool"] = "fourthkind";
    run["version"] = FOURTHKIND_VERSION_STRING;
    run["command"] = command_;
    run["arguments"] = args_;
    run["seed"] = seed_;
    run["config"] = config;
    fk::write_text_file(dir_ / "run.json", run.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::string command_;
  std::vector<std::string> args_;
  std::uint64_t seed_;
};

json scenario_config(const fk::Scenario& s) { return json::parse(fk::scenario_to_json(s)); }

std::string solution_csv(const fk::GameSolution& s) {
  std::string out = "alpha,beta,risk,raw_radius,enlarged_radius,risk_upper,gap,iterations,atoms";
  for (Eigen::Index c = 0; c < s.decision.size(); ++c) out += ",decision_" + std::to_string(c + 1);
  out += '\n';
  out += fk::format_csv_number(s.alpha) + ',' + fk::format_csv_number(s.beta) + ',' + fk::format_csv_number(s.risk) +
         ',' + fk::format_csv_number(s.raw_radius) + ',' + fk::format_csv_number(s.enlarged_radius) + ',' +
         fk::format_csv_number(s.risk_upper) + ',' + fk::format_csv_number(s.gap) + ',' +
         std::to_string(s.iterations) + ',' + std::to_string(s.measure.size());
  for (Eigen::Index c = 0; c < s.decision.size(); ++c) out += ',' + fk::format_csv_number(s.decision[c]);
  return out + '\n';
}

std::string format_vector(const fk::Vector& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fk::format_csv_number(v[i]);
  return out + ")";
}

void summarize(const fk::GameSolution& s) {
  std::cerr << "alpha " << fk::format_csv_number(s.alpha) << ", beta " << fk::format_csv_number(s.beta) << "\n"
            << "decision " << format_vector(s.decision) << "\n"
            << "risk " << fk::format_csv_number(s.risk) << " (radius " << fk::format_csv_number(s.raw_radius)
            << ", certified upper " << fk::format_csv_number(s.risk_upper) << ", gap "
            << fk::format_csv_number(s.gap) << ")\n"
            << "worst-case measure: " << s.measure.size() << " atoms after " << s.iterations << " iterations\n";
  for (const fk::Atom& a : s.measure.atoms) {
    std::cerr << "  w " << fk::format_csv_number(a.weight) << " at theta " << format_vector(a.theta) << "\n";
  }
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  Common common;
  Overrides overrides;
  std::string scenario;
  std::string model;
  std::vector<double> generate;
  std::size_t samples = 1;
};

int run_solve(const SolveArgs& a, const std::vector<std::string>& argv) {
  fk::Scenario s;
  if (!a.scenario.empty()) {
    s = load_scenario(a.scenario);
  } else {
    s.name = "custom";
    s.spec = fk::read_model_spec(a.model);
    s.samples = a.samples;
    if (!a.generate.empty()) {
      s.truth = Eigen::Map<const fk::Vector>(a.generate.data(), static_cast<Eigen::Index>(a.generate.size()));
    } else {
      s.truth = s.spec.box.center();
      if (a.overrides.data_file.empty()) throw fk::DomainError("solve --model needs --data or --generate");
    }
  }
  apply(a.overrides, s);
  const Output out(a.common, "solve", argv);
  out.record(scenario_config(s));

  fk::RandomStream stream(a.common.seed);
  const auto observed = fk::observe(s, stream);
  fk::RandomStream solve = stream.split("solve");
  const fk::GameSolution solution = fk::solve_scenario(s, observed, solve);

  const std::string solution_json = fk::solution_to_json(solution);
  out.file("scenario.json", fk::scenario_to_json(s));
  out.file("solution.json", solution_json);
  out.file("trace.csv", fk::trace_to_csv(solution));
  std::cout << (a.common.format == "csv" ? solution_csv(solution) : solution_json);
  summarize(solution);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BetaCurveArgs {
  Common common;
  Overrides overrides;
  std::string scenario;
  std::string alphas;
};

int run_beta_curve(const BetaCurveArgs& a, const std::vector<std::string>& argv) {
  const std::vector<double> alphas = a.alphas.empty() ? fk::default_alpha_grid() : parse_list(a.alphas, "--alphas");
  if (a.overrides.method.empty()) throw fk::DomainError("beta-curve needs --method");
  const fk::BetaMethod method = fk::parse_beta_method(a.overrides.method);
  const Output out(a.common, "beta-curve", argv);
  fk::BetaCurve curve;
  json config;
  config["method"] = std::string(fk::to_string(method));
  config["alphas"] = alphas;
  if (method == fk::BetaMethod::monte_carlo || !a.scenario.empty()) {
    if (a.scenario.empty()) throw fk::DomainError("monte-carlo beta curves need --scenario");
    fk::Scenario s = load_scenario(a.scenario);
    apply(a.overrides, s);
    config["scenario"] = scenario_config(s);
    out.record(config);
    fk::RandomStream stream(a.common.seed);
    const auto observed = fk::observe(s, stream);
    fk::RandomStream sub = stream.split("beta-curve");
    curve = fk::scenario_beta_curve(s, *observed, alphas, sub);
  } else {
    const int dof = a.overrides.dof.value_or(0);
    if (dof < 1) throw fk::DomainError("closed-form beta curves need --dof (or --scenario)");
    config["dof"] = dof;
    if (method == fk::BetaMethod::asymptotic) {
      out.record(config);
      curve = fk::beta_curve_asymptotic(dof, alphas);
    } else {
      const int n = a.overrides.n.value_or(1);
      config["n"] = n;
      out.record(config);
      curve = fk::beta_curve_gaussian_surrogate(dof, n, alphas);
    }
  }
  const std::string csv = fk::beta_curve_to_csv(curve);
  out.file("beta_curve.csv", csv);
  std::cout << csv;
  if (curve.warning) std::cerr << "warning: fewer than " << fk::kMinimumTrials << " trials per theta\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RiskCurveArgs {
  Common common;
  Overrides overrides;
  std::string scenario;
  std::string betas;
};

int run_risk_curve(const RiskCurveArgs& a, const std::vector<std::string>& argv) {
  fk::Scenario s = load_scenario(a.scenario);
  if (!a.betas.empty()) s.risk_betas = parse_list(a.betas, "--betas");
  apply(a.overrides, s);
  const Output out(a.common, "risk-curve", argv);
  out.record(scenario_config(s));
  fk::RandomStream stream(a.common.seed);
  const auto observed = fk::observe(s, stream);
  fk::RandomStream sub = stream.split("risk");
  std::vector<double> betas = s.risk_betas;
  if (betas.empty()) {
    fk::RandomStream grid = sub.split("grid");
    betas = fk::default_risk_betas(s, *observed, grid);
  }
  const std::vector<fk::RiskRow> rows = fk::risk_sweep(s, observed, betas, sub);
  const std::string csv = fk::risk_curve_to_csv(rows);
  out.file("risk_curve.csv", csv);
  std::cout << csv;
  for (const fk::RiskRow& r : rows) {
    if (!r.error.empty()) std::cerr << "beta " << fk::format_csv_number(r.beta) << ": " << r.error << ": " << r.message << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct McValidateArgs {
  Common common;
  Overrides overrides;
  std::string scenario;
  std::string alphas = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::string reference;
  bool no_mc = false;
};

int run_mc_validate(const McValidateArgs& a, const std::vector<std::string>& argv) {
  fk::Scenario s = load_scenario(a.scenario);
  apply(a.overrides, s);
  const std::vector<double> alphas = parse_list(a.alphas, "--alphas");
  std::string reference = a.reference;
  if (reference.empty()) {
    reference = s.calibration.method == fk::BetaMethod::gaussian_surrogate ? "gaussian-surrogate" : "asymptotic";
  }
  if (reference != "asymptotic" && reference != "gaussian-surrogate" && reference != "enumeration") {
    throw fk::DomainError("unknown reference '" + reference + "'");
  }
  const Output out(a.common, "mc-validate", argv);
  json config;
  config["scenario"] = scenario_config(s);
  config["alphas"] = alphas;
  config["reference"] = reference;
  config["monte_carlo"] = !a.no_mc;
  out.record(config);

  fk::RandomStream stream(a.common.seed);
  const auto observed = fk::observe(s, stream);
  fk::RandomStream grid_stream = stream.split("theta-grid");
  const std::vector<fk::Vector> grid =
      fk::theta_grid_from_spec(s.calibration.theta_grid, s.spec.box, observed->require_mle().theta, grid_stream);

  fk::Scenario closed = s;
  std::vector<double> ref(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (reference == "enumeration") {
      ref[i] = fk::beta_coin_enumeration(s.spec, alphas[i], grid).beta;
    } else {
      closed.calibration.method = fk::parse_beta_method(reference);
      fk::RandomStream unused(0);
      ref[i] = fk::scenario_beta(closed, *observed, alphas[i], unused);
    }
  }

  std::vector<fk::BetaPoint> measured;
  if (a.no_mc) {
    for (std::size_t i = 0; i < alphas.size(); ++i) measured.push_back({alphas[i], ref[i], 0.0});
  } else {
    fk::MonteCarloConfig mc;
    mc.theta_grid = grid;
    mc.trials = s.calibration.trials;
    mc.samples = s.spec.kind == fk::ModelKind::bernoulli_coins ? 1 : observed->data().sample_count();
    mc.mode = s.mode;
    mc.mle_budget = s.calibration.mle_budget;
    fk::RandomStream sim = stream.split("simulation");
    measured = fk::beta_curve_monte_carlo(s.spec, alphas, mc, sim).points;
  }

  std::string csv = "alpha,beta_mc,stderr,beta_reference,z,within_3se\n";
  bool ok = true;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const fk::BetaPoint& p = measured[i];
    // Standard error under the reference value, so that an estimate of 0 or
    // 1 is not judged against a zero-width band.
    double se = p.standard_error;
    if (!a.no_mc) {
      se = std::max(se, std::sqrt(ref[i] * (1.0 - ref[i]) / static_cast<double>(s.calibration.trials)));
    }
    const double diff = p.beta - ref[i];
    const bool within = std::abs(diff) <= 3.0 * se || diff == 0.0;
    ok = ok && within;
    csv += fk::format_csv_number(p.alpha) + ',' + fk::format_csv_number(p.beta) + ',' + fk::format_csv_number(se) +
           ',' + fk::format_csv_number(ref[i]) + ',' + fk::format_csv_number(se > 0.0 ? diff / se : 0.0) + ',' +
           (within ? "1" : "0") + '\n';
  }
  out.file("mc_validate.csv", csv);
  std::cout << csv;
  if (!ok) {
    std::cerr << "validation failed: Monte Carlo estimate outside the 3-SE band at some alpha\n";
    return kExitValidation;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ScenarioArgs {
  Common common;
  Overrides overrides;
  std::string name;
  std::string file;
  bool no_beta_curve = false;
  bool no_risk_curve = false;
  bool no_region = false;
};

int run_scenario_list() {
  for (const std::string& name : fk::builtin_scenario_names()) {
    std::cout << name << "\t" << fk::builtin_scenario(name).description << "\n";
  }
  return kExitOk;
}

int run_scenario_show(const ScenarioArgs& a) {
  std::cout << fk::scenario_to_json(load_scenario(a.name));
  return kExitOk;
}

int run_scenario_write(const ScenarioArgs& a) {
  fk::write_text_file(a.file, fk::scenario_to_json(load_scenario(a.name)));
  return kExitOk;
}

int run_scenario_run(const ScenarioArgs& a, const std::vector<std::string>& argv) {
  fk::Scenario s = load_scenario(a.name);
  apply(a.overrides, s);
  const Output out(a.common, "scenario run", argv);
  out.record(scenario_config(s));
  fk::RunOptions options;
  options.beta_curve = !a.no_beta_curve;
  options.risk_curve = !a.no_risk_curve;
  options.region = !a.no_region;
  fk::RandomStream stream(a.common.seed);
  const fk::ScenarioReport report = fk::run_scenario(s, stream, options);
  if (out.enabled()) fk::write_report(out.dir(), report);
  std::cout << (a.common.format == "csv" ? solution_csv(report.solution) : fk::solution_to_json(report.solution));
  summarize(report.solution);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct MiniballArgs {
  Common common;
  std::string points;
};

int run_miniball(const MiniballArgs& a, const std::vector<std::string>& argv) {
  const std::string text = a.points == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                           : fk::read_text_file(a.points);
  std::vector<fk::Vector> points;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (header) {
      header = false;
      // A first line that is not numeric is a header.
      if (line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos) continue;
    }
    std::vector<double> values;
    try {
      values = parse_list(line, "line " + std::to_string(line_number));
    } catch (const fk::DomainError& e) {
      throw fk::IoError(e.what());
    }
    points.emplace_back(Eigen::Map<const fk::Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  const Output out(a.common, "miniball", argv);
  out.record(json{{"points", a.points}});
  const fk::MiniballResult result = fk::miniball_exact(points);
  json j;
  j["center"] = std::vector<double>(result.ball.center.data(), result.ball.center.data() + result.ball.center.size());
  j["radius"] = result.ball.radius;
  j["support"] = result.support.indices;
  const std::string text_out = j.dump(2) + "\n";
  out.file("miniball.json", text_out);
  std::cout << text_out;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  CLI::App app{"Minimax estimation over likelihood regions: optimal decision, risk and worst-case posterior"};
  app.set_version_flag("--version", FOURTHKIND_VERSION_STRING);
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Calibrate alpha and solve the game");
  add_common(solve_cmd, solve.common, true);
  add_overrides(solve_cmd, solve.overrides, true);
  auto* scenario_opt = solve_cmd->add_option("--scenario", solve.scenario, "Built-in scenario name or scenario JSON");
  auto* model_opt = solve_cmd->add_option("--model", solve.model, "Model spec JSON");
  scenario_opt->excludes(model_opt);
  solve_cmd->add_option("--generate", solve.generate, "Generate data at this parameter")->expected(1, -1)->needs(model_opt);
  solve_cmd->add_option("--samples", solve.samples, "Samples N to generate")->capture_default_str();

  BetaCurveArgs beta;
  auto* beta_cmd = app.add_subcommand("beta-curve", "Significance as a function of alpha");
  add_common(beta_cmd, beta.common, false);
  add_overrides(beta_cmd, beta.overrides, false);
  beta_cmd->add_option("--k", beta.overrides.dof, "Alias of --dof for the asymptotic method");
  beta_cmd->add_option("--r", beta.overrides.dof, "Alias of --dof for the gaussian-surrogate method");
  beta_cmd->add_option("--scenario", beta.scenario, "Scenario supplying the model (required for monte-carlo)");
  beta_cmd->add_option("--alphas,--grid", beta.alphas, "Comma-separated alpha values (default: 64 log-spaced in [1e-6, 1])");

  RiskCurveArgs risk;
  auto* risk_cmd = app.add_subcommand("risk-curve", "Risk and decision across significance levels");
  add_common(risk_cmd, risk.common, false);
  add_overrides(risk_cmd, risk.overrides, false);
  risk_cmd->add_option("--scenario", risk.scenario, "Built-in scenario name or scenario JSON")->required();
  risk_cmd->add_option("--betas", risk.betas, "Comma-separated beta values (default: 8 log-spaced)");

  McValidateArgs mc;
  auto* mc_cmd = app.add_subcommand("mc-validate", "Compare Monte Carlo significance with a reference curve");
  add_common(mc_cmd, mc.common, false);
  add_overrides(mc_cmd, mc.overrides, false);
  mc_cmd->add_option("--scenario", mc.scenario, "Built-in scenario name or scenario JSON")->required();
  mc_cmd->add_option("--alphas", mc.alphas, "Comma-separated alpha values")->capture_default_str();
  mc_cmd->add_option("--reference", mc.reference, "asymptotic | gaussian-surrogate | enumeration (coins)");
  mc_cmd->add_flag("--no-mc", mc.no_mc, "Skip simulation and compare the reference with itself");

  ScenarioArgs sc;
  auto* sc_cmd = app.add_subcommand("scenario", "List, export and run scenarios");
  sc_cmd->require_subcommand(1);
  auto* sc_list = sc_cmd->add_subcommand("list", "List built-in scenarios");
  auto* sc_show = sc_cmd->add_subcommand("show", "Print a scenario as JSON");
  sc_show->add_option("name", sc.name, "Scenario name or file")->required();
  auto* sc_write = sc_cmd->add_subcommand("write", "Write a scenario JSON file");
  sc_write->add_option("name", sc.name, "Scenario name or file")->required();
  sc_write->add_option("file", sc.file, "Destination")->required();
  auto* sc_run = sc_cmd->add_subcommand("run", "Run a scenario end to end and write its report");
  sc_run->add_option("name", sc.name, "Scenario name or file")->required();
  add_common(sc_run, sc.common, true);
  add_overrides(sc_run, sc.overrides, true);
  sc_run->add_flag("--no-beta-curve", sc.no_beta_curve, "Skip the significance curve");
  sc_run->add_flag("--no-risk-curve", sc.no_risk_curve, "Skip the risk sweep");
  sc_run->add_flag("--no-region", sc.no_region, "Skip the region samples");

  MiniballArgs mb;
  auto* mb_cmd = app.add_subcommand("miniball", "Minimum enclosing ball of points from a CSV file ('-' for stdin)");
  add_common(mb_cmd, mb.common, false);
  mb_cmd->add_option("--points", mb.points, "Points CSV, one point per row")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (solve_cmd->parsed()) {
      if (solve.scenario.empty() && solve.model.empty()) throw fk::DomainError("solve needs --scenario or --model");
      return run_solve(solve, args);
    }
    if (beta_cmd->parsed()) return run_beta_curve(beta, args);
    if (risk_cmd->parsed()) return run_risk_curve(risk, args);
    if (mc_cmd->parsed()) return run_mc_validate(mc, args);
    if (sc_list->parsed()) return run_scenario_list();
    if (sc_show->parsed()) return run_scenario_show(sc);
    if (sc_write->parsed()) return run_scenario_write(sc);
    if (sc_run->parsed()) return run_scenario_run(sc, args);
    if (mb_cmd->parsed()) return run_miniball(mb, args);
  } catch (const fk::Error& e) {
    std::cerr << "error: " << fk::to_string(e.category()) << ": " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
