#include "fourthkind/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fourthkind/error.hpp"

namespace fourthkind {

namespace {

using json = nlohmann::ordered_json;

constexpr double kTimeTolerance = 1e-9;

json to_json(const Vector& v) {
  json out = json::array();
  for (const double x : v) out.push_back(x);
  return out;
}

// nlohmann writes non-finite doubles as null; map them back.
double number(const json& j, const std::string& what) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw IoError("expected a number for '" + what + "'");
  return j.get<double>();
}

Vector vector_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw IoError("expected an array for '" + what + "'");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
  return v;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw IoError("expected an object for '" + where + "'");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw IoError("unknown key '" + it.key() + "' in " + where);
  }
}

json parse(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw IoError("malformed JSON in " + what + ": " + e.what());
  }
}

template <typename T, typename F>
T guarded(const std::string& what, F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw IoError("invalid " + what + ": " + e.what());
  }
}

json spec_json(const ModelSpec& spec) {
  json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["theta_lower"] = to_json(spec.box.lower());
  j["theta_upper"] = to_json(spec.box.upper());
  j["sigma"] = spec.sigma;
  json constants = json::object();
  for (const auto& [name, value] : spec.measurement.constants()) constants[name] = value;
  j["measurement"] = {{"id", std::string(spec.measurement.id())}, {"constants", constants}};
  if (spec.qoi.is_identity()) {
    j["qoi"] = "identity";
  } else {
    json rows = json::array();
    for (Eigen::Index r = 0; r < spec.qoi.matrix().rows(); ++r) rows.push_back(to_json(spec.qoi.matrix().row(r).transpose()));
    j["qoi"] = {{"matrix", rows}, {"offset", to_json(spec.qoi.offset())}};
  }
  j["tosses"] = spec.tosses;
  return j;
}

ModelSpec spec_from(const json& j) {
  reject_unknown(j, {"kind", "theta_lower", "theta_upper", "sigma", "measurement", "qoi", "tosses"}, "model spec");
  ModelSpec spec;
  spec.kind = parse_model_kind(j.at("kind").get<std::string>());
  spec.box = ParameterBox(vector_from(j.at("theta_lower"), "theta_lower"), vector_from(j.at("theta_upper"), "theta_upper"));
  if (j.contains("sigma")) spec.sigma = number(j["sigma"], "sigma");
  if (j.contains("measurement")) {
    const json& m = j["measurement"];
    reject_unknown(m, {"id", "constants"}, "measurement");
    std::map<std::string, double> constants;
    if (m.contains("constants")) {
      for (auto it = m["constants"].begin(); it != m["constants"].end(); ++it) {
        constants[it.key()] = number(it.value(), it.key());
      }
    }
    spec.measurement = MeasurementFunction::from_id(m.at("id").get<std::string>(), constants);
  }
  if (j.contains("qoi") && !j["qoi"].is_null() && !(j["qoi"].is_string() && j["qoi"] == "identity")) {
    const json& q = j["qoi"];
    reject_unknown(q, {"matrix", "offset"}, "qoi");
    const json& rows = q.at("matrix");
    if (!rows.is_array() || rows.empty()) throw IoError("qoi matrix must be a nonempty array of rows");
    Matrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Vector row = vector_from(rows[r], "qoi matrix");
      if (row.size() != a.cols()) throw IoError("qoi matrix rows differ in length");
      a.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    const Vector offset = q.contains("offset") ? vector_from(q["offset"], "qoi offset") : Vector::Zero(a.rows());
    spec.qoi = QuantityOfInterest(a, offset);
  }
  if (j.contains("tosses")) spec.tosses = j["tosses"].get<std::vector<std::size_t>>();
  spec.validate();
  return spec;
}

json solution_json(const GameSolution& s) {
  json j;
  j["alpha"] = s.alpha;
  j["beta"] = s.beta;
  j["decision"] = to_json(s.decision);
  j["risk"] = s.risk;
  j["raw_radius"] = s.raw_radius;
  j["enlarged_radius"] = s.enlarged_radius;
  j["risk_upper"] = s.risk_upper;
  j["variance"] = s.variance;
  json atoms = json::array();
  for (const Atom& a : s.measure.atoms) {
    atoms.push_back({{"weight", a.weight}, {"theta", to_json(a.theta)}, {"phi", to_json(a.phi)}});
  }
  j["atoms"] = atoms;
  j["gap"] = s.gap;
  j["iterations"] = s.iterations;
  j["max_working_set"] = s.max_working_set;
  j["epsilon"] = s.epsilon;
  j["delta"] = s.delta;
  j["seed"] = s.seed;
  return j;
}

json dataset_json(const Dataset& d) {
  json samples = json::array();
  for (const Vector& x : d.samples) samples.push_back(to_json(x));
  json j = {{"samples", samples}};
  if (!d.times.empty()) j["times"] = d.times;
  return j;
}

Dataset dataset_from(const json& j) {
  reject_unknown(j, {"samples", "times"}, "data");
  Dataset d;
  for (const json& row : j.at("samples")) d.samples.push_back(vector_from(row, "data sample"));
  if (j.contains("times")) d.times = j["times"].get<std::vector<double>>();
  return d;
}

json scenario_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["model"] = spec_json(s.spec);
  j["truth"] = to_json(s.truth);
  j["data"] = s.data ? dataset_json(*s.data) : json(nullptr);
  j["data_file"] = s.data_file;
  j["samples"] = s.samples;
  j["data_seed"] = s.data_seed;
  j["mode"] = std::string(to_string(s.mode));
  j["beta_star"] = s.beta_star;
  j["alpha"] = s.alpha ? json(*s.alpha) : json(nullptr);
  j["calibration"] = {{"method", std::string(to_string(s.calibration.method))},
                      {"dof", s.calibration.dof},
                      {"samples", s.calibration.samples},
                      {"trials", s.calibration.trials},
                      {"theta_grid", s.calibration.theta_grid},
                      {"mle_budget", s.calibration.mle_budget}};
  const DEConfig& de = s.game.de;
  const MeritConfig& merit = s.game.merit;
  j["game"] = {{"epsilon", s.game.epsilon},
               {"delta", s.game.delta},
               {"de",
                {{"population", de.population},
                 {"mutation", de.mutation},
                 {"crossover", de.crossover},
                 {"max_generations", de.max_generations},
                 {"restarts", de.restarts},
                 {"convergence_window", de.convergence_window},
                 {"convergence_tolerance", de.convergence_tolerance}}},
               {"merit",
                {{"initial_mu", merit.initial_mu},
                 {"growth", merit.growth},
                 {"mu_cap", merit.mu_cap},
                 {"tolerance", merit.tolerance}}}};
  j["risk_betas"] = s.risk_betas;
  return j;
}

Scenario scenario_from(const json& j) {
  reject_unknown(j,
                 {"name", "description", "model", "truth", "data", "data_file", "samples", "data_seed", "mode",
                  "beta_star", "alpha", "calibration", "game", "risk_betas"},
                 "scenario");
  Scenario s;
  s.name = j.value("name", std::string("custom"));
  s.description = j.value("description", std::string());
  s.spec = spec_from(j.at("model"));
  s.truth = j.contains("truth") ? vector_from(j["truth"], "truth") : s.spec.box.center();
  if (j.contains("data") && !j["data"].is_null()) s.data = dataset_from(j["data"]);
  s.data_file = j.value("data_file", std::string());
  s.samples = j.value("samples", s.samples);
  s.data_seed = j.value("data_seed", s.data_seed);
  if (j.contains("mode")) s.mode = parse_likelihood_mode(j["mode"].get<std::string>());
  if (j.contains("beta_star")) s.beta_star = number(j["beta_star"], "beta_star");
  if (j.contains("alpha") && !j["alpha"].is_null()) s.alpha = number(j["alpha"], "alpha");
  if (j.contains("calibration")) {
    const json& c = j["calibration"];
    reject_unknown(c, {"method", "dof", "samples", "trials", "theta_grid", "mle_budget"}, "calibration");
    if (c.contains("method")) s.calibration.method = parse_beta_method(c["method"].get<std::string>());
    s.calibration.dof = c.value("dof", s.calibration.dof);
    s.calibration.samples = c.value("samples", s.calibration.samples);
    s.calibration.trials = c.value("trials", s.calibration.trials);
    s.calibration.theta_grid = c.value("theta_grid", s.calibration.theta_grid);
    s.calibration.mle_budget = c.value("mle_budget", s.calibration.mle_budget);
  }
  if (j.contains("game")) {
    const json& g = j["game"];
    reject_unknown(g, {"epsilon", "delta", "de", "merit"}, "game");
    s.game.epsilon = g.value("epsilon", s.game.epsilon);
    s.game.delta = g.value("delta", s.game.delta);
    if (g.contains("de")) {
      const json& d = g["de"];
      reject_unknown(d,
                     {"population", "mutation", "crossover", "max_generations", "restarts", "convergence_window",
                      "convergence_tolerance"},
                     "de");
      DEConfig& de = s.game.de;
      de.population = d.value("population", de.population);
      de.mutation = d.value("mutation", de.mutation);
      de.crossover = d.value("crossover", de.crossover);
      de.max_generations = d.value("max_generations", de.max_generations);
      de.restarts = d.value("restarts", de.restarts);
      de.convergence_window = d.value("convergence_window", de.convergence_window);
      de.convergence_tolerance = d.value("convergence_tolerance", de.convergence_tolerance);
    }
    if (g.contains("merit")) {
      const json& m = g["merit"];
      reject_unknown(m, {"initial_mu", "growth", "mu_cap", "tolerance"}, "merit");
      MeritConfig& merit = s.game.merit;
      merit.initial_mu = m.value("initial_mu", merit.initial_mu);
      merit.growth = m.value("growth", merit.growth);
      merit.mu_cap = m.value("mu_cap", merit.mu_cap);
      merit.tolerance = m.value("tolerance", merit.tolerance);
    }
  }
  if (j.contains("risk_betas")) s.risk_betas = j["risk_betas"].get<std::vector<double>>();
  s.validate();
  return s;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_csv_double(std::string_view field, std::size_t line) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw IoError("line " + std::to_string(line) + ": invalid number '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string format_csv_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.*g", kCsvDigits, value);
  return buffer;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("cannot write '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) throw IoError("cannot move '" + temp.string() + "' into place: " + ec.message());
}

std::string dataset_to_csv(const Dataset& data, const ModelSpec& spec) {
  std::string out;
  const bool process = spec.kind == ModelKind::gaussian_noise && spec.measurement.is_process();
  const std::size_t columns = process ? spec.measurement.components_per_time(spec.parameter_dimension())
                                      : spec.observation_dimension();
  if (process) out += "t,";
  for (std::size_t c = 0; c < columns; ++c) out += (c ? ",x_" : "x_") + std::to_string(c + 1);
  out += '\n';
  const std::vector<double> times = process ? spec.measurement.time_grid() : std::vector<double>{};
  for (const Vector& x : data.samples) {
    if (process) {
      for (std::size_t t = 0; t < times.size(); ++t) {
        out += format_csv_number(times[t]);
        for (std::size_t c = 0; c < columns; ++c) {
          out += ',' + format_csv_number(x[static_cast<Eigen::Index>(t * columns + c)]);
        }
        out += '\n';
      }
    } else {
      for (Eigen::Index c = 0; c < x.size(); ++c) out += (c ? "," : "") + format_csv_number(x[c]);
      out += '\n';
    }
  }
  return out;
}

Dataset dataset_from_csv(std::string_view text, const ModelSpec& spec) {
  const bool process = spec.kind == ModelKind::gaussian_noise && spec.measurement.is_process();
  const std::size_t columns = process ? spec.measurement.components_per_time(spec.parameter_dimension())
                                      : spec.observation_dimension();
  std::vector<std::string> expected;
  if (process) expected.emplace_back("t");
  for (std::size_t c = 0; c < columns; ++c) expected.push_back("x_" + std::to_string(c + 1));

  std::vector<std::vector<double>> rows;
  std::size_t line_number = 0;
  bool header_seen = false;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      if (fields.size() != expected.size()) throw IoError("dataset header must be " + std::to_string(expected.size()) + " columns");
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c] != expected[c]) throw IoError("dataset header column " + std::to_string(c + 1) + " must be '" + expected[c] + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != expected.size()) throw IoError("line " + std::to_string(line_number) + ": wrong number of columns");
    std::vector<double> row;
    for (const auto field : fields) row.push_back(parse_csv_double(field, line_number));
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw IoError("dataset is empty");

  Dataset data;
  if (!process) {
    for (const auto& row : rows) data.samples.push_back(Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size())));
  } else {
    const std::vector<double> grid = spec.measurement.time_grid();
    if (rows.empty() || rows.size() % grid.size() != 0) {
      throw IoError("process dataset needs whole trajectories of " + std::to_string(grid.size()) + " rows");
    }
    for (std::size_t begin = 0; begin < rows.size(); begin += grid.size()) {
      Vector x(static_cast<Eigen::Index>(grid.size() * columns));
      for (std::size_t t = 0; t < grid.size(); ++t) {
        const auto& row = rows[begin + t];
        if (std::abs(row[0] - grid[t]) > kTimeTolerance * (1.0 + std::abs(grid[t]))) {
          throw IoError("dataset time " + format_csv_number(row[0]) + " does not match the model grid");
        }
        for (std::size_t c = 0; c < columns; ++c) x[static_cast<Eigen::Index>(t * columns + c)] = row[c + 1];
      }
      data.samples.push_back(std::move(x));
    }
    data.times = grid;
  }
  data.validate();
  return data;
}

Dataset read_dataset_csv(const std::filesystem::path& path, const ModelSpec& spec) {
  return dataset_from_csv(read_text_file(path), spec);
}

std::string model_spec_to_json(const ModelSpec& spec) { return spec_json(spec).dump(2) + "\n"; }

ModelSpec model_spec_from_json(std::string_view text) {
  const json j = parse(text, "model spec");
  return guarded<ModelSpec>("model spec", [&] { return spec_from(j); });
}

ModelSpec read_model_spec(const std::filesystem::path& path) { return model_spec_from_json(read_text_file(path)); }

std::string solution_to_json(const GameSolution& solution) { return solution_json(solution).dump(2) + "\n"; }

std::string trace_to_csv(const GameSolution& solution) {
  std::string out = "iteration,working_set,support,radius,distance";
  const Eigen::Index n = solution.decision.size();
  for (Eigen::Index c = 0; c < n; ++c) out += ",center_" + std::to_string(c + 1);
  out += '\n';
  for (const TraceEntry& e : solution.trace) {
    out += std::to_string(e.iteration) + ',' + std::to_string(e.working_set) + ',' + std::to_string(e.support) + ',' +
           format_csv_number(e.radius) + ',' + format_csv_number(e.distance);
    for (Eigen::Index c = 0; c < e.center.size(); ++c) out += ',' + format_csv_number(e.center[c]);
    out += '\n';
  }
  return out;
}

std::string beta_curve_to_csv(const BetaCurve& curve) {
  std::string out = "alpha,beta,stderr,method\n";
  const std::string method(to_string(curve.method));
  for (const BetaPoint& p : curve.points) {
    out += format_csv_number(p.alpha) + ',' + format_csv_number(p.beta) + ',' + format_csv_number(p.standard_error) +
           ',' + method + '\n';
  }
  return out;
}

std::string risk_curve_to_csv(const std::vector<RiskRow>& rows) {
  Eigen::Index n = 0;
  for (const RiskRow& r : rows) {
    if (r.solution) n = std::max(n, r.solution->decision.size());
  }
  std::string out = "beta,alpha,risk,raw_radius,gap,iterations,atoms";
  for (Eigen::Index c = 0; c < n; ++c) out += ",decision_" + std::to_string(c + 1);
  out += ",error\n";
  const std::string nan = format_csv_number(std::numeric_limits<double>::quiet_NaN());
  for (const RiskRow& r : rows) {
    out += format_csv_number(r.beta) + ',' + (r.error.empty() || r.alpha > 0.0 ? format_csv_number(r.alpha) : nan);
    if (r.solution) {
      const GameSolution& s = *r.solution;
      out += ',' + format_csv_number(s.risk) + ',' + format_csv_number(s.raw_radius) + ',' + format_csv_number(s.gap) +
             ',' + std::to_string(s.iterations) + ',' + std::to_string(s.measure.size());
      for (Eigen::Index c = 0; c < n; ++c) out += ',' + format_csv_number(s.decision[c]);
    } else {
      out += ',' + nan + ',' + nan + ',' + nan + ",0,0";
      for (Eigen::Index c = 0; c < n; ++c) out += ',' + nan;
    }
    out += ',' + r.error + '\n';
  }
  return out;
}

std::string region_samples_to_csv(const std::vector<RegionSample>& samples) {
  const Eigen::Index k = samples.empty() ? 0 : samples.front().theta.size();
  std::string out;
  for (Eigen::Index c = 0; c < k; ++c) out += "theta_" + std::to_string(c + 1) + ',';
  out += "log_relative,inside\n";
  for (const RegionSample& s : samples) {
    for (Eigen::Index c = 0; c < k; ++c) out += format_csv_number(s.theta[c]) + ',';
    out += format_csv_number(s.log_relative) + (s.inside ? ",1\n" : ",0\n");
  }
  return out;
}

std::string scenario_to_json(const Scenario& scenario) { return scenario_json(scenario).dump(2) + "\n"; }

Scenario scenario_from_json(std::string_view text) {
  const json j = parse(text, "scenario");
  return guarded<Scenario>("scenario", [&] { return scenario_from(j); });
}

Scenario read_scenario(const std::filesystem::path& path) { return scenario_from_json(read_text_file(path)); }

void write_report(const std::filesystem::path& dir, const ScenarioReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text_file(dir / "scenario.json", scenario_to_json(report.scenario));
  write_text_file(dir / "data.csv", dataset_to_csv(report.data, report.scenario.spec));
  json mle = {{"theta", to_json(report.mle.theta)},
              {"log_likelihood", report.mle.log_likelihood},
              {"residual_sum", report.mle.residual_sum},
              {"evaluations", report.mle.evaluations},
              {"warning", report.mle.warning}};
  write_text_file(dir / "mle.json", mle.dump(2) + "\n");
  if (!report.beta_curve.points.empty()) write_text_file(dir / "beta_curve.csv", beta_curve_to_csv(report.beta_curve));
  write_text_file(dir / "solution.json", solution_to_json(report.solution));
  write_text_file(dir / "trace.csv", trace_to_csv(report.solution));
  if (!report.risk_curve.empty()) write_text_file(dir / "risk_curve.csv", risk_curve_to_csv(report.risk_curve));
  if (!report.region.empty()) write_text_file(dir / "region.csv", region_samples_to_csv(report.region));
}

}  // namespace fourthkind
