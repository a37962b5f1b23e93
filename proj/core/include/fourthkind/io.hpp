#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fourthkind/cases.hpp"

namespace fourthkind {

/// Shortest round-trip text for doubles in JSON; this many significant
/// digits in CSV.
inline constexpr int kCsvDigits = 12;

std::string format_csv_number(double value);

/// Reads a whole file; throws IoError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename so readers never see partial output.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Header `t,x_1..x_r` for process models, `x_1..x_r` otherwise; coin data
/// uses columns (coin index, outcome).
std::string dataset_to_csv(const Dataset& data, const ModelSpec& spec);
Dataset dataset_from_csv(std::string_view text, const ModelSpec& spec);
Dataset read_dataset_csv(const std::filesystem::path& path, const ModelSpec& spec);

/// {kind, theta_lower, theta_upper, sigma, measurement: {id, constants}, qoi, tosses}.
std::string model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(std::string_view text);
ModelSpec read_model_spec(const std::filesystem::path& path);

std::string solution_to_json(const GameSolution& solution);
/// Iteration trace as CSV: iteration, working_set, support, radius, distance, center_1..
std::string trace_to_csv(const GameSolution& solution);

/// Columns alpha,beta,stderr,method.
std::string beta_curve_to_csv(const BetaCurve& curve);
/// Columns beta,alpha,risk,raw_radius,gap,iterations,atoms,decision_1..,error.
std::string risk_curve_to_csv(const std::vector<RiskRow>& rows);
/// Columns theta_1..,log_relative,inside.
std::string region_samples_to_csv(const std::vector<RegionSample>& samples);

std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(std::string_view text);
Scenario read_scenario(const std::filesystem::path& path);

/// Writes scenario.json, data.csv, mle.json, beta_curve.csv, solution.json,
/// trace.csv, risk_curve.csv and region.csv (those present) into `dir`.
void write_report(const std::filesystem::path& dir, const ScenarioReport& report);

}  // namespace fourthkind
