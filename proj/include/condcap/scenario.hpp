#pragma once

#include <condcap/condenser.hpp>
#include <condcap/kernels.hpp>
#include <condcap/solver.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace condcap {

inline constexpr const char* kScenarioSchema = "condenser-cap/1";

struct OutputPaths {
  // Relative paths resolve against the --out directory; empty disables the file.
  std::string report = "report.json";
  std::string weights_csv;
  std::string residuals_csv;
  std::string trace_csv;
  std::string measure_json;
  std::string exhaustion_csv = "exhaustion.csv";
  std::string family_csv = "family.csv";
};

struct VerificationSettings {
  double kkt_tolerance = 1e-6;
  std::size_t primal_tests = 10;
  std::uint64_t primal_seed = 0;
  bool require_signed_assumptions = true;
};

struct FamilySettings {
  double radius = 1.0;
  double spacing = 4.0;
  std::vector<double> axis{1.0, 0.0, 0.0};
  std::size_t points_per_shell = 100;
  // a_k = mass_scale * k^mass_exponent (exponent 0 for a constant rule)
  double mass_scale = 1.0;
  double mass_exponent = 0.0;
  bool alternating_signs = false;
  std::vector<std::size_t> n_list;

  PlateGenerator generator() const;
};

struct Scenario {
  std::string name;
  KernelSpec kernel;
  bool auto_epsilon = true;  // epsilon "auto" or missing: default_epsilon of the discretization
  std::vector<PlateSpec> plates;
  WeightFunction weight;
  SolveOptions solver;
  OutputPaths outputs;
  VerificationSettings verification;
  std::optional<ExhaustionLevels> levels;
  std::optional<FamilySettings> family;
  std::uint64_t seed = 0;
};

/// Parses a scenario document. Errors are InputErrors of the form
/// "<origin>:<line>: <json pointer>: <message>".
Scenario parse_scenario(const std::string& text, const std::string& origin = "<scenario>");
Scenario load_scenario(const std::string& path);

}  // namespace condcap
