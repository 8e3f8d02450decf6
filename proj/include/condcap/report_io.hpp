#pragma once

#include <condcap/capacity.hpp>
#include <condcap/condenser.hpp>
#include <condcap/kernels.hpp>
#include <condcap/measures.hpp>
#include <condcap/solver.hpp>

#include <string>

namespace condcap {

struct RunInfo {
  std::string command;        // "solve", "exhaust", "family"
  std::string scenario_name;
  std::string epsilon_source;  // "auto" or "scenario"
  bool deterministic = false;  // omits the timestamp
  int threads = 1;
};

// All floating-point values carry 17 significant digits.
std::string capacity_report_json(const DiscreteCondenser& c, const KernelSpec& spec, const ValidationReport& validation,
                                 const SolveResult& result, const CapacityReport& report, const RunInfo& info);

std::string exhaustion_summary_json(const ExhaustionStudy& study, const KernelSpec& spec, const RunInfo& info);
std::string family_summary_json(const FamilyStudy& study, const KernelSpec& spec, const RunInfo& info);

// plate,index,coordinates...,g,weight
std::string weights_csv(const DiscreteCondenser& c, const CondenserMeasure& m);
// plate,index,residual,scaled_residual,on_support
std::string residuals_csv(const DiscreteCondenser& c, const CapacityReport& report);
std::string trace_csv(const SolveResult& result);
std::string exhaustion_csv(const ExhaustionStudy& study);
std::string family_csv(const FamilyStudy& study);

/// Weights as arrays-of-arrays plus the condenser fingerprint.
std::string measure_json(const DiscreteCondenser& c, const CondenserMeasure& m);
/// Throws InputError if the fingerprint or shape does not match `c`.
CondenserMeasure parse_measure_json(const std::string& text, const DiscreteCondenser& c);

// Creates parent directories; throws InputError if the file cannot be written.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace condcap
