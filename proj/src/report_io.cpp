#include <condcap/report_io.hpp>

#include <condcap/errors.hpp>

#include "json_out.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace condcap {
namespace {

using ojson = nlohmann::ordered_json;
using detail::format_double;

ojson kernel_json(const KernelSpec& spec, const RunInfo& info) {
  ojson k;
  k["family"] = spec.family == KernelFamily::Riesz ? "riesz" : "log_unit_disk";
  if (spec.family == KernelFamily::Riesz) {
    k["alpha"] = spec.alpha;
    k["dim"] = spec.dim;
  }
  k["epsilon"] = spec.smoothing_epsilon;
  k["epsilon_source"] = info.epsilon_source;
  return k;
}

ojson header(const RunInfo& info) {
  ojson h;
  h["schema"] = "condenser-cap/1";
  h["command"] = info.command;
  if (!info.scenario_name.empty()) h["scenario"] = info.scenario_name;
  if (!info.deterministic) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    h["timestamp"] = buf;
    h["threads"] = info.threads;
  }
  return h;
}

ojson vec(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

std::string capacity_report_json(const DiscreteCondenser& c, const KernelSpec& spec, const ValidationReport& validation,
                                 const SolveResult& result, const CapacityReport& report, const RunInfo& info) {
  ojson j = header(info);
  j["fingerprint"] = fingerprint_hex(c);
  j["kernel"] = kernel_json(spec, info);

  ojson geo;
  geo["dim"] = c.dim;
  geo["total_points"] = c.total_points();
  geo["separation"] = c.separation;
  if (c.analytic_separation) geo["closure_separation"] = *c.analytic_separation;
  if (c.kernel_sup_bound) geo["kernel_sup_bound"] = *c.kernel_sup_bound;
  geo["equal_sign_gap"] = c.equal_sign_gap;
  geo["shared_points"] = c.shared_points;
  geo["total_mass"] = c.total_mass();
  geo["g_inf"] = c.g_inf();
  ojson plates = ojson::array();
  for (const auto& p : c.plates) {
    ojson e;
    e["id"] = p.id;
    e["sign"] = p.sign;
    e["a"] = p.mass;
    e["points"] = p.points.size();
    e["min_spacing"] = p.min_spacing;
    plates.push_back(e);
  }
  geo["plates"] = plates;
  j["condenser"] = geo;

  ojson checks = ojson::array();
  for (const auto& ch : validation.checks) {
    ojson e;
    e["name"] = ch.name;
    e["applicable"] = ch.applicable;
    e["passed"] = ch.passed;
    e["detail"] = ch.detail;
    checks.push_back(e);
  }
  j["validation"] = {{"ok", validation.ok()}, {"checks", checks}};

  ojson solver;
  solver["converged"] = result.converged;
  solver["relative_gap"] = result.relative_gap;
  solver["iterations"] = result.iterations_used;
  solver["lipschitz"] = result.lipschitz;
  solver["minimal_energy"] = result.minimal_energy;
  j["solver"] = solver;

  j["cap"] = report.cap;
  j["provisional"] = report.provisional;
  j["constants"] = vec(report.constants);
  j["sum_constants"] = report.sum_constants;
  j["eta"] = vec(report.eta);
  j["gamma_energy"] = report.gamma_energy;

  ojson fr;
  fr["interpretation"] = "nearly-everywhere conditions are evaluated at every sample point";
  fr["potential_scale"] = report.frostman.potential_scale;
  fr["support_asserted"] = report.frostman.support_asserted;
  fr["passed"] = report.frostman.passed;
  ojson fplates = ojson::array();
  for (std::size_t i = 0; i < report.frostman.plates.size(); ++i) {
    const auto& fp = report.frostman.plates[i];
    const double a = c.plates[i].mass, s = report.frostman.potential_scale;
    ojson e;
    e["id"] = c.plates[i].id;
    e["constant"] = report.constants[i];
    e["min_residual"] = fp.min_residual;
    e["max_support_residual"] = fp.max_support_residual;
    e["scaled_min_residual"] = fp.scaled_min_residual(a, s);
    e["scaled_max_support_residual"] = fp.scaled_max_support_residual(a, s);
    e["support_size"] = fp.support_size;
    e["empirical_inf"] = fp.empirical_inf;
    e["tolerance"] = fp.tolerance;
    e["lower_ok"] = fp.lower_ok;
    e["support_ok"] = fp.support_ok;
    e["inf_ok"] = fp.inf_ok;
    fplates.push_back(e);
  }
  fr["plates"] = fplates;
  j["frostman"] = fr;

  const auto& d = report.duality;
  ojson du;
  du["feasibility_min_residual"] = vec(d.feasibility_min_residual);
  du["constants_sum"] = d.constants_sum;
  du["energy_of_omega"] = d.energy_of_omega;
  du["energy_identity_rel_error"] = d.energy_identity_rel_error;
  du["min_pairing"] = d.min_pairing;
  ojson tests = ojson::array();
  for (const auto& w : d.weak_duality) {
    ojson e;
    e["seed"] = w.seed;
    e["pairing"] = w.pairing;
    e["weak_duality_margin"] = w.margin;
    e["norm_product"] = w.norm_product;
    e["primal_energy"] = w.primal_energy;
    tests.push_back(e);
  }
  du["primal_tests"] = tests;
  du["feasibility_ok"] = d.feasibility_ok;
  du["energy_ok"] = d.energy_ok;
  du["weak_duality_ok"] = d.weak_duality_ok;
  du["passed"] = d.passed;
  j["duality"] = du;
  return detail::dump_json(j);
}

std::string exhaustion_summary_json(const ExhaustionStudy& study, const KernelSpec& spec, const RunInfo& info) {
  ojson j = header(info);
  j["kernel"] = kernel_json(spec, info);
  ojson rows = ojson::array();
  for (const auto& r : study.rows) {
    ojson e;
    e["level"] = r.level;
    e["points"] = r.total_points;
    e["cap"] = r.cap;
    e["constants"] = vec(r.constants);
    e["distance_to_final"] = r.distance_to_final;
    e["relative_gap"] = r.relative_gap;
    e["iterations"] = r.iterations;
    e["converged"] = r.converged;
    rows.push_back(e);
  }
  j["rows"] = rows;
  j["cap_nondecreasing"] = study.cap_nondecreasing;
  j["distance_decreasing"] = study.distance_decreasing;
  j["all_converged"] = study.all_converged;
  return detail::dump_json(j);
}

std::string family_summary_json(const FamilyStudy& study, const KernelSpec& spec, const RunInfo& info) {
  ojson j = header(info);
  j["kernel"] = kernel_json(spec, info);
  ojson rows = ojson::array();
  for (const auto& r : study.rows) {
    ojson e;
    e["n"] = r.n;
    e["cap"] = r.cap;
    e["constants"] = vec(r.constants);
    e["plate_capacity"] = r.plate_capacity;
    e["partial_sum"] = r.partial_sum;
    e["cap_ratio"] = r.cap_ratio;
    e["converged"] = r.converged;
    e["effectively_infinite_plate"] = r.effectively_infinite_plate;
    rows.push_back(e);
  }
  j["rows"] = rows;
  j["trend"] = study.trend;
  j["cap_strictly_decreasing"] = study.cap_strictly_decreasing;
  j["last_relative_change"] = study.last_relative_change;
  ojson large = ojson::array();
  for (const auto& [id, C] : study.large_capacity_constants) large.push_back({{"id", id}, {"constant", C}});
  j["large_capacity_constants"] = large;
  return detail::dump_json(j);
}

std::string weights_csv(const DiscreteCondenser& c, const CondenserMeasure& m) {
  check_measure(c, m);
  std::ostringstream os;
  os << "plate,index";
  for (int d = 0; d < c.dim; ++d) os << ",x" << d;
  os << ",g,weight\n";
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const auto& p = c.plates[i];
    for (std::size_t k = 0; k < p.points.size(); ++k) {
      os << p.id << ',' << k;
      for (double x : p.points[k]) os << ',' << format_double(x);
      os << ',' << format_double(p.g_values[k]) << ',' << format_double(m.weights[i][k]) << '\n';
    }
  }
  return os.str();
}

std::string residuals_csv(const DiscreteCondenser& c, const CapacityReport& report) {
  std::ostringstream os;
  os << "plate,index,residual,scaled_residual,on_support\n";
  const double s = report.frostman.potential_scale > 0.0 ? report.frostman.potential_scale : 1.0;
  for (std::size_t i = 0; i < report.frostman.plates.size(); ++i) {
    const auto& p = c.plates[i];
    const auto& fp = report.frostman.plates[i];
    for (std::size_t k = 0; k < fp.residuals.size(); ++k) {
      const bool support = report.gamma.weights[i][k] / report.cap > support_threshold(p, k);
      os << p.id << ',' << k << ',' << format_double(fp.residuals[k]) << ','
         << format_double(fp.residuals[k] / (p.mass * s)) << ',' << (support ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

std::string trace_csv(const SolveResult& result) {
  std::ostringstream os;
  os << "iteration,energy,gap\n";
  for (const auto& t : result.trace)
    os << t.iteration << ',' << format_double(t.energy) << ',' << format_double(t.gap) << '\n';
  return os.str();
}

std::string exhaustion_csv(const ExhaustionStudy& study) {
  std::ostringstream os;
  const std::size_t plates = study.rows.empty() ? 0 : study.rows.front().constants.size();
  os << "level,points,cap";
  for (std::size_t i = 0; i < plates; ++i) os << ",C" << i + 1;
  os << ",distance_to_final,relative_gap,iterations,converged\n";
  for (const auto& r : study.rows) {
    os << r.level << ',' << r.total_points << ',' << format_double(r.cap);
    for (double C : r.constants) os << ',' << format_double(C);
    os << ',' << format_double(r.distance_to_final) << ',' << format_double(r.relative_gap) << ',' << r.iterations
       << ',' << (r.converged ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string family_csv(const FamilyStudy& study) {
  std::ostringstream os;
  os << "n,cap,plate_capacity,partial_sum,cap_ratio,sum_constants,converged,effectively_infinite_plate\n";
  for (const auto& r : study.rows) {
    double sum = 0.0;
    for (double C : r.constants) sum += C;
    os << r.n << ',' << format_double(r.cap) << ',' << format_double(r.plate_capacity) << ','
       << format_double(r.partial_sum) << ',' << format_double(r.cap_ratio) << ',' << format_double(sum) << ','
       << (r.converged ? 1 : 0) << ',' << (r.effectively_infinite_plate ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string measure_json(const DiscreteCondenser& c, const CondenserMeasure& m) {
  check_measure(c, m);
  ojson j;
  j["fingerprint"] = fingerprint_hex(c);
  ojson w = ojson::array();
  for (const auto& plate : m.weights) w.push_back(vec(plate));
  j["weights"] = w;
  return detail::dump_json(j);
}

CondenserMeasure parse_measure_json(const std::string& text, const DiscreteCondenser& c) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw InputError(std::string("invalid measure JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("fingerprint") || !j.contains("weights"))
    throw InputError("measure JSON needs \"fingerprint\" and \"weights\"");
  if (j["fingerprint"] != fingerprint_hex(c))
    throw InputError("measure fingerprint " + j["fingerprint"].dump() + " does not match the condenser (" +
                     fingerprint_hex(c) + ")");
  CondenserMeasure m;
  try {
    m.weights = j["weights"].get<std::vector<std::vector<double>>>();
  } catch (const ojson::exception& e) {
    throw InputError(std::string("measure weights must be arrays of numbers: ") + e.what());
  }
  check_measure(c, m);
  return m;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << content;
  if (!out) throw InputError("failed while writing " + path);
}

}  // namespace condcap
