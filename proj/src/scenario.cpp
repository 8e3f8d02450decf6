#include <condcap/scenario.hpp>

#include <condcap/errors.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace condcap {

PlateGenerator FamilySettings::generator() const {
  const double scale = mass_scale, exponent = mass_exponent;
  return shell_chain(radius, spacing, axis, points_per_shell,
                     [scale, exponent](std::size_t k) { return scale * std::pow(static_cast<double>(k), exponent); },
                     alternating_signs);
}

namespace {

using json = nlohmann::json;

// Maps JSON pointers to the line where their value starts. Runs on text that
// already parsed, so it only has to be correct for well-formed JSON.
class SourceMap {
 public:
  explicit SourceMap(const std::string& text) : s_(text) { value(""); }

  int line_of(const std::string& pointer) const {
    std::string p = pointer;
    for (;;) {
      auto it = lines_.find(p);
      if (it != lines_.end()) return it->second;
      const auto slash = p.rfind('/');
      if (slash == std::string::npos) return 1;
      p.resize(slash);
    }
  }

 private:
  void ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r' || s_[pos_] == '\n')) {
      if (s_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }
  std::string string() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\') ++pos_;
      if (pos_ < s_.size()) out += s_[pos_++];
    }
    ++pos_;
    return out;
  }
  static std::string escape(const std::string& key) {
    std::string out;
    for (char ch : key) {
      if (ch == '~') out += "~0";
      else if (ch == '/') out += "~1";
      else out += ch;
    }
    return out;
  }
  void value(const std::string& path) {
    ws();
    lines_[path] = line_;
    if (pos_ >= s_.size()) return;
    const char ch = s_[pos_];
    if (ch == '{') {
      ++pos_;
      for (;;) {
        ws();
        if (pos_ >= s_.size() || s_[pos_] == '}') break;
        const std::string key = string();
        ws();
        ++pos_;  // ':'
        value(path + "/" + escape(key));
        ws();
        if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      }
      ++pos_;
    } else if (ch == '[') {
      ++pos_;
      for (std::size_t i = 0;; ++i) {
        ws();
        if (pos_ >= s_.size() || s_[pos_] == ']') break;
        value(path + "/" + std::to_string(i));
        ws();
        if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      }
      ++pos_;
    } else if (ch == '"') {
      string();
    } else {
      while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '}' && s_[pos_] != ']' && s_[pos_] != ' ' &&
             s_[pos_] != '\n' && s_[pos_] != '\r' && s_[pos_] != '\t')
        ++pos_;
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

class Reader {
 public:
  Reader(const std::string& text, std::string origin) : origin_(std::move(origin)), map_(text) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    throw InputError(origin_ + ":" + std::to_string(map_.line_of(ptr)) + ": " + (ptr.empty() ? "/" : ptr) + ": " +
                     msg);
  }

  const json& object(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(ptr, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!ok.count(it.key())) fail(ptr + "/" + it.key(), "unknown key \"" + it.key() + "\"");
    return j;
  }
  const json& required(const json& j, const std::string& ptr, const char* key) const {
    if (!j.contains(key)) fail(ptr, std::string("missing required key \"") + key + "\"");
    return j.at(key);
  }
  double number(const json& j, const std::string& ptr) const {
    if (!j.is_number()) fail(ptr, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail(ptr, "expected a finite number");
    return x;
  }
  double positive(const json& j, const std::string& ptr) const {
    const double x = number(j, ptr);
    if (!(x > 0.0)) fail(ptr, "expected a positive number");
    return x;
  }
  std::int64_t integer(const json& j, const std::string& ptr) const {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<std::int64_t>();
  }
  std::size_t count(const json& j, const std::string& ptr) const {
    const auto v = integer(j, ptr);
    if (v < 1) fail(ptr, "expected an integer >= 1");
    return static_cast<std::size_t>(v);
  }
  std::string string(const json& j, const std::string& ptr) const {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
  }
  bool boolean(const json& j, const std::string& ptr) const {
    if (!j.is_boolean()) fail(ptr, "expected true or false");
    return j.get<bool>();
  }
  std::vector<double> vec(const json& j, const std::string& ptr) const {
    if (!j.is_array() || j.empty()) fail(ptr, "expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], ptr + "/" + std::to_string(i)));
    return out;
  }
  std::string path_or_empty(const json& j, const std::string& ptr) const {
    if (j.is_null()) return {};
    return string(j, ptr);
  }

 private:
  std::string origin_;
  SourceMap map_;
};

KernelSpec parse_kernel(const Reader& r, const json& j, bool& auto_eps) {
  const std::string p = "/kernel";
  r.object(j, p, {"family", "alpha", "dim", "epsilon"});
  const std::string fam = r.string(r.required(j, p, "family"), p + "/family");
  KernelSpec spec;
  if (fam == "riesz") {
    spec = KernelSpec::riesz(r.number(r.required(j, p, "alpha"), p + "/alpha"),
                             static_cast<int>(r.integer(r.required(j, p, "dim"), p + "/dim")));
  } else if (fam == "newtonian") {
    const int dim = j.contains("dim") ? static_cast<int>(r.integer(j["dim"], p + "/dim")) : 3;
    spec = KernelSpec::newtonian(dim);
    if (j.contains("alpha")) r.fail(p + "/alpha", "the newtonian family fixes alpha = 2");
  } else if (fam == "log_unit_disk") {
    spec = KernelSpec::log_unit_disk();
    if (j.contains("alpha")) r.fail(p + "/alpha", "log_unit_disk takes no alpha");
    if (j.contains("dim") && r.integer(j["dim"], p + "/dim") != 2) r.fail(p + "/dim", "log_unit_disk needs dim 2");
  } else {
    r.fail(p + "/family", "unknown kernel family \"" + fam + "\" (riesz, newtonian, log_unit_disk)");
  }
  auto_eps = true;
  if (j.contains("epsilon")) {
    const auto& e = j["epsilon"];
    if (e.is_string()) {
      if (e.get<std::string>() != "auto") r.fail(p + "/epsilon", "expected a number or \"auto\"");
    } else {
      const double eps = r.number(e, p + "/epsilon");
      if (eps < 0.0) r.fail(p + "/epsilon", "epsilon must be nonnegative");
      spec.smoothing_epsilon = eps;
      auto_eps = false;
    }
  }
  try {
    validate_spec(spec);
  } catch (const InputError& e) {
    r.fail(p, e.what());
  }
  return spec;
}

PlateShape parse_shape(const Reader& r, const json& j, const std::string& p) {
  const std::string type = r.string(r.required(j, p, "type"), p + "/type");
  if (type == "sphere_shell" || type == "ball_volume") {
    r.object(j, p, {"type", "center", "radius"});
    auto center = r.vec(r.required(j, p, "center"), p + "/center");
    const double radius = r.positive(r.required(j, p, "radius"), p + "/radius");
    if (type == "sphere_shell") return SphereShell{std::move(center), radius};
    return BallVolume{std::move(center), radius};
  }
  if (type == "segment") {
    r.object(j, p, {"type", "a", "b"});
    auto a = r.vec(r.required(j, p, "a"), p + "/a");
    auto b = r.vec(r.required(j, p, "b"), p + "/b");
    if (a.size() != b.size()) r.fail(p + "/b", "segment endpoints have different dimensions");
    return Segment{std::move(a), std::move(b)};
  }
  if (type == "explicit") {
    r.object(j, p, {"type", "points"});
    const auto& pts = r.required(j, p, "points");
    if (!pts.is_array() || pts.empty()) r.fail(p + "/points", "expected a nonempty array of points");
    PointCloud cloud;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string pp = p + "/points/" + std::to_string(i);
      const auto x = r.vec(pts[i], pp);
      if (i == 0) cloud = PointCloud(static_cast<int>(x.size()));
      else if (x.size() != static_cast<std::size_t>(cloud.dim())) r.fail(pp, "inconsistent point dimension");
      cloud.push_back(x);
    }
    return ExplicitPoints{std::move(cloud)};
  }
  r.fail(p + "/type", "unknown shape type \"" + type + "\" (sphere_shell, ball_volume, segment, explicit)");
}

std::vector<PlateSpec> parse_plates(const Reader& r, const json& j) {
  if (!j.is_array() || j.empty()) r.fail("/plates", "expected a nonempty array of plates");
  std::vector<PlateSpec> out;
  std::set<int> ids;
  for (std::size_t n = 0; n < j.size(); ++n) {
    const std::string p = "/plates/" + std::to_string(n);
    const auto& e = j[n];
    r.object(e, p, {"id", "sign", "shape", "points", "a"});
    PlateSpec s;
    s.id = static_cast<int>(r.integer(r.required(e, p, "id"), p + "/id"));
    if (!ids.insert(s.id).second) r.fail(p + "/id", "duplicate plate id " + std::to_string(s.id));
    const auto sign = r.integer(r.required(e, p, "sign"), p + "/sign");
    if (sign != 1 && sign != -1) r.fail(p + "/sign", "sign must be 1 or -1");
    s.sign = static_cast<int>(sign);
    s.shape = parse_shape(r, r.required(e, p, "shape"), p + "/shape");
    if (std::holds_alternative<ExplicitPoints>(s.shape)) {
      s.point_count = std::get<ExplicitPoints>(s.shape).points.size();
      if (e.contains("points")) r.fail(p + "/points", "explicit plates take their points from the shape");
    } else {
      s.point_count = r.count(r.required(e, p, "points"), p + "/points");
    }
    s.mass = r.positive(r.required(e, p, "a"), p + "/a");
    out.push_back(std::move(s));
  }
  return out;
}

WeightFunction parse_weight(const Reader& r, const json& j) {
  const std::string p = "/weight_function";
  const std::string type = r.string(r.required(j, p, "type"), p + "/type");
  if (type == "constant") {
    r.object(j, p, {"type", "value"});
    return WeightFunction::constant(r.positive(r.required(j, p, "value"), p + "/value"));
  }
  if (type == "radial_polynomial") {
    r.object(j, p, {"type", "coefficients"});
    const auto coeffs = r.vec(r.required(j, p, "coefficients"), p + "/coefficients");
    if (!(coeffs[0] > 0.0)) r.fail(p + "/coefficients/0", "the constant term must be positive");
    try {
      return WeightFunction::radial_polynomial(coeffs);
    } catch (const InputError& e) {
      r.fail(p + "/coefficients", e.what());
    }
  }
  r.fail(p + "/type", "unknown weight function \"" + type + "\" (constant, radial_polynomial)");
}

SolveOptions parse_solver(const Reader& r, const json& j) {
  const std::string p = "/solver";
  r.object(j, p, {"max_iterations", "gap_tolerance", "step_rule", "armijo_shrink", "armijo_sufficient_decrease"});
  SolveOptions o;
  if (j.contains("max_iterations")) o.max_iterations = r.count(j["max_iterations"], p + "/max_iterations");
  if (j.contains("gap_tolerance")) o.gap_tolerance = r.positive(j["gap_tolerance"], p + "/gap_tolerance");
  if (j.contains("step_rule")) {
    const auto rule = r.string(j["step_rule"], p + "/step_rule");
    if (rule == "armijo") o.step_rule = StepRule::BacktrackingArmijo;
    else if (rule == "fixed") o.step_rule = StepRule::FixedInverseLipschitz;
    else r.fail(p + "/step_rule", "step_rule must be \"armijo\" or \"fixed\"");
  }
  if (j.contains("armijo_shrink")) o.armijo_shrink = r.number(j["armijo_shrink"], p + "/armijo_shrink");
  if (j.contains("armijo_sufficient_decrease"))
    o.armijo_sufficient_decrease = r.number(j["armijo_sufficient_decrease"], p + "/armijo_sufficient_decrease");
  try {
    validate_options(o);
  } catch (const InputError& e) {
    r.fail(p, e.what());
  }
  return o;
}

OutputPaths parse_outputs(const Reader& r, const json& j) {
  const std::string p = "/outputs";
  r.object(j, p,
           {"report", "weights_csv", "residuals_csv", "trace_csv", "measure_json", "exhaustion_csv", "family_csv"});
  OutputPaths o;
  const auto set = [&](const char* key, std::string& dst) {
    if (j.contains(key)) dst = r.path_or_empty(j[key], p + "/" + key);
  };
  set("report", o.report);
  set("weights_csv", o.weights_csv);
  set("residuals_csv", o.residuals_csv);
  set("trace_csv", o.trace_csv);
  set("measure_json", o.measure_json);
  set("exhaustion_csv", o.exhaustion_csv);
  set("family_csv", o.family_csv);
  return o;
}

VerificationSettings parse_verification(const Reader& r, const json& j) {
  const std::string p = "/verification";
  r.object(j, p, {"kkt_tolerance", "primal_tests", "primal_seed", "require_signed_assumptions"});
  VerificationSettings v;
  if (j.contains("kkt_tolerance")) v.kkt_tolerance = r.positive(j["kkt_tolerance"], p + "/kkt_tolerance");
  if (j.contains("primal_tests")) v.primal_tests = r.count(j["primal_tests"], p + "/primal_tests");
  if (j.contains("primal_seed")) {
    const auto s = r.integer(j["primal_seed"], p + "/primal_seed");
    if (s < 0) r.fail(p + "/primal_seed", "seed must be nonnegative");
    v.primal_seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("require_signed_assumptions"))
    v.require_signed_assumptions = r.boolean(j["require_signed_assumptions"], p + "/require_signed_assumptions");
  return v;
}

ExhaustionLevels parse_levels(const Reader& r, const json& j) {
  const std::string p = "/levels";
  r.object(j, p, {"kind", "values"});
  ExhaustionLevels lv;
  const auto kind = r.string(r.required(j, p, "kind"), p + "/kind");
  if (kind == "point_counts") lv.kind = ExhaustionLevels::Kind::PointCounts;
  else if (kind == "radius_fractions") lv.kind = ExhaustionLevels::Kind::RadiusFractions;
  else r.fail(p + "/kind", "kind must be \"point_counts\" or \"radius_fractions\"");
  lv.values = r.vec(r.required(j, p, "values"), p + "/values");
  for (std::size_t i = 0; i < lv.values.size(); ++i) {
    const std::string vp = p + "/values/" + std::to_string(i);
    if (!(lv.values[i] > 0.0)) r.fail(vp, "level values must be positive");
    if (lv.kind == ExhaustionLevels::Kind::PointCounts && lv.values[i] != std::floor(lv.values[i]))
      r.fail(vp, "point counts must be integers");
    if (lv.kind == ExhaustionLevels::Kind::RadiusFractions && lv.values[i] > 1.0)
      r.fail(vp, "radius fractions must lie in (0, 1]");
    if (i > 0 && !(lv.values[i] > lv.values[i - 1])) r.fail(vp, "non-nested levels: values must strictly increase");
  }
  return lv;
}

FamilySettings parse_family(const Reader& r, const json& j) {
  const std::string p = "/family";
  r.object(j, p, {"generator", "radius", "spacing", "axis", "points_per_shell", "mass_rule", "alternating_signs",
                  "n_list"});
  FamilySettings f;
  const auto gen = r.string(r.required(j, p, "generator"), p + "/generator");
  if (gen != "shell_chain") r.fail(p + "/generator", "unknown generator \"" + gen + "\" (shell_chain)");
  if (j.contains("radius")) f.radius = r.positive(j["radius"], p + "/radius");
  if (j.contains("spacing")) f.spacing = r.positive(j["spacing"], p + "/spacing");
  if (j.contains("axis")) f.axis = r.vec(j["axis"], p + "/axis");
  if (j.contains("points_per_shell")) f.points_per_shell = r.count(j["points_per_shell"], p + "/points_per_shell");
  if (j.contains("alternating_signs")) f.alternating_signs = r.boolean(j["alternating_signs"], p + "/alternating_signs");
  if (j.contains("mass_rule")) {
    const std::string mp = p + "/mass_rule";
    const auto& m = j["mass_rule"];
    const auto type = r.string(r.required(m, mp, "type"), mp + "/type");
    if (type == "constant") {
      r.object(m, mp, {"type", "value"});
      f.mass_scale = r.positive(r.required(m, mp, "value"), mp + "/value");
      f.mass_exponent = 0.0;
    } else if (type == "power") {
      r.object(m, mp, {"type", "scale", "exponent"});
      if (m.contains("scale")) f.mass_scale = r.positive(m["scale"], mp + "/scale");
      f.mass_exponent = r.number(r.required(m, mp, "exponent"), mp + "/exponent");
    } else {
      r.fail(mp + "/type", "mass rule must be \"constant\" or \"power\"");
    }
  }
  const auto& nl = r.required(j, p, "n_list");
  if (!nl.is_array() || nl.empty()) r.fail(p + "/n_list", "expected a nonempty array of integers");
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const std::string np = p + "/n_list/" + std::to_string(i);
    f.n_list.push_back(r.count(nl[i], np));
    if (i > 0 && !(f.n_list[i] > f.n_list[i - 1])) r.fail(np, "n_list must strictly increase");
  }
  const double norm2 = [&] {
    double s = 0.0;
    for (double x : f.axis) s += x * x;
    return s;
  }();
  if (!(norm2 > 0.0)) r.fail(p + "/axis", "axis must be nonzero");
  return f;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw InputError(origin + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  const Reader r(text, origin);
  r.object(doc, "",
           {"schema", "name", "kernel", "plates", "weight_function", "solver", "outputs", "verification", "levels",
            "family", "seed"});
  const auto schema = r.string(r.required(doc, "", "schema"), "/schema");
  if (schema != kScenarioSchema)
    r.fail("/schema", "unsupported schema \"" + schema + "\" (expected \"" + kScenarioSchema + "\")");

  Scenario s;
  if (doc.contains("name")) s.name = r.string(doc["name"], "/name");
  s.kernel = parse_kernel(r, r.required(doc, "", "kernel"), s.auto_epsilon);
  if (doc.contains("plates")) s.plates = parse_plates(r, doc["plates"]);
  if (doc.contains("weight_function")) s.weight = parse_weight(r, doc["weight_function"]);
  if (doc.contains("solver")) s.solver = parse_solver(r, doc["solver"]);
  if (doc.contains("outputs")) s.outputs = parse_outputs(r, doc["outputs"]);
  if (doc.contains("verification")) s.verification = parse_verification(r, doc["verification"]);
  if (doc.contains("levels")) s.levels = parse_levels(r, doc["levels"]);
  if (doc.contains("family")) s.family = parse_family(r, doc["family"]);
  if (doc.contains("seed")) {
    const auto seed = r.integer(doc["seed"], "/seed");
    if (seed < 0) r.fail("/seed", "seed must be nonnegative");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  if (!doc.contains("plates") && !doc.contains("family"))
    r.fail("", "a scenario needs \"plates\" or \"family\"");
  for (std::size_t n = 0; n < s.plates.size(); ++n) {
    std::visit(
        [&](const auto& shape) {
          using T = std::decay_t<decltype(shape)>;
          std::size_t dim = 0;
          if constexpr (std::is_same_v<T, ExplicitPoints>) dim = static_cast<std::size_t>(shape.points.dim());
          else if constexpr (std::is_same_v<T, Segment>) dim = shape.a.size();
          else dim = shape.center.size();
          if (dim != static_cast<std::size_t>(s.kernel.dim))
            r.fail("/plates/" + std::to_string(n) + "/shape",
                   "plate dimension " + std::to_string(dim) + " does not match kernel dim " +
                       std::to_string(s.kernel.dim));
        },
        s.plates[n].shape);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

}  // namespace condcap
