#include "nlscn/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <numbers>
#include <set>

#include "nlscn/errors.hpp"
#include "nlscn/expression.hpp"

namespace nlscn {

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

// Numbers may also be written as expressions, e.g. "2^-6".
double number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return Expression(j.get<std::string>())(0.0, 0.0);
  throw ConfigError(where + ": expected a number");
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

int integer_or(const json& j, const char* key, int fallback, const std::string& where) {
  return j.contains(key) ? integer(j.at(key), where + "." + key) : fallback;
}

std::string string_or(const json& j, const char* key, const std::string& fallback,
                      const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

Resolution resolution_from_json(const json& j, const std::string& where, const char* size_key) {
  check_keys(j, where, {size_key, "tau"});
  if (!j.contains(size_key) || !j.contains("tau")) {
    throw ConfigError(where + ": needs '" + size_key + "' and 'tau'");
  }
  return {integer(j.at(size_key), where + "." + size_key), number(j.at("tau"), where + ".tau")};
}

json resolution_to_json(const Resolution& r, const char* size_key) {
  return json{{size_key, r.nx}, {"tau", r.tau}};
}

}  // namespace

// ---------------------------------------------------------------- nonlinearity

NonlinearityModel NonlinearitySpec::build() const {
  if (type == "zero") return make_zero_model();
  if (type == "cubic") return make_cubic_model(kappa);
  if (type == "power") return make_power_model(kappa, q);
  if (type == "saturated") return make_saturated_model(kappa, alpha);
  throw ConfigError("nonlinearity: unknown type '" + type + "'");
}

NonlinearitySpec NonlinearitySpec::from_json(const json& j) {
  check_keys(j, "nonlinearity", {"type", "kappa", "alpha", "q"});
  NonlinearitySpec s;
  s.type = string_or(j, "type", "zero", "nonlinearity");
  s.kappa = number_or(j, "kappa", 0.0, "nonlinearity");
  s.alpha = number_or(j, "alpha", 0.0, "nonlinearity");
  s.q = number_or(j, "q", 1.0, "nonlinearity");
  if (s.type != "zero" && !j.contains("kappa")) throw ConfigError("nonlinearity: 'kappa' is required");
  if (s.type == "saturated" && !j.contains("alpha")) throw ConfigError("nonlinearity: 'alpha' is required");
  if (s.type == "power" && !j.contains("q")) throw ConfigError("nonlinearity: 'q' is required");
  s.build();  // rejects unknown types and invalid parameters
  return s;
}

json NonlinearitySpec::to_json() const {
  json j{{"type", type}};
  if (type != "zero") j["kappa"] = kappa;
  if (type == "saturated") j["alpha"] = alpha;
  if (type == "power") j["q"] = q;
  return j;
}

// ------------------------------------------------------------------- potential

PotentialFn PotentialSpec::build() const {
  if (type == "zero") return [](double, double) { return 0.0; };
  if (type == "constant") {
    const double v = value;
    return [v](double, double) { return v; };
  }
  if (type == "harmonic") {
    const double ax = nu_x, ay = nu_y;
    return [ax, ay](double x, double y) { return ax * ax * x * x + ay * ay * y * y; };
  }
  if (type == "harmonic_barrier") {
    const double ax = nu_x, ay = nu_y, h = height, w = half_width;
    return [ax, ay, h, w](double x, double y) {
      return ax * ax * x * x + ay * ay * y * y +
             h * ((std::abs(x) >= w ? 1.0 : 0.0) + (std::abs(y) >= w ? 1.0 : 0.0));
    };
  }
  if (type == "expression") {
    auto e = std::make_shared<const Expression>(expr);
    return [e](double x, double y) { return (*e)(x, y); };
  }
  throw ConfigError("potential: unknown type '" + type + "'");
}

bool PotentialSpec::is_constant(double* v) const {
  if (type == "zero" || type == "constant") {
    if (v) *v = type == "zero" ? 0.0 : value;
    return true;
  }
  return false;
}

PotentialSpec PotentialSpec::from_json(const json& j) {
  check_keys(j, "potential",
             {"type", "nu_x", "nu_y", "height", "half_width", "value", "expr", "adaptive_levels"});
  PotentialSpec s;
  s.type = string_or(j, "type", "zero", "potential");
  s.nu_x = number_or(j, "nu_x", 0.0, "potential");
  s.nu_y = number_or(j, "nu_y", 0.0, "potential");
  s.height = number_or(j, "height", 0.0, "potential");
  s.half_width = number_or(j, "half_width", 1.0, "potential");
  s.value = number_or(j, "value", 0.0, "potential");
  s.expr = string_or(j, "expr", "", "potential");
  s.adaptive_levels = integer_or(j, "adaptive_levels", 0, "potential");
  if (s.adaptive_levels < 0 || s.adaptive_levels > 20) {
    throw ConfigError("potential.adaptive_levels must lie in [0, 20]");
  }
  if (s.type == "constant" && s.value < 0.0) throw ConfigError("potential.value must be >= 0");
  if (s.type == "harmonic_barrier" && s.height < 0.0) throw ConfigError("potential.height must be >= 0");
  s.build();
  return s;
}

json PotentialSpec::to_json() const {
  json j{{"type", type}};
  if (type == "constant") j["value"] = value;
  if (type == "harmonic" || type == "harmonic_barrier") {
    j["nu_x"] = nu_x;
    j["nu_y"] = nu_y;
  }
  if (type == "harmonic_barrier") {
    j["height"] = height;
    j["half_width"] = half_width;
  }
  if (type == "expression") j["expr"] = expr;
  if (adaptive_levels > 0) j["adaptive_levels"] = adaptive_levels;
  return j;
}

// --------------------------------------------------------------- initial data

InitialSpec InitialSpec::from_json(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "initial", {"type", "potential", "nonlinearity", "tol", "dt_imag", "max_iters", "path",
                            "re", "im", "normalize", "mx", "my"});
  InitialSpec s;
  s.type = string_or(j, "type", "ground_state", "initial");
  if (s.type == "ground_state") {
    if (!j.contains("potential")) throw ConfigError("initial: ground state needs a 'potential'");
    s.potential = PotentialSpec::from_json(j.at("potential"));
    if (j.contains("nonlinearity")) s.nonlinearity = NonlinearitySpec::from_json(j.at("nonlinearity"));
    s.gs.tol = number_or(j, "tol", s.gs.tol, "initial");
    s.gs.dt_imag = number_or(j, "dt_imag", s.gs.dt_imag, "initial");
    s.gs.max_iters = integer_or(j, "max_iters", s.gs.max_iters, "initial");
    if (!(s.gs.tol > 0.0) || !(s.gs.dt_imag > 0.0) || s.gs.max_iters < 1) {
      throw ConfigError("initial: tol, dt_imag and max_iters must be positive");
    }
  } else if (s.type == "file") {
    std::filesystem::path p = string_or(j, "path", "", "initial");
    if (p.empty()) throw ConfigError("initial: file needs a 'path'");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    if (!std::filesystem::exists(p)) throw ConfigError("initial: file '" + p.string() + "' does not exist");
    s.path = p.string();
  } else if (s.type == "expression") {
    s.re = string_or(j, "re", "0", "initial");
    s.im = string_or(j, "im", "0", "initial");
    Expression(s.re);
    Expression(s.im);
    s.normalize = j.value("normalize", false);
  } else if (s.type == "eigenmode") {
    s.mx = integer_or(j, "mx", 1, "initial");
    s.my = integer_or(j, "my", 1, "initial");
  } else {
    throw ConfigError("initial: unknown type '" + s.type + "'");
  }
  return s;
}

json InitialSpec::to_json() const {
  json j{{"type", type}};
  if (type == "ground_state") {
    j["potential"] = potential.to_json();
    if (nonlinearity) j["nonlinearity"] = nonlinearity->to_json();
    j["tol"] = gs.tol;
    j["dt_imag"] = gs.dt_imag;
    j["max_iters"] = gs.max_iters;
  } else if (type == "file") {
    j["path"] = path;
  } else if (type == "expression") {
    j["re"] = re;
    j["im"] = im;
    j["normalize"] = normalize;
  } else if (type == "eigenmode") {
    j["mx"] = mx;
    j["my"] = my;
  }
  return j;
}

// ------------------------------------------------------------------- run config

const char* to_string(Method m) { return m == Method::cn_fem ? "cn-fem" : "sp2"; }

Method method_from_string(const std::string& s) {
  if (s == "cn-fem" || s == "cn") return Method::cn_fem;
  if (s == "sp2") return Method::sp2;
  throw ConfigError("unknown method '" + s + "' (expected cn-fem or sp2)");
}

long RunConfig::n_steps() const {
  if (T_final == 0.0) return 0;
  const double r = T_final / tau;
  const double n = std::nearbyint(r);
  const double half_ulp = 0.5 * (std::nextafter(std::abs(r), INFINITY) - std::abs(r));
  if (std::abs(r - n) > half_ulp) {
    throw ConfigError("T_final / tau = " + std::to_string(r) + " is not an integer step count");
  }
  return static_cast<long>(n);
}

void RunConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("time.tau must be positive");
  if (!(T_final >= 0.0) || !std::isfinite(T_final)) throw ConfigError("time.T_final must be >= 0");
  n_steps();
  if (nx < 2 || ny < 2) throw ConfigError("domain: nx and ny must be >= 2");
  if (!(bounds.bx > bounds.ax) || !(bounds.by > bounds.ay)) throw ConfigError("domain: empty box");
  if (!(solver.fp_tol >= 1e-15)) throw ConfigError("solver.fp_tol must be >= 1e-15");
  if (solver.max_iters < 1) throw ConfigError("solver.max_iters must be >= 1");
  if (method == Method::sp2) {
    if (bc != BoundaryKind::periodic) throw ConfigError("sp2 needs periodic boundary conditions");
    if (nx != ny || (nx & (nx - 1)) != 0) throw ConfigError("sp2 needs nx = ny = a power of two");
  }
  if (initial.type == "eigenmode" && (initial.mx < 1 || initial.my < 1) && bc == BoundaryKind::dirichlet) {
    throw ConfigError("initial: Dirichlet eigenmode indices must be >= 1");
  }
}

CNConfig RunConfig::cn_config() const {
  CNConfig c;
  c.tau = tau;
  c.fp_tol = solver.fp_tol;
  c.max_iters = solver.max_iters;
  c.predictor = solver.predictor;
  return c;
}

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "config", {"name", "method", "domain", "time", "nonlinearity", "potential", "initial",
                           "solver", "output", "convergence", "compare", "description"});
  RunConfig c;
  c.name = string_or(j, "name", c.name, "config");
  c.method = method_from_string(string_or(j, "method", "cn-fem", "config"));
  if (!j.contains("domain")) throw ConfigError("config: 'domain' is required");
  const json& d = j.at("domain");
  check_keys(d, "domain", {"bounds", "nx", "ny", "bc"});
  if (d.contains("bounds")) {
    const json& b = d.at("bounds");
    if (!b.is_array() || b.size() != 4) throw ConfigError("domain.bounds: expected [ax, bx, ay, by]");
    c.bounds = {number(b[0], "domain.bounds"), number(b[1], "domain.bounds"), number(b[2], "domain.bounds"),
                number(b[3], "domain.bounds")};
  }
  c.nx = integer_or(d, "nx", c.nx, "domain");
  c.ny = integer_or(d, "ny", c.nx, "domain");
  c.bc = boundary_kind_from_string(string_or(d, "bc", "dirichlet", "domain"));
  if (!j.contains("time")) throw ConfigError("config: 'time' is required");
  const json& t = j.at("time");
  check_keys(t, "time", {"tau", "T_final"});
  c.tau = number_or(t, "tau", c.tau, "time");
  c.T_final = number_or(t, "T_final", c.T_final, "time");
  if (j.contains("nonlinearity")) c.nonlinearity = NonlinearitySpec::from_json(j.at("nonlinearity"));
  if (j.contains("potential")) c.potential = PotentialSpec::from_json(j.at("potential"));
  if (!j.contains("initial")) throw ConfigError("config: 'initial' is required");
  c.initial = InitialSpec::from_json(j.at("initial"), base_dir);
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver", {"fp_tol", "max_iters", "predictor"});
    c.solver.fp_tol = number_or(s, "fp_tol", c.solver.fp_tol, "solver");
    c.solver.max_iters = integer_or(s, "max_iters", c.solver.max_iters, "solver");
    c.solver.predictor = predictor_from_string(string_or(s, "predictor", "previous-step", "solver"));
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "output", {"log", "state", "report", "density"});
    c.output.log = string_or(o, "log", c.output.log, "output");
    c.output.state = string_or(o, "state", c.output.state, "output");
    c.output.report = string_or(o, "report", c.output.report, "output");
    c.output.density = string_or(o, "density", c.output.density, "output");
  }
  c.validate();
  return c;
}

json RunConfig::to_json() const {
  return json{
      {"name", name},
      {"method", to_string(method)},
      {"domain",
       {{"bounds", {bounds.ax, bounds.bx, bounds.ay, bounds.by}}, {"nx", nx}, {"ny", ny}, {"bc", to_string(bc)}}},
      {"time", {{"tau", tau}, {"T_final", T_final}}},
      {"nonlinearity", nonlinearity.to_json()},
      {"potential", potential.to_json()},
      {"initial", initial.to_json()},
      {"solver",
       {{"fp_tol", solver.fp_tol}, {"max_iters", solver.max_iters}, {"predictor", to_string(solver.predictor)}}},
      {"output",
       {{"log", output.log}, {"state", output.state}, {"report", output.report}, {"density", output.density}}},
  };
}

// ---------------------------------------------------------------------- sweeps

ConvergenceSpec ConvergenceSpec::from_json(const json& j) {
  check_keys(j, "convergence", {"nx", "tau", "reference", "exact", "exact_refine"});
  ConvergenceSpec s;
  if (!j.contains("nx") || !j.at("nx").is_array() || !j.contains("tau") || !j.at("tau").is_array()) {
    throw ConfigError("convergence: 'nx' and 'tau' lists are required");
  }
  for (const auto& v : j.at("nx")) s.nx_list.push_back(integer(v, "convergence.nx"));
  for (const auto& v : j.at("tau")) s.tau_list.push_back(number(v, "convergence.tau"));
  if (s.nx_list.empty() || s.tau_list.empty()) throw ConfigError("convergence: empty sweep");
  s.exact = j.value("exact", false);
  s.exact_refine = integer_or(j, "exact_refine", s.exact_refine, "convergence");
  if (!s.exact) {
    if (!j.contains("reference")) throw ConfigError("convergence: 'reference' or 'exact' is required");
    s.reference = resolution_from_json(j.at("reference"), "convergence.reference", "nx");
  }
  return s;
}

json ConvergenceSpec::to_json() const {
  json j{{"nx", nx_list}, {"tau", tau_list}, {"exact", exact}};
  if (exact) j["exact_refine"] = exact_refine;
  else j["reference"] = resolution_to_json(reference, "nx");
  return j;
}

CompareSpec CompareSpec::from_json(const json& j) {
  check_keys(j, "compare", {"cn", "sp2", "reference"});
  CompareSpec s;
  if (j.contains("cn")) {
    for (const auto& r : j.at("cn")) s.cn_runs.push_back(resolution_from_json(r, "compare.cn", "nx"));
  }
  if (j.contains("sp2")) {
    for (const auto& r : j.at("sp2")) s.sp2_runs.push_back(resolution_from_json(r, "compare.sp2", "N"));
  }
  if (!j.contains("reference")) throw ConfigError("compare: 'reference' is required");
  s.reference = resolution_from_json(j.at("reference"), "compare.reference", "nx");
  return s;
}

json CompareSpec::to_json() const {
  json cn = json::array(), sp = json::array();
  for (const auto& r : cn_runs) cn.push_back(resolution_to_json(r, "nx"));
  for (const auto& r : sp2_runs) sp.push_back(resolution_to_json(r, "N"));
  return json{{"cn", cn}, {"sp2", sp}, {"reference", resolution_to_json(reference, "nx")}};
}

ConfigFile parse_config(const json& j, const std::filesystem::path& base_dir) {
  ConfigFile f;
  try {
    f.run = RunConfig::from_json(j, base_dir);
    if (j.contains("convergence")) f.convergence = ConvergenceSpec::from_json(j.at("convergence"));
    if (j.contains("compare")) f.compare = CompareSpec::from_json(j.at("compare"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return f;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return parse_config(j, path.parent_path());
}

}  // namespace nlscn
