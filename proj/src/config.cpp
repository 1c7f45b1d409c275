#include "lowmach/config.hpp"

#include "lowmach/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace lowmach {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
public:
  explicit Reader(std::vector<std::string>& errs) : errs_(errs) {}

  bool number(const std::string& key, const std::string& text, double& out) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v)) {
      errs_.push_back(key + ": '" + text + "' is not a finite number");
      return false;
    }
    out = v;
    return true;
  }

  template <class Int>
  bool integer(const std::string& key, const std::string& text, Int& out) {
    Int v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) {
      errs_.push_back(key + ": '" + text + "' is not an integer");
      return false;
    }
    out = v;
    return true;
  }

  bool boolean(const std::string& key, const std::string& text, bool& out) {
    if (text == "true" || text == "1" || text == "yes") {
      out = true;
    } else if (text == "false" || text == "0" || text == "no") {
      out = false;
    } else {
      errs_.push_back(key + ": '" + text + "' is not a boolean");
      return false;
    }
    return true;
  }

  bool list(const std::string& key, const std::string& text, std::vector<double>& out) {
    out.clear();
    bool ok = true;
    for (const auto& item : split_list(text)) {
      double v = 0.0;
      if (number(key, item, v)) out.push_back(v); else ok = false;
    }
    if (out.empty() && ok) {
      errs_.push_back(key + ": empty list");
      ok = false;
    }
    return ok;
  }

private:
  std::vector<std::string>& errs_;
};

template <class Fn>
void collect(std::vector<std::string>& errs, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& ex) {
    errs.push_back(ex.what());
  }
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + format_double(x);
  return s;
}

} // namespace

ParsedConfig parse_config(const std::string& text) {
  ParsedConfig pc;
  RunConfig& rc = pc.run;
  std::vector<std::string> errs;
  Reader rd(errs);
  std::set<std::string> seen;
  SweepAxes axes;
  bool has_sweep = false;

  using Setter = std::function<void(const std::string& key, const std::string& value)>;
  const std::map<std::string, Setter> keys = {
      {"grid.dim", [&](auto& k, auto& v) { rd.integer(k, v, rc.grid.dim); }},
      {"grid.n", [&](auto& k, auto& v) { rd.integer(k, v, rc.grid.n); }},
      {"grid.dealias", [&](auto& k, auto& v) { rd.boolean(k, v, rc.grid.dealias); }},
      {"gas.kind", [&](auto&, auto& v) { rc.gas.kind = v; }},
      {"gas.R", [&](auto& k, auto& v) { rd.number(k, v, rc.gas.R); }},
      {"gas.cv", [&](auto& k, auto& v) { rd.list(k, v, rc.gas.cv); }},
      {"gas.a0", [&](auto& k, auto& v) { rd.number(k, v, rc.gas.a0); }},
      {"gas.b0", [&](auto& k, auto& v) { rd.number(k, v, rc.gas.b0); }},
      {"gas.table", [&](auto&, auto& v) { rc.gas.table = v; }},
      {"gas.P_ref", [&](auto& k, auto& v) { rd.number(k, v, rc.gas.P_ref); }},
      {"gas.T_ref", [&](auto& k, auto& v) { rd.number(k, v, rc.gas.T_ref); }},
      {"transport.k0", [&](auto& k, auto& v) { rd.number(k, v, rc.transport.k.c0); }},
      {"transport.k1", [&](auto& k, auto& v) { rd.number(k, v, rc.transport.k.c1); }},
      {"transport.zeta0", [&](auto& k, auto& v) { rd.number(k, v, rc.transport.zeta.c0); }},
      {"transport.zeta1", [&](auto& k, auto& v) { rd.number(k, v, rc.transport.zeta.c1); }},
      {"transport.eta0", [&](auto& k, auto& v) { rd.number(k, v, rc.transport.eta.c0); }},
      {"transport.eta1", [&](auto& k, auto& v) { rd.number(k, v, rc.transport.eta.c1); }},
      {"transport.D0", [&](auto& k, auto& v) { rd.number(k, v, rc.transport.D.c0); }},
      {"transport.D1", [&](auto& k, auto& v) { rd.number(k, v, rc.transport.D.c1); }},
      {"model.formulation",
       [&](auto&, auto& v) { collect(errs, [&] { rc.formulation = formulation_from_string(v); }); }},
      {"model.species_closure",
       [&](auto& k, auto& v) {
         if (v == "density_ratio") rc.species_closure = SpeciesClosure::density_ratio;
         else if (v == "unit") rc.species_closure = SpeciesClosure::unit;
         else errs.push_back(k + ": unknown closure '" + v + "' (expected density_ratio or unit)");
       }},
      {"params.eps", [&](auto& k, auto& v) { rd.number(k, v, rc.params.eps); }},
      {"params.mu", [&](auto& k, auto& v) { rd.number(k, v, rc.params.mu); }},
      {"params.kappa", [&](auto& k, auto& v) { rd.number(k, v, rc.params.kappa); }},
      {"params.lambda", [&](auto& k, auto& v) { rd.number(k, v, rc.params.lambda); }},
      {"init.generator", [&](auto&, auto& v) { rc.init.generator = v; }},
      {"init.seed", [&](auto& k, auto& v) { rd.integer(k, v, rc.init.seed); }},
      {"init.amplitude", [&](auto& k, auto& v) { rd.number(k, v, rc.init.amplitude); }},
      {"init.band", [&](auto& k, auto& v) { rd.integer(k, v, rc.init.band); }},
      {"init.species", [&](auto& k, auto& v) { rd.integer(k, v, rc.init.species); }},
      {"source.kind", [&](auto&, auto& v) { rc.source.kind = v; }},
      {"source.amplitude", [&](auto& k, auto& v) { rd.number(k, v, rc.source.amplitude); }},
      {"source.wavenumber", [&](auto& k, auto& v) { rd.integer(k, v, rc.source.wavenumber); }},
      {"source.omega", [&](auto& k, auto& v) { rd.number(k, v, rc.source.omega); }},
      {"source.q1", [&](auto& k, auto& v) { rd.number(k, v, rc.source.q1); }},
      {"source.q3", [&](auto& k, auto& v) { rd.number(k, v, rc.source.q3); }},
      {"integrator.t_end", [&](auto& k, auto& v) { rd.number(k, v, rc.integrator.t_end); }},
      {"integrator.cfl", [&](auto& k, auto& v) { rd.number(k, v, rc.integrator.cfl); }},
      {"integrator.dt",
       [&](auto& k, auto& v) {
         double d = 0.0;
         if (rd.number(k, v, d)) rc.integrator.fixed_dt = d;
       }},
      {"integrator.sample_every", [&](auto& k, auto& v) { rd.integer(k, v, rc.integrator.sample_every); }},
      {"integrator.max_steps", [&](auto& k, auto& v) { rd.integer(k, v, rc.integrator.max_steps); }},
      {"integrator.blowup_threshold", [&](auto& k, auto& v) { rd.number(k, v, rc.integrator.blowup_threshold); }},
      {"integrator.freeze_velocity", [&](auto& k, auto& v) { rd.boolean(k, v, rc.integrator.freeze_velocity); }},
      {"diagnostics.s", [&](auto& k, auto& v) { rd.integer(k, v, rc.s); }},
      {"diagnostics.gamma_mode",
       [&](auto&, auto& v) { collect(errs, [&] { rc.gamma_mode = gamma_mode_from_string(v); }); }},
      {"diagnostics.energy", [&](auto& k, auto& v) { rd.boolean(k, v, rc.energy); }},
      {"output.wall_time", [&](auto& k, auto& v) { rd.boolean(k, v, rc.wall_time); }},
      {"sweep.eps", [&](auto& k, auto& v) { has_sweep = true; rd.list(k, v, axes.eps); }},
      {"sweep.mu", [&](auto& k, auto& v) { has_sweep = true; rd.list(k, v, axes.mu); }},
      {"sweep.kappa", [&](auto& k, auto& v) { has_sweep = true; rd.list(k, v, axes.kappa); }},
      {"sweep.lambda", [&](auto& k, auto& v) { has_sweep = true; rd.list(k, v, axes.lambda); }},
      {"sweep.workers", [&](auto& k, auto& v) { has_sweep = true; rd.integer(k, v, axes.workers); }},
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) {
      errs.push_back(where + "expected 'section.key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = keys.find(key);
    if (it == keys.end()) {
      errs.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (!seen.insert(key).second) {
      errs.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    if (value.empty()) {
      errs.push_back(where + key + ": missing value");
      continue;
    }
    it->second(key, value);
  }

  // Semantic validation, all problems collected.
  const bool combustion = rc.formulation == Formulation::combustion;
  if (rc.integrator.record_s != rc.s) rc.integrator.record_s = rc.s;
  collect(errs, [&] { rc.grid.validate(); });
  if (!has_sweep) collect(errs, [&] { rc.params.validate(combustion); });
  if (has_sweep) {
    // Missing axes fall back to the base value.
    if (axes.eps.empty()) axes.eps = {rc.params.eps};
    if (axes.mu.empty()) axes.mu = {rc.params.mu};
    if (axes.kappa.empty()) axes.kappa = {rc.params.kappa};
    if (axes.lambda.empty()) axes.lambda = {rc.params.lambda};
    for (double e : axes.eps) if (!(e > 0.0 && e <= 1.0)) errs.push_back("sweep.eps: eps must be in (0,1], got " + format_double(e));
    for (double m : axes.mu) if (!(m >= 0.0 && m <= 1.0)) errs.push_back("sweep.mu: mu must be in [0,1], got " + format_double(m));
    for (double k : axes.kappa) if (!(k >= 0.0 && k <= 1.0)) errs.push_back("sweep.kappa: kappa must be in [0,1], got " + format_double(k));
    for (double l : axes.lambda) if (!(l >= 0.0 && l <= 2.0)) errs.push_back("sweep.lambda: lambda must be in [0,2], got " + format_double(l));
    if (axes.workers < 1) errs.push_back("sweep.workers must be >= 1");
    pc.sweep = axes;
  }
  for (const auto& m : rc.transport.validate(-1.0, 1.0, combustion)) errs.push_back("transport: " + m);
  collect(errs, [&] { rc.integrator.validate(); });
  if (rc.s < 1) errs.push_back("diagnostics.s must be >= 1");

  const std::set<std::string> generators{"general", "well-prepared", "theta-small", "zero"};
  if (!generators.count(rc.init.generator)) errs.push_back("init.generator: unknown generator '" + rc.init.generator + "'");
  if (!(rc.init.amplitude >= 0.0)) errs.push_back("init.amplitude must be >= 0");
  if (rc.init.species < 0) errs.push_back("init.species must be >= 0");
  if (rc.grid.n >= 8 && (rc.init.band < 1 || 3 * rc.init.band >= rc.grid.n)) {
    errs.push_back("init.band must be in [1, n/3)");
  }
  if (combustion && rc.init.species < 1) errs.push_back("combustion needs init.species >= 1");

  if (rc.source.kind != "none" && rc.source.kind != "prescribed" && rc.source.kind != "linear") {
    errs.push_back("source.kind: unknown source '" + rc.source.kind + "' (expected none, prescribed or linear)");
  }
  if (rc.source.kind == "linear" && !combustion) errs.push_back("source.kind = linear needs model.formulation = combustion");
  if (rc.source.kind != "none" && rc.formulation == Formulation::symmetrized) {
    errs.push_back("the symmetrized formulation requires source.kind = none");
  }
  if (rc.gamma_mode == GammaMode::custom) errs.push_back("diagnostics.gamma_mode = custom is only available through the library API");

  if (rc.gas.kind != "ideal" && rc.gas.kind != "virial" && rc.gas.kind != "table") {
    errs.push_back("gas.kind: unknown gas model '" + rc.gas.kind + "'");
  } else {
    collect(errs, [&] { (void)build_gas(rc.gas); });
  }

  if (!errs.empty()) {
    std::string msg;
    for (const auto& e : errs) msg += (msg.empty() ? "" : "\n") + e;
    throw ConfigError(msg);
  }
  return pc;
}

ParsedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const ParsedConfig& cfg) {
  const RunConfig& rc = cfg.run;
  std::ostringstream o;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << "\n"; };
  auto num = [&](const char* k, double v) { kv(k, format_double(v)); };
  auto flag = [&](const char* k, bool v) { kv(k, v ? "true" : "false"); };
  kv("grid.dim", std::to_string(rc.grid.dim));
  kv("grid.n", std::to_string(rc.grid.n));
  flag("grid.dealias", rc.grid.dealias);
  kv("gas.kind", rc.gas.kind);
  num("gas.R", rc.gas.R);
  kv("gas.cv", list_text(rc.gas.cv));
  num("gas.a0", rc.gas.a0);
  num("gas.b0", rc.gas.b0);
  if (!rc.gas.table.empty()) kv("gas.table", rc.gas.table);
  num("gas.P_ref", rc.gas.P_ref);
  num("gas.T_ref", rc.gas.T_ref);
  num("transport.k0", rc.transport.k.c0);
  num("transport.k1", rc.transport.k.c1);
  num("transport.zeta0", rc.transport.zeta.c0);
  num("transport.zeta1", rc.transport.zeta.c1);
  num("transport.eta0", rc.transport.eta.c0);
  num("transport.eta1", rc.transport.eta.c1);
  num("transport.D0", rc.transport.D.c0);
  num("transport.D1", rc.transport.D.c1);
  kv("model.formulation", to_string(rc.formulation));
  kv("model.species_closure", rc.species_closure == SpeciesClosure::unit ? "unit" : "density_ratio");
  num("params.eps", rc.params.eps);
  num("params.mu", rc.params.mu);
  num("params.kappa", rc.params.kappa);
  num("params.lambda", rc.params.lambda);
  kv("init.generator", rc.init.generator);
  kv("init.seed", std::to_string(rc.init.seed));
  num("init.amplitude", rc.init.amplitude);
  kv("init.band", std::to_string(rc.init.band));
  kv("init.species", std::to_string(rc.init.species));
  kv("source.kind", rc.source.kind);
  num("source.amplitude", rc.source.amplitude);
  kv("source.wavenumber", std::to_string(rc.source.wavenumber));
  num("source.omega", rc.source.omega);
  num("source.q1", rc.source.q1);
  num("source.q3", rc.source.q3);
  num("integrator.t_end", rc.integrator.t_end);
  num("integrator.cfl", rc.integrator.cfl);
  if (rc.integrator.fixed_dt) num("integrator.dt", *rc.integrator.fixed_dt);
  kv("integrator.sample_every", std::to_string(rc.integrator.sample_every));
  kv("integrator.max_steps", std::to_string(rc.integrator.max_steps));
  num("integrator.blowup_threshold", rc.integrator.blowup_threshold);
  flag("integrator.freeze_velocity", rc.integrator.freeze_velocity);
  kv("diagnostics.s", std::to_string(rc.s));
  kv("diagnostics.gamma_mode", to_string(rc.gamma_mode));
  flag("diagnostics.energy", rc.energy);
  flag("output.wall_time", rc.wall_time);
  if (cfg.sweep) {
    kv("sweep.eps", list_text(cfg.sweep->eps));
    kv("sweep.mu", list_text(cfg.sweep->mu));
    kv("sweep.kappa", list_text(cfg.sweep->kappa));
    kv("sweep.lambda", list_text(cfg.sweep->lambda));
    kv("sweep.workers", std::to_string(cfg.sweep->workers));
  }
  return o.str();
}

GasModel build_gas(const GasConfig& g) {
  if (g.kind == "ideal") return ideal_gas(g.R, g.cv, g.P_ref, g.T_ref);
  if (g.kind == "virial") {
    if (g.cv.size() != 1) throw ConfigError("gas.cv: the virial gas needs a constant C_V");
    return virial_gas(g.R, g.cv.front(), g.a0, g.b0, g.P_ref, g.T_ref);
  }
  if (g.kind == "table") {
    if (g.table.empty()) throw ConfigError("gas.table: path required for kind = table");
    try {
      return load_table_file(g.table, g.P_ref, g.T_ref);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError("gas.table: " + std::string(ex.what()));
    }
  }
  throw ConfigError("gas.kind: unknown gas model '" + g.kind + "'");
}

SourceSpec build_source(const SourceConfig& s) {
  SourceSpec src;
  if (s.kind == "prescribed") {
    src.mode = SourceSpec::Mode::prescribed;
    const double a = s.amplitude, w = s.omega;
    const int k = s.wavenumber;
    src.Q = [a, w, k](double t, const Point& x) { return a * std::cos(k * x[0] + w * t); };
  } else if (s.kind == "linear") {
    src.mode = SourceSpec::Mode::state;
    const double q1 = s.q1, q3 = s.q3;
    auto sum = [](std::span<const double> y) {
      double acc = 0.0;
      for (double v : y) acc += v;
      return acc;
    };
    src.Q1 = [q1, sum](std::span<const double> y, double, double) { return q1 * sum(y); };
    src.Q3 = [q3, sum](std::span<const double> y, double, double) { return q3 * sum(y); };
  }
  return src;
}

SimulationSetup build_setup(const RunConfig& rc) {
  SimulationSetup su;
  su.params = rc.params;
  su.gas = build_gas(rc.gas);
  su.transport = rc.transport;
  su.source = build_source(rc.source);
  su.formulation = rc.formulation;
  su.species = rc.species_closure;
  return su;
}

} // namespace lowmach
