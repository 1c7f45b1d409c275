#include "lowmach/report.hpp"

#include "lowmach/errors.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

namespace lowmach {

using nlohmann::json;

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double get_num(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json num_array(std::span<const double> xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

std::vector<double> get_array(const json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(get_num(x));
  return out;
}

json params_json(const ParamPoint& p) {
  return {{"eps", p.eps}, {"mu", p.mu}, {"kappa", p.kappa}, {"lambda", p.lambda}};
}

ParamPoint params_from(const json& j) {
  return {j.at("eps").get<double>(), j.at("mu").get<double>(), j.at("kappa").get<double>(),
          j.at("lambda").get<double>()};
}

std::string termination_text(const SweepRecord& r) {
  return r.skipped ? "skipped" : to_string(r.termination);
}

#define LOWMACH_SOBOLEV_FIELDS(X)                                                                  \
  X(grad_p_sm1) X(grad_v_sm1) X(theta_s) X(theta_s1) X(p_s) X(p_s1) X(v_s) X(v_s1) X(grad_v_s)    \
  X(grad_v_s1) X(grad_theta_s) X(grad_theta_s1) X(grad_p_s) X(div_v_s) X(y_s) X(y_s1) X(y_s2)

json sobolev_json(const SobolevRecord& r) {
  json j;
#define X(f) j[#f] = num(r.f);
  LOWMACH_SOBOLEV_FIELDS(X)
#undef X
  return j;
}

SobolevRecord sobolev_from(const json& j) {
  SobolevRecord r;
#define X(f) r.f = get_num(j.at(#f));
  LOWMACH_SOBOLEV_FIELDS(X)
#undef X
  return r;
}

#undef LOWMACH_SOBOLEV_FIELDS

json grid_json(const GridSpec& g) { return {{"dim", g.dim}, {"n", g.n}, {"dealias", g.dealias}}; }

json state_json(const FluidState& s) {
  json v = json::array();
  for (const auto& c : s.v.components) v.push_back(num_array(c.values()));
  json y = json::array();
  for (const auto& c : s.y) y.push_back(num_array(c.values()));
  return {{"p", num_array(s.p.values())}, {"v", v}, {"theta", num_array(s.theta.values())}, {"y", y}};
}

ScalarField field_from(const GridSpec& g, const json& j) {
  auto vals = get_array(j);
  if (vals.size() != g.points()) throw ConfigError("trajectory: field size does not match the grid");
  return ScalarField(g, std::move(vals));
}

FluidState state_from(const GridSpec& g, const json& j) {
  FluidState s;
  s.p = field_from(g, j.at("p"));
  std::vector<ScalarField> comps;
  for (const auto& c : j.at("v")) comps.push_back(field_from(g, c));
  if (static_cast<int>(comps.size()) != g.dim) throw ConfigError("trajectory: velocity has wrong dimension");
  s.v = VectorField(std::move(comps));
  s.theta = field_from(g, j.at("theta"));
  for (const auto& c : j.at("y")) s.y.push_back(field_from(g, c));
  return s;
}

} // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "eps", "mu", "kappa", "lambda", "nu", "s", "realized_T", "termination", "theorem_norm_sup",
      "x_norm", "x1", "x2", "x3", "x4", "x5", "x6", "hf_norm", "lf_norm", "div_ve", "curl_gamma_v",
      "skew_residual", "balance_residual", "wall_ms"};
  return cols;
}

void write_csv(const ReportTable& table, std::ostream& out) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : table.records) {
    const auto& n = r.norms;
    std::vector<std::string> row{format_double(r.params.eps), format_double(r.params.mu),
                                 format_double(r.params.kappa), format_double(r.params.lambda),
                                 format_double(r.params.nu()), std::to_string(n.s),
                                 format_double(r.realized_T), termination_text(r),
                                 format_double(n.theorem_norm_sup), format_double(n.x_norm)};
    for (double x : n.x_components.as_array()) row.push_back(format_double(x));
    for (double x : {n.hf_norm, n.lf_norm, n.limit.div_ve_norm, n.limit.curl_gamma_v_norm, n.skew_residual,
                     n.balance_residual, r.wall_ms}) {
      row.push_back(format_double(x));
    }
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

json to_json(const ReportTable& table) {
  json recs = json::array();
  for (const auto& r : table.records) {
    const auto& n = r.norms;
    json xc;
    const auto vals = n.x_components.as_array();
    for (std::size_t i = 0; i < vals.size(); ++i) xc[XNormComponents::names()[i]] = num(vals[i]);
    json norms{{"theorem_norm_sup", num(n.theorem_norm_sup)},
               {"x_norm", num(n.x_norm)},
               {"x_components", xc},
               {"hf_norm", num(n.hf_norm)},
               {"lf_norm", num(n.lf_norm)},
               {"div_ve", num(n.limit.div_ve_norm)},
               {"curl_gamma_v", num(n.limit.curl_gamma_v_norm)},
               {"skew_residual", num(n.skew_residual)},
               {"balance_residual", num(n.balance_residual)},
               {"z_norm", n.z_norm ? num(*n.z_norm) : json(nullptr)}};
    recs.push_back({{"params", params_json(r.params)},
                    {"nu", r.params.nu()},
                    {"s", n.s},
                    {"skipped", r.skipped},
                    {"termination", to_string(r.termination)},
                    {"message", r.message},
                    {"realized_T", num(r.realized_T)},
                    {"wall_ms", num(r.wall_ms)},
                    {"norms", norms}});
  }
  return {{"schema_version", ReportTable::schema_version},
          {"config", table.config},
          {"boundedness_ratio", table.boundedness_ratio ? num(*table.boundedness_ratio) : json(nullptr)},
          {"records", recs}};
}

ReportTable table_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != ReportTable::schema_version) {
      throw ConfigError("report: unsupported schema_version " + j.at("schema_version").dump());
    }
    ReportTable t;
    t.config = j.at("config").get<std::string>();
    if (!j.at("boundedness_ratio").is_null()) t.boundedness_ratio = j.at("boundedness_ratio").get<double>();
    for (const auto& jr : j.at("records")) {
      SweepRecord r;
      r.params = params_from(jr.at("params"));
      r.skipped = jr.at("skipped").get<bool>();
      r.termination = termination_from_string(jr.at("termination").get<std::string>());
      r.message = jr.at("message").get<std::string>();
      r.realized_T = get_num(jr.at("realized_T"));
      r.wall_ms = get_num(jr.at("wall_ms"));
      const auto& jn = jr.at("norms");
      NormReport& n = r.norms;
      n.s = jr.at("s").get<int>();
      n.params = r.params;
      n.theorem_norm_sup = get_num(jn.at("theorem_norm_sup"));
      n.x_norm = get_num(jn.at("x_norm"));
      const auto& xc = jn.at("x_components");
      double* slots[] = {&n.x_components.grad_sup, &n.x_components.hybrid_sup, &n.x_components.viscous_l2,
                         &n.x_components.heat_l2, &n.x_components.pressure_l2, &n.x_components.div_l2};
      for (std::size_t i = 0; i < 6; ++i) *slots[i] = get_num(xc.at(XNormComponents::names()[i]));
      n.hf_norm = get_num(jn.at("hf_norm"));
      n.lf_norm = get_num(jn.at("lf_norm"));
      n.limit.div_ve_norm = get_num(jn.at("div_ve"));
      n.limit.curl_gamma_v_norm = get_num(jn.at("curl_gamma_v"));
      n.skew_residual = get_num(jn.at("skew_residual"));
      n.balance_residual = get_num(jn.at("balance_residual"));
      if (!jn.at("z_norm").is_null()) n.z_norm = jn.at("z_norm").get<double>();
      t.records.push_back(std::move(r));
    }
    return t;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("report: ") + ex.what());
  }
}

std::string write_report(const ReportTable& table, const std::string& dir, const std::string& format) {
  std::filesystem::create_directories(dir);
  if (format == "csv") {
    const std::string path = (std::filesystem::path(dir) / "report.csv").string();
    std::ofstream out(path);
    write_csv(table, out);
    if (!out) throw Error("cannot write " + path);
    return path;
  }
  if (format == "json") {
    const std::string path = (std::filesystem::path(dir) / "report.json").string();
    std::ofstream out(path);
    out << to_json(table).dump(2) << "\n";
    if (!out) throw Error("cannot write " + path);
    return path;
  }
  throw ConfigError("unknown output format '" + format + "' (expected csv or json)");
}

json trajectory_to_json(const Trajectory& traj) {
  json states = json::array();
  for (const auto& s : traj.states) states.push_back(state_json(s));
  json records = json::array();
  for (const auto& r : traj.records) {
    records.push_back({{"t", r.t},
                       {"raw", sobolev_json(r.raw)},
                       {"high", sobolev_json(r.high)},
                       {"lf", num_array(std::array<double, 4>{r.lf_div_sm1, r.lf_div_s, r.lf_grad_sm1, r.lf_grad_s})}});
  }
  const GridSpec grid = traj.states.empty() ? GridSpec{} : traj.states.front().grid();
  return {{"schema_version", 1},
          {"grid", grid_json(grid)},
          {"params", params_json(traj.params)},
          {"termination", to_string(traj.termination)},
          {"message", traj.message},
          {"t_final", num(traj.t_final)},
          {"times", num_array(traj.times)},
          {"dt_history", num_array(traj.dt_history)},
          {"record_s", traj.record_s},
          {"records", records},
          {"states", states}};
}

Trajectory trajectory_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != 1) throw ConfigError("trajectory: unsupported schema_version");
    Trajectory t;
    GridSpec g;
    g.dim = j.at("grid").at("dim").get<int>();
    g.n = j.at("grid").at("n").get<int>();
    g.dealias = j.at("grid").at("dealias").get<bool>();
    g.validate();
    t.params = params_from(j.at("params"));
    t.termination = termination_from_string(j.at("termination").get<std::string>());
    t.message = j.at("message").get<std::string>();
    t.t_final = get_num(j.at("t_final"));
    t.times = get_array(j.at("times"));
    t.dt_history = get_array(j.at("dt_history"));
    t.record_s = j.at("record_s").get<int>();
    for (const auto& jr : j.at("records")) {
      StepRecord r;
      r.t = jr.at("t").get<double>();
      r.raw = sobolev_from(jr.at("raw"));
      r.high = sobolev_from(jr.at("high"));
      const auto lf = get_array(jr.at("lf"));
      if (lf.size() != 4) throw ConfigError("trajectory: malformed step record");
      r.lf_div_sm1 = lf[0];
      r.lf_div_s = lf[1];
      r.lf_grad_sm1 = lf[2];
      r.lf_grad_s = lf[3];
      t.records.push_back(r);
    }
    for (const auto& js : j.at("states")) t.states.push_back(state_from(g, js));
    if (t.states.size() != t.times.size()) throw ConfigError("trajectory: times and states differ in length");
    return t;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("trajectory: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("trajectory: ") + ex.what());
  }
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << trajectory_to_json(traj).dump() << "\n";
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError("trajectory '" + path + "': " + ex.what());
  }
  return trajectory_from_json(j);
}

} // namespace lowmach
