#include "lowmach/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <thread>
#include <tuple>

namespace lowmach {

namespace {

DiagnosticsSpec diagnostics_spec(const RunConfig& rc) {
  DiagnosticsSpec spec;
  spec.s = rc.s;
  spec.gamma_mode = rc.gamma_mode;
  spec.energy = rc.energy;
  return spec;
}

SimulationSetup setup_at(const RunConfig& rc, const ParamPoint& params) {
  SimulationSetup su = build_setup(rc);
  su.params = params;
  return su;
}

// The generated data depend on eps only for theta-small and on kappa only
// for well-prepared; everything else shares one draw.
std::pair<double, double> init_key(const RunConfig& rc, const ParamPoint& p) {
  return {rc.init.generator == "theta-small" ? p.eps : 0.0,
          rc.init.generator == "well-prepared" ? p.kappa : 0.0};
}

} // namespace

SweepRecord run_point(const RunConfig& rc, const ParamPoint& params, const FluidState& initial,
                      Trajectory* keep) {
  SweepRecord rec;
  rec.params = params;
  rec.norms.s = rc.s;
  rec.norms.params = params;
  const auto start = std::chrono::steady_clock::now();
  try {
    const SimulationSetup su = setup_at(rc, params);
    IntegratorConfig ic = rc.integrator;
    ic.record_s = rc.s;
    Trajectory traj = simulate(initial, su, ic);
    rec.termination = traj.termination;
    rec.message = traj.message;
    rec.realized_T = traj.t_final;
    if (traj.states.size() >= 2) {
      rec.norms = make_norm_report(traj, su, diagnostics_spec(rc));
    }
    if (keep) *keep = std::move(traj);
  } catch (const std::exception& ex) {
    rec.termination = Termination::failed;
    rec.message = ex.what();
  }
  if (rc.wall_time) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

SweepRecord run_single(const RunConfig& rc, Trajectory* keep) {
  FluidState initial;
  try {
    initial = make_initial_data(rc.init, rc.grid, setup_at(rc, rc.params));
  } catch (const std::exception& ex) {
    SweepRecord rec;
    rec.params = rc.params;
    rec.norms.params = rc.params;
    rec.termination = Termination::failed;
    rec.message = std::string("initial data: ") + ex.what();
    return rec;
  }
  return run_point(rc, rc.params, initial, keep);
}

std::vector<ParamPoint> sweep_points(const SweepAxes& axes) {
  std::vector<ParamPoint> pts;
  for (double e : axes.eps)
    for (double m : axes.mu)
      for (double k : axes.kappa)
        for (double l : axes.lambda) pts.push_back({e, m, k, l});
  std::sort(pts.begin(), pts.end(), [](const ParamPoint& a, const ParamPoint& b) {
    return std::tie(a.eps, a.mu, a.kappa, a.lambda) < std::tie(b.eps, b.mu, b.kappa, b.lambda);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const ParamPoint& a, const ParamPoint& b) {
                          return a.eps == b.eps && a.mu == b.mu && a.kappa == b.kappa && a.lambda == b.lambda;
                        }),
            pts.end());
  return pts;
}

ReportTable run_sweep(const ParsedConfig& cfg, int workers) {
  const RunConfig& rc = cfg.run;
  const SweepAxes axes = cfg.sweep ? *cfg.sweep : SweepAxes{{rc.params.eps}, {rc.params.mu}, {rc.params.kappa}, {rc.params.lambda}, 1};
  if (workers <= 0) workers = axes.workers;

  ReportTable table;
  table.config = canonical_config(cfg);
  const auto points = sweep_points(axes);
  table.records.resize(points.size());

  // Initial data are generated up front, sequentially, so that results do
  // not depend on the worker count.
  std::map<std::pair<double, double>, std::optional<FluidState>> initial;
  std::map<std::pair<double, double>, std::string> init_error;
  const bool combustion = rc.formulation == Formulation::combustion;
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < points.size(); ++i) {
    SweepRecord& rec = table.records[i];
    rec.params = points[i];
    rec.norms.s = rc.s;
    rec.norms.params = points[i];
    if (combustion && points[i].lambda < points[i].nu()) {
      rec.skipped = true;
      rec.message = "skipped: combustion requires lambda >= nu = " + format_double(points[i].nu());
      continue;
    }
    const auto key = init_key(rc, points[i]);
    if (!initial.count(key)) {
      try {
        initial[key] = make_initial_data(rc.init, rc.grid, setup_at(rc, points[i]));
      } catch (const std::exception& ex) {
        initial[key] = std::nullopt;
        init_error[key] = std::string("initial data: ") + ex.what();
      }
    }
    if (!initial[key]) {
      rec.termination = Termination::failed;
      rec.message = init_error[key];
      continue;
    }
    todo.push_back(i);
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j = next++; j < todo.size(); j = next++) {
      const std::size_t i = todo[j];
      table.records[i] = run_point(rc, points[i], *initial.at(init_key(rc, points[i])));
    }
  };
  const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(todo.size())));
  if (nthreads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  table.boundedness_ratio = boundedness_ratio(table.records);
  return table;
}

std::optional<double> boundedness_ratio(const std::vector<SweepRecord>& records) {
  std::map<std::tuple<double, double, double>, std::pair<double, double>> range;
  std::map<std::tuple<double, double, double>, int> count;
  for (const auto& r : records) {
    if (r.skipped || r.termination != Termination::completed) continue;
    const auto key = std::make_tuple(r.params.mu, r.params.kappa, r.params.lambda);
    const double v = r.norms.theorem_norm_sup;
    auto [it, fresh] = range.try_emplace(key, v, v);
    if (!fresh) {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
    ++count[key];
  }
  std::optional<double> worst;
  for (const auto& [key, mm] : range) {
    if (count[key] < 2 || !(mm.first > 0.0)) continue;
    const double ratio = mm.second / mm.first;
    if (!worst || ratio > *worst) worst = ratio;
  }
  return worst;
}

int sweep_exit_code(const ReportTable& table) {
  int ran = 0, failed = 0;
  for (const auto& r : table.records) {
    if (r.skipped) continue;
    ++ran;
    if (r.termination != Termination::completed) ++failed;
  }
  if (failed == 0) return 0;
  return failed == ran ? 2 : 3;
}

} // namespace lowmach
