#include "inertdrift/cli.hpp"

#include <boost/version.hpp>

#include <fstream>
#include <ostream>

#include "csv.hpp"
#include "inertdrift/histogram.hpp"
#include "json.hpp"

namespace inertdrift {

using nlohmann::ordered_json;

namespace {

namespace fs = std::filesystem;

bool any_failed(const TestReport& r, bool strict) {
  if (r.failed(strict)) return true;
  for (const auto& c : r.components)
    if (any_failed(c, strict)) return true;
  return false;
}

ordered_json versions() {
  ordered_json v;
  v["inertdrift"] = kVersion;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["boost"] = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
               std::to_string(BOOST_VERSION % 100);
#if defined(__clang__)
  v["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  v["compiler"] = std::string("gcc ") + __VERSION__;
#else
  v["compiler"] = "unknown";
#endif
  return v;
}

ordered_json report_json(const TestReport& r) {
  ordered_json j;
  j["name"] = r.name;
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  j["pass"] = r.pass;
  j["inconclusive"] = r.inconclusive;
  if (!r.components.empty()) {
    j["components"] = ordered_json::array();
    for (const auto& c : r.components) j["components"].push_back(report_json(c));
  }
  return j;
}

ordered_json diagnostics_json(const TrajectoryBatch& b) {
  ordered_json d;
  d["paths"] = b.paths.size();
  d["snapshots"] = b.snapshots.size();
  d["boundary_overflow"] = b.diagnostics.boundary_overflow;
  d["reflect_failure"] = b.diagnostics.reflect_failure;
  d["weight_overflow"] = b.diagnostics.weight_overflow;
  d["one_sided_drift_paths"] = b.diagnostics.one_sided_drift_paths;
  d["substeps"] = b.diagnostics.substeps;
  return d;
}

// Single writer for one output directory: every file goes through here so the
// manifest can list outputs in creation order.
class OutputDirectory {
 public:
  OutputDirectory(const RunConfig& cfg, std::string command) : dir_(cfg.output_directory) {
    manifest_["tool"] = "inertdrift";
    manifest_["command"] = std::move(command);
    manifest_["config_id"] = cfg.config_id;
    manifest_["seed"] = cfg.simulation.seed;
    manifest_["versions"] = versions();
    manifest_["config"] = ordered_json::parse(cfg.canonical_json);
    manifest_["outputs"] = ordered_json::array();
    fs::create_directories(dir_);
  }

  template <typename Fn>
  void write(const std::string& name, Fn&& fn) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot open " + (dir_ / name).string() + " for writing");
    fn(out);
    if (!out) throw Error("write failed for " + (dir_ / name).string());
    manifest_["outputs"].push_back(name);
  }

  void record(const std::string& file) { manifest_["outputs"].push_back(file); }
  ordered_json& manifest() { return manifest_; }
  const fs::path& path() const { return dir_; }

  void finish(const std::string& status, const std::string& error = {}) {
    manifest_["status"] = status;
    if (!error.empty()) manifest_["error"] = error;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << manifest_.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  ordered_json manifest_;
};

// Shared error policy: numerical failures still leave a manifest behind.
template <typename Fn>
int guarded(OutputDirectory* out, std::ostream& log, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    if (out) out->finish("config_error", e.what());
    return kExitConfigError;
  } catch (const NumericalError& e) {
    log << "numerical error: " << e.what() << '\n';
    if (out) out->finish("numerical_error", e.what());
    return kExitNumericalError;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    if (out) out->finish("error", e.what());
    return kExitIoError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    if (out) out->finish("error", e.what());
    return kExitIoError;
  }
}

bool selected(const RunConfig& cfg, const std::string& test) {
  return std::find(cfg.tests.begin(), cfg.tests.end(), test) != cfg.tests.end();
}

struct ResidualRow {
  std::string f_id;
  double residual;
  bool pass;
};

std::vector<ResidualRow> compute_residuals(const RunConfig& cfg) {
  const CoefficientSet cs = cfg.build_coefficients();
  const Potential pot = cfg.build_potential();
  const StationaryMeasure sm = StationaryMeasure::gradient(cs, pot);
  std::vector<ResidualRow> rows;
  for (const auto& f : default_test_basis(cs.domain(), cs.gamma())) {
    const ResidualResult r = stationarity_residual(cs, pot, f, sm, cfg.residual.options);
    rows.push_back({f.id, r.value, std::abs(r.value) <= cfg.residual.tolerance});
  }
  return rows;
}

void write_residuals(std::ostream& out, const RunConfig& cfg, const std::vector<ResidualRow>& rows) {
  out << "config_id,f_id,residual,tolerance,pass\n";
  for (const auto& r : rows)
    out << cfg.config_id << ',' << r.f_id << ',' << csv::format_double(r.residual) << ','
        << csv::format_double(cfg.residual.tolerance) << ',' << (r.pass ? "true" : "false") << '\n';
}

TestReport residual_report(const RunConfig& cfg, const std::vector<ResidualRow>& rows) {
  TestReport r;
  r.name = "residual";
  r.sample_size = rows.size();
  for (const auto& row : rows) {
    TestReport c;
    c.name = row.f_id;
    c.statistic = std::abs(row.residual);
    c.estimate = row.residual;
    c.threshold = cfg.residual.tolerance;
    c.pass = c.statistic <= c.threshold;
    r.statistic = std::max(r.statistic, c.statistic);
    r.components.push_back(c);
  }
  r.threshold = cfg.residual.tolerance;
  r.pass = r.statistic <= r.threshold;
  return r;
}

}  // namespace

int run_pipeline(const RunConfig& cfg, const RunOptions& options, std::ostream& log) {
  OutputDirectory out(cfg, options.dry_run ? "run --dry-run" : "run");
  const bool strict = options.strict.value_or(cfg.strict);
  return guarded(&out, log, [&] {
    if (options.dry_run) {
      out.finish("dry_run");
      log << "dry run: manifest written to " << (out.path() / "manifest.json").string() << '\n';
      return static_cast<int>(kExitOk);
    }
    const CoefficientSet cs = cfg.build_coefficients();
    const StationaryMeasure sm = cfg.build_stationary();
    SimConfig sim = cfg.simulation;
    if (cfg.initial.kind == "stationary") {
      sim.initial.sampler = stationary_initial_sampler(sm);
      sim.initial.description = "stationary";
    } else {
      sim.initial.x = cfg.initial.x;
      sim.initial.k = cfg.initial.k;
      sim.initial.description = "fixed";
    }
    log << "simulating " << sim.n_paths << " paths to t = " << sim.t_end << " (" << to_string(sim.family)
        << ")\n";
    const TrajectoryBatch batch = sim.family == Family::gradient ? run_ensemble(cs, cfg.build_potential(), sim)
                                                                 : run_ensemble(cs, sim);
    out.manifest()["diagnostics"] = diagnostics_json(batch);
    out.write("trajectories.csv", [&](std::ostream& o) { write_batch_csv(o, batch); });

    std::vector<TestReport> reports;
    if (selected(cfg, "ks"))
      for (int j = 0; j < cfg.dimension; ++j) reports.push_back(ks_uniformity(batch, sm, j));
    if (selected(cfg, "k_moments")) reports.push_back(k_moment_tests(batch, sm));
    if (selected(cfg, "independence")) reports.push_back(independence_test(batch));
    if (selected(cfg, "sectors")) reports.push_back(sector_uniformity(batch, cs.domain().centroid()));
    if (selected(cfg, "non_explosion")) reports.push_back(non_explosion_check(batch));
    if (selected(cfg, "residual")) {
      const auto rows = compute_residuals(cfg);
      out.write("residuals.csv", [&](std::ostream& o) { write_residuals(o, cfg, rows); });
      reports.push_back(residual_report(cfg, rows));
    }
    if (selected(cfg, "histogram"))
      for (const auto& p : emit_histograms(batch, sm, cfg.histogram_bins, out.path()))
        out.record(p.filename().string());
    out.write("report.csv", [&](std::ostream& o) { write_report_csv(o, reports); });

    bool failed = false;
    out.manifest()["tests"] = ordered_json::array();
    for (const auto& r : reports) {
      out.manifest()["tests"].push_back(report_json(r));
      const bool f = any_failed(r, strict);
      failed = failed || f;
      log << (f ? "FAIL " : (r.inconclusive ? "INCONCLUSIVE " : "PASS ")) << r.name << " statistic "
          << csv::format_double(r.statistic) << " threshold " << csv::format_double(r.threshold) << '\n';
    }
    out.manifest()["strict"] = strict;
    out.finish(failed ? "tests_failed" : "ok");
    return static_cast<int>(failed ? kExitTestFailure : kExitOk);
  });
}

int skorokhod_command(const RunConfig& cfg, const fs::path& input, const fs::path& output, std::ostream& log) {
  return guarded(nullptr, log, [&] {
    std::ifstream in(input);
    if (!in) throw Error("cannot read " + input.string());
    const DrivingPath f = read_path_csv(in);
    const ConstrainedPath g = solve_skorokhod(cfg.build_domain(), f);
    if (!output.parent_path().empty()) fs::create_directories(output.parent_path());
    std::ofstream out(output, std::ios::binary);
    if (!out) throw Error("cannot write " + output.string());
    write_constrained_path_csv(out, g);
    log << "solved " << f.times.size() << " points; final local time "
        << csv::format_double(g.ell.empty() ? 0.0 : g.ell.back()) << '\n';
    return static_cast<int>(kExitOk);
  });
}

int residual_command(const RunConfig& cfg, std::ostream& log) {
  OutputDirectory out(cfg, "residual");
  return guarded(&out, log, [&] {
    const auto rows = compute_residuals(cfg);
    out.write("residuals.csv", [&](std::ostream& o) { write_residuals(o, cfg, rows); });
    const TestReport r = residual_report(cfg, rows);
    out.manifest()["tests"] = ordered_json::array({report_json(r)});
    for (const auto& row : rows)
      log << (row.pass ? "PASS " : "FAIL ") << row.f_id << " residual " << csv::format_double(row.residual)
          << '\n';
    out.finish(r.pass ? "ok" : "tests_failed");
    return static_cast<int>(r.pass ? kExitOk : kExitTestFailure);
  });
}

int sweep_command(const RunConfig& cfg, std::ostream& log) {
  OutputDirectory out(cfg, "sweep");
  return guarded(&out, log, [&] {
    SweepOptions opt;
    opt.sim = cfg.simulation;
    opt.margin = cfg.sweep.margin;
    opt.regularization = cfg.potential.regularization;
    const SweepReport sr = weak_convergence_sweep(cfg.build_coefficients(), cfg.sweep.n_list, opt);
    out.write("sweep.csv", [&](std::ostream& o) {
      o << "n,distance,mass\n";
      for (std::size_t i = 0; i < sr.n_list.size(); ++i)
        o << sr.n_list[i] << ',' << csv::format_double(sr.distances[i]) << ',' << csv::format_double(sr.masses[i])
          << '\n';
    });
    out.write("report.csv", [&](std::ostream& o) { write_report_csv(o, {sr.report}); });
    out.manifest()["noise_floor"] = sr.noise_floor;
    out.manifest()["limit_mass"] = sr.limit_mass;
    out.manifest()["tests"] = ordered_json::array({report_json(sr.report)});
    const bool failed = any_failed(sr.report, cfg.strict);
    log << sr.report.detail << '\n' << (failed ? "FAIL" : (sr.report.inconclusive ? "INCONCLUSIVE" : "PASS"))
        << " weak_convergence\n";
    out.finish(failed ? "tests_failed" : "ok");
    return static_cast<int>(failed ? kExitTestFailure : kExitOk);
  });
}

int histogram_command(const RunConfig& cfg, const fs::path& batch_csv, int bins, const fs::path& directory,
                      std::ostream& log) {
  return guarded(nullptr, log, [&] {
    std::ifstream in(batch_csv);
    if (!in) throw Error("cannot read " + batch_csv.string());
    const TrajectoryBatch batch = read_batch_csv(in);
    const StationaryMeasure sm = cfg.build_stationary();
    for (const auto& p : emit_histograms(batch, sm, bins, directory)) log << "wrote " << p.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace inertdrift
