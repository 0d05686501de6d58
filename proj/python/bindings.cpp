#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "inertdrift/analysis.hpp"
#include "inertdrift/cli.hpp"
#include "inertdrift/config.hpp"
#include "inertdrift/skorokhod.hpp"
#include "inertdrift/stationary.hpp"

namespace py = pybind11;
using namespace inertdrift;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vec to_vec(const std::vector<double>& v) {
  if (v.empty() || static_cast<int>(v.size()) > kMaxDim)
    throw py::value_error("expected 1 to " + std::to_string(kMaxDim) + " coordinates");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_vec(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Mat to_mat(const std::vector<std::vector<double>>& rows) {
  const int d = static_cast<int>(rows.size());
  if (d < 1 || d > kMaxDim) throw py::value_error("matrix dimension out of range");
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d) throw py::value_error("matrix must be square");
    for (int j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

// Rows of an (n, d) array as points.
std::vector<Vec> to_points(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-d array of shape (n, d)");
  const auto n = a.shape(0), d = a.shape(1);
  if (d < 1 || d > kMaxDim) throw py::value_error("point dimension out of range");
  auto r = a.unchecked<2>();
  std::vector<Vec> out(n, Vec(d));
  for (py::ssize_t i = 0; i < n; ++i)
    for (py::ssize_t j = 0; j < d; ++j) out[i][j] = r(i, j);
  return out;
}

Array from_points(const std::vector<Vec>& pts, int d) {
  Array a({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(d)});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int j = 0; j < d; ++j) w(i, j) = pts[i][j];
  return a;
}

py::dict batch_to_dict(const TrajectoryBatch& b) {
  std::vector<Vec> xs, ks;
  std::vector<double> t, ell, logw;
  std::vector<int> ids;
  for (const auto& s : b.snapshots) {
    xs.push_back(s.x);
    ks.push_back(s.k);
    t.push_back(s.t);
    ell.push_back(s.ell);
    logw.push_back(s.log_weight);
    ids.push_back(s.path_id);
  }
  py::dict d;
  d["path_id"] = py::array(py::cast(ids));
  d["t"] = py::array(py::cast(t));
  d["x"] = from_points(xs, b.dim);
  d["k"] = from_points(ks, b.dim);
  d["ell"] = py::array(py::cast(ell));
  d["log_weight"] = py::array(py::cast(logw));
  d["boundary_overflow"] = b.diagnostics.boundary_overflow;
  d["reflect_failure"] = b.diagnostics.reflect_failure;
  d["weight_overflow"] = b.diagnostics.weight_overflow;
  return d;
}

TrajectoryBatch dict_free_batch(const Array& x, const Array& k) {
  return TrajectoryBatch::from_samples(to_points(x), to_points(k));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reflecting diffusions with inert drift: simulation and stationary-law checks";
  m.attr("__version__") = kVersion;

  // Later registrations are tried first, so the base goes first.
  const auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::class_<Domain>(m, "Domain")
      .def_static("interval", &Domain::interval, py::arg("lower"), py::arg("upper"))
      .def_static("ball", [](const std::vector<double>& c, double r) { return Domain::ball(to_vec(c), r); },
                  py::arg("center"), py::arg("radius"))
      .def_static("box", [](const std::vector<double>& lo, const std::vector<double>& hi) {
        return Domain::box(to_vec(lo), to_vec(hi));
      }, py::arg("lower"), py::arg("upper"))
      .def_static("ellipsoid", [](const std::vector<double>& c, const std::vector<double>& a) {
        return Domain::ellipsoid(to_vec(c), to_vec(a));
      }, py::arg("center"), py::arg("semi_axes"))
      .def_property_readonly("dim", &Domain::dim)
      .def_property_readonly("kind", [](const Domain& d) { return std::string(to_string(d.kind())); })
      .def_property_readonly("diameter", &Domain::diameter)
      .def_property_readonly("inradius", &Domain::inradius)
      .def("signed_distance", [](const Domain& d, const std::vector<double>& x) { return d.signed_distance(to_vec(x)); })
      .def("inside", [](const Domain& d, const std::vector<double>& x) { return d.inside(to_vec(x)); })
      .def("project_to_boundary", [](const Domain& d, const std::vector<double>& x) {
        return from_vec(d.project_to_boundary(to_vec(x)));
      })
      .def("inward_normal", [](const Domain& d, const std::vector<double>& x) {
        return from_vec(d.inward_normal(to_vec(x)));
      });

  py::class_<RegularizedDistance>(m, "RegularizedDistance")
      .def(py::init([](const Domain& d) { return RegularizedDistance(d); }), py::arg("domain"))
      .def("value", [](const RegularizedDistance& r, const std::vector<double>& x) { return r.value(to_vec(x)); })
      .def("gradient", [](const RegularizedDistance& r, const std::vector<double>& x) {
        return from_vec(r.gradient(to_vec(x)));
      })
      .def_property_readonly("c_lower", &RegularizedDistance::c_lower)
      .def_property_readonly("c_upper", &RegularizedDistance::c_upper);

  py::class_<CoefficientSet>(m, "CoefficientSet")
      .def_static("identity", [](const Domain& d, const std::vector<std::vector<double>>& g) {
        return CoefficientSet::identity(d, to_mat(g));
      }, py::arg("domain"), py::arg("gamma"))
      .def_static("exp_density", [](const Domain& d, const std::vector<std::vector<double>>& g) {
        return CoefficientSet::exp_density(d, to_mat(g));
      }, py::arg("domain"), py::arg("gamma"))
      .def_static("anisotropic", [](const Domain& d, const std::vector<double>& diag,
                                    const std::vector<std::vector<double>>& g) {
        return CoefficientSet::anisotropic(d, to_vec(diag), to_mat(g));
      }, py::arg("domain"), py::arg("diagonal"), py::arg("gamma"))
      .def_property_readonly("dim", &CoefficientSet::dim)
      .def("density", [](const CoefficientSet& c, const std::vector<double>& x) { return c.density(to_vec(x)); })
      .def("drift_b", [](const CoefficientSet& c, const std::vector<double>& x) {
        return from_vec(c.drift_b(to_vec(x)).value);
      });

  py::class_<Potential>(m, "Potential")
      .def_static("regularized", [](const Domain& d, int n) {
        return Potential::regularized_vn(RegularizedDistance(d), n);
      }, py::arg("domain"), py::arg("n"))
      .def("value", [](const Potential& p, const std::vector<double>& x) { return p.value(to_vec(x)); })
      .def("gradient", [](const Potential& p, const std::vector<double>& x) {
        return from_vec(p.gradient(to_vec(x)));
      });

  m.def("solve_skorokhod", [](const Domain& d, const std::vector<double>& t, const Array& f) {
    DrivingPath path{t, to_points(f)};
    const ConstrainedPath g = solve_skorokhod(d, path);
    return py::make_tuple(from_points(g.g, d.dim()), py::array(py::cast(g.ell)));
  }, py::arg("domain"), py::arg("times"), py::arg("values"),
        "Returns (g, ell) for a piecewise-linear driving path of shape (n, d).");

  m.def("simulate", [](const CoefficientSet& cs, const std::string& family, double dt, double t_end,
                       double burn_in, int n_paths, std::uint64_t seed, double stride,
                       std::optional<int> n, const std::vector<double>& x0) {
    SimConfig cfg;
    cfg.dt_base = dt;
    cfg.t_end = t_end;
    cfg.burn_in = burn_in;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    cfg.snapshot_stride = stride;
    cfg.initial.x = x0.empty() ? cs.domain().centroid() : to_vec(x0);
    cfg.initial.k = Vec::Zero(cs.dim());
    TrajectoryBatch b;
    {
      py::gil_scoped_release release;
      if (family == "gradient") {
        if (!n) throw ConfigError("n", "the gradient family needs a potential index");
        cfg.family = Family::gradient;
        b = run_ensemble(cs, Potential::regularized_vn(RegularizedDistance(cs.domain()), *n), cfg);
      } else {
        cfg.family = family == "reflected_reweighted" ? Family::reflected_reweighted : Family::reflected;
        if (family != "reflected" && family != "reflected_reweighted")
          throw ConfigError("family", "unknown family '" + family + "'");
        b = run_ensemble(cs, cfg);
      }
    }
    return batch_to_dict(b);
  }, py::arg("coefficients"), py::arg("family") = "reflected", py::arg("dt") = 1e-3, py::arg("t_end") = 1.0,
        py::arg("burn_in") = 0.0, py::arg("n_paths") = 1, py::arg("seed") = 0, py::arg("stride") = 0.0,
        py::arg("n") = py::none(), py::arg("x0") = std::vector<double>{});

  py::class_<StationaryMeasure>(m, "StationaryMeasure")
      .def_static("reflected", [](const CoefficientSet& cs) { return StationaryMeasure::reflected(cs); })
      .def_static("gradient", [](const CoefficientSet& cs, const Potential& p) {
        return StationaryMeasure::gradient(cs, p);
      })
      .def_property_readonly("x_normalizer", &StationaryMeasure::x_normalizer)
      .def_property_readonly("y_normalizer", &StationaryMeasure::y_normalizer)
      .def("x_marginal_cdf", &StationaryMeasure::x_marginal_cdf, py::arg("coordinate"), py::arg("value"))
      .def("sample", [](const StationaryMeasure& sm, std::size_t n, std::uint64_t seed) {
        const StationarySample s = sample_stationary(sm, n, seed);
        return py::make_tuple(from_points(s.x, sm.dim()), from_points(s.y, sm.dim()));
      }, py::arg("n"), py::arg("seed") = 0);

  m.def("stationarity_residuals", [](const CoefficientSet& cs, const Potential& p, int nodes, int panels) {
    const StationaryMeasure sm = StationaryMeasure::gradient(cs, p);
    ResidualOptions opt;
    if (nodes > 0) opt.nodes = nodes;
    if (panels > 0) opt.panels = panels;
    py::dict out;
    for (const auto& f : default_test_basis(cs.domain(), cs.gamma()))
      out[py::str(f.id)] = stationarity_residual(cs, p, f, sm, opt).value;
    return out;
  }, py::arg("coefficients"), py::arg("potential"), py::arg("nodes") = 0, py::arg("panels") = 0,
        "Generator residuals over the default bump basis, keyed by test-function id.");

  py::class_<TestReport>(m, "TestReport")
      .def_readonly("name", &TestReport::name)
      .def_readonly("statistic", &TestReport::statistic)
      .def_readonly("threshold", &TestReport::threshold)
      .def_readonly("sample_size", &TestReport::sample_size)
      .def_readonly("standard_error", &TestReport::standard_error)
      .def_readonly("estimate", &TestReport::estimate)
      .def_readonly("passed", &TestReport::pass)
      .def_readonly("inconclusive", &TestReport::inconclusive)
      .def_readonly("components", &TestReport::components)
      .def("__repr__", [](const TestReport& r) {
        std::ostringstream s;
        s << "TestReport(" << r.name << ", statistic=" << r.statistic << ", threshold=" << r.threshold
          << ", pass=" << (r.pass ? "True" : "False") << ")";
        return s.str();
      });

  m.def("ks_test", [](const Array& x, const Array& k, const StationaryMeasure& sm, int coordinate) {
    return ks_uniformity(dict_free_batch(x, k), sm, coordinate);
  }, py::arg("x"), py::arg("k"), py::arg("measure"), py::arg("coordinate") = 0);
  m.def("k_moment_tests", [](const Array& x, const Array& k, const StationaryMeasure& sm) {
    return k_moment_tests(dict_free_batch(x, k), sm);
  }, py::arg("x"), py::arg("k"), py::arg("measure"));
  m.def("independence_test", [](const Array& x, const Array& k) { return independence_test(dict_free_batch(x, k)); },
        py::arg("x"), py::arg("k"));
  m.def("wasserstein1", [](std::vector<double> a, std::vector<double> b) { return wasserstein1(std::move(a), std::move(b)); });
  m.def("sliced_wasserstein1", [](const Array& a, const Array& b, int projections) {
    return sliced_wasserstein1(to_points(a), to_points(b), projections);
  }, py::arg("a"), py::arg("b"), py::arg("projections") = 32);

  m.def("run", [](const std::string& config_path, const std::string& output_root, bool dry_run) {
    const RunConfig cfg = load_run_config(config_path, output_root.empty() ? default_output_root() : std::filesystem::path(output_root));
    RunOptions opt;
    opt.dry_run = dry_run;
    std::ostringstream log;
    int code;
    {
      py::gil_scoped_release release;
      code = run_pipeline(cfg, opt, log);
    }
    return py::make_tuple(code, log.str(), cfg.output_directory.string());
  }, py::arg("config"), py::arg("output_root") = "", py::arg("dry_run") = false,
        "Runs a JSON configuration; returns (exit_code, log, output_directory).");
}
