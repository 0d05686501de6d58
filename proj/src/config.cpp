#include "inertdrift/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace inertdrift {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  const json* v = find(obj, key);
  if (!v) throw ConfigError(join(path, key), "missing required field");
  return *v;
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "expected an object");
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

double positive(const json& v, const std::string& path) {
  const double d = as_double(v, path);
  if (!(d > 0.0)) throw ConfigError(path, "must be positive");
  return d;
}

long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<long long>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
  return v.get<bool>();
}

Vec as_vec(const json& v, int d, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of " + std::to_string(d) + " numbers");
  if (static_cast<int>(v.size()) != d)
    throw ConfigError(path, "expected " + std::to_string(d) + " entries, got " + std::to_string(v.size()));
  Vec out(d);
  for (int i = 0; i < d; ++i) out[i] = as_double(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

// Full d x d matrix given as nested rows; a bare number is accepted for d = 1.
Mat as_mat(const json& v, int d, const std::string& path) {
  Mat out(d, d);
  if (d == 1 && v.is_number()) {
    out(0, 0) = v.get<double>();
    return out;
  }
  if (!v.is_array() || static_cast<int>(v.size()) != d)
    throw ConfigError(path, "expected " + std::to_string(d) + " rows");
  for (int i = 0; i < d; ++i) {
    const std::string row = path + "[" + std::to_string(i) + "]";
    const Vec r = as_vec(v[i], d, row);
    out.row(i) = r.transpose();
  }
  return out;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
      throw ConfigError(join(path, it.key()), "unknown field");
  }
}

DomainSpec parse_domain(const json& v, int d) {
  const std::string path = "domain";
  require_object(v, path);
  DomainSpec s;
  s.kind = as_string(require(v, "kind", path), "domain.kind");
  if (s.kind == "interval") {
    reject_unknown(v, path, {"kind", "lower", "upper"});
    if (d != 1) throw ConfigError("domain.kind", "interval requires dimension 1");
    s.lower = Vec::Constant(1, as_double(require(v, "lower", path), "domain.lower"));
    s.upper = Vec::Constant(1, as_double(require(v, "upper", path), "domain.upper"));
  } else if (s.kind == "box") {
    reject_unknown(v, path, {"kind", "lower", "upper"});
    s.lower = as_vec(require(v, "lower", path), d, "domain.lower");
    s.upper = as_vec(require(v, "upper", path), d, "domain.upper");
  } else if (s.kind == "ball") {
    reject_unknown(v, path, {"kind", "center", "radius"});
    s.center = as_vec(require(v, "center", path), d, "domain.center");
    s.radius = positive(require(v, "radius", path), "domain.radius");
  } else if (s.kind == "ellipsoid") {
    reject_unknown(v, path, {"kind", "center", "semi_axes"});
    s.center = as_vec(require(v, "center", path), d, "domain.center");
    s.semi_axes = as_vec(require(v, "semi_axes", path), d, "domain.semi_axes");
  } else {
    throw ConfigError("domain.kind", "unknown kind '" + s.kind + "' (interval, ball, box, ellipsoid)");
  }
  return s;
}

CoefficientSpec parse_coefficients(const json& v, int d) {
  const std::string path = "coefficients";
  require_object(v, path);
  reject_unknown(v, path, {"preset", "diagonal", "gamma", "conormal", "inert_field", "a0"});
  CoefficientSpec s;
  if (const json* p = find(v, "preset")) s.preset = as_string(*p, "coefficients.preset");
  if (s.preset != "identity" && s.preset != "exp_density" && s.preset != "anisotropic")
    throw ConfigError("coefficients.preset", "unknown preset '" + s.preset + "' (identity, exp_density, anisotropic)");
  if (s.preset == "anisotropic")
    s.diagonal = as_vec(require(v, "diagonal", path), d, "coefficients.diagonal");
  else if (find(v, "diagonal"))
    throw ConfigError("coefficients.diagonal", "only used by the anisotropic preset");
  s.gamma = as_mat(require(v, "gamma", path), d, "coefficients.gamma");
  if ((s.gamma - s.gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("coefficients.gamma", "matrix is not symmetric");
  if (Eigen::LLT<Mat>(s.gamma).info() != Eigen::Success)
    throw ConfigError("coefficients.gamma", "matrix is not positive definite");
  if (const json* c = find(v, "conormal")) {
    const std::string conv = as_string(*c, "coefficients.conormal");
    if (conv == "full")
      s.convention = ConormalConvention::full;
    else if (conv == "half")
      s.convention = ConormalConvention::half;
    else
      throw ConfigError("coefficients.conormal", "expected 'full' or 'half'");
  }
  if (const json* f = find(v, "inert_field")) s.inert_field = as_string(*f, "coefficients.inert_field");
  if (s.inert_field != "gamma_normal" && s.inert_field != "scaled_conormal")
    throw ConfigError("coefficients.inert_field", "expected 'gamma_normal' or 'scaled_conormal'");
  if (const json* a = find(v, "a0")) s.a0 = positive(*a, "coefficients.a0");
  return s;
}

PotentialSpec parse_potential(const json& v) {
  const std::string path = "potential";
  require_object(v, path);
  reject_unknown(v, path, {"kind", "n", "cap_fraction", "sharpness"});
  PotentialSpec s;
  const std::string kind = as_string(require(v, "kind", path), "potential.kind");
  if (kind == "none") return s;
  if (kind != "regularized") throw ConfigError("potential.kind", "expected 'none' or 'regularized'");
  s.enabled = true;
  const long long n = as_integer(require(v, "n", path), "potential.n");
  if (n < 1 || n > 1000000) throw ConfigError("potential.n", "must be a positive integer");
  s.n = static_cast<int>(n);
  if (const json* c = find(v, "cap_fraction")) {
    s.regularization.cap_fraction = as_double(*c, "potential.cap_fraction");
    if (!(s.regularization.cap_fraction > 0.0 && s.regularization.cap_fraction < 1.0))
      throw ConfigError("potential.cap_fraction", "must lie in (0, 1)");
  }
  if (const json* p = find(v, "sharpness")) s.regularization.sharpness = positive(*p, "potential.sharpness");
  return s;
}

Family parse_family(const json& v) {
  const std::string f = as_string(v, "simulation.family");
  if (f == "reflected") return Family::reflected;
  if (f == "reflected_reweighted") return Family::reflected_reweighted;
  if (f == "gradient") return Family::gradient;
  throw ConfigError("simulation.family", "expected reflected, reflected_reweighted or gradient");
}

void parse_simulation(const json& v, int d, RunConfig& cfg) {
  const std::string path = "simulation";
  require_object(v, path);
  reject_unknown(v, path,
                 {"family", "dt", "t_end", "burn_in", "n_paths", "seed", "snapshot_stride", "threads",
                  "initial", "adaptive", "h_max"});
  SimConfig& s = cfg.simulation;
  if (const json* f = find(v, "family")) s.family = parse_family(*f);
  s.dt_base = positive(require(v, "dt", path), "simulation.dt");
  s.t_end = positive(require(v, "t_end", path), "simulation.t_end");
  // Default burn-in is 20% of the horizon.
  s.burn_in = 0.2 * s.t_end;
  if (const json* b = find(v, "burn_in")) s.burn_in = as_double(*b, "simulation.burn_in");
  if (s.burn_in < 0.0 || s.burn_in >= s.t_end)
    throw ConfigError("simulation.burn_in", "must lie in [0, t_end)");
  const long long paths = as_integer(require(v, "n_paths", path), "simulation.n_paths");
  if (paths < 1 || paths > 100000000) throw ConfigError("simulation.n_paths", "must be a positive integer");
  s.n_paths = static_cast<int>(paths);
  if (const json* seed = find(v, "seed")) {
    if (!seed->is_number_unsigned()) throw ConfigError("simulation.seed", "expected a non-negative integer");
    s.seed = seed->get<std::uint64_t>();
  }
  if (const json* st = find(v, "snapshot_stride")) s.snapshot_stride = as_double(*st, "simulation.snapshot_stride");
  if (const json* th = find(v, "threads")) {
    const long long t = as_integer(*th, "simulation.threads");
    if (t < 1 || t > 1024) throw ConfigError("simulation.threads", "must be between 1 and 1024");
    s.n_threads = static_cast<int>(t);
  }
  if (const json* a = find(v, "adaptive")) s.gradient.adaptive = as_bool(*a, "simulation.adaptive");
  if (const json* h = find(v, "h_max")) s.gradient.h_max = positive(*h, "simulation.h_max");
  if (const json* init = find(v, "initial")) {
    const std::string ipath = "simulation.initial";
    require_object(*init, ipath);
    reject_unknown(*init, ipath, {"kind", "x", "k"});
    cfg.initial.kind = as_string(require(*init, "kind", ipath), ipath + ".kind");
    if (cfg.initial.kind == "fixed") {
      cfg.initial.x = as_vec(require(*init, "x", ipath), d, ipath + ".x");
      cfg.initial.k = Vec::Zero(d);
      if (const json* k = find(*init, "k")) cfg.initial.k = as_vec(*k, d, ipath + ".k");
    } else if (cfg.initial.kind != "stationary") {
      throw ConfigError(ipath + ".kind", "expected 'stationary' or 'fixed'");
    }
  }
  try {
    s.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("simulation", e.what());
  }
}

}  // namespace

const std::vector<std::string>& known_tests() {
  static const std::vector<std::string> names = {"ks", "k_moments", "independence", "sectors",
                                                 "residual", "histogram", "non_explosion"};
  return names;
}

std::filesystem::path default_output_root() {
  const char* env = std::getenv("INERTDRIFT_OUTPUT_ROOT");
  if (env && *env) return std::filesystem::path(env);
  return std::filesystem::path("runs");
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& output_root) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  require_object(root, "<document>");
  reject_unknown(root, "",
                 {"config_id", "dimension", "domain", "coefficients", "potential", "simulation", "tests",
                  "residual", "sweep", "output", "strict"});

  RunConfig cfg;
  cfg.config_id = as_string(require(root, "config_id", ""), "config_id");
  if (cfg.config_id.empty() ||
      cfg.config_id.find_first_of("/\\,\n") != std::string::npos)
    throw ConfigError("config_id", "must be a non-empty name without separators or commas");
  const long long d = as_integer(require(root, "dimension", ""), "dimension");
  if (d < 1 || d > kMaxDim) throw ConfigError("dimension", "must be between 1 and " + std::to_string(kMaxDim));
  cfg.dimension = static_cast<int>(d);

  cfg.domain = parse_domain(require(root, "domain", ""), cfg.dimension);
  cfg.coefficients = parse_coefficients(require(root, "coefficients", ""), cfg.dimension);
  if (const json* p = find(root, "potential")) cfg.potential = parse_potential(*p);
  parse_simulation(require(root, "simulation", ""), cfg.dimension, cfg);
  if (cfg.simulation.family == Family::gradient && !cfg.potential.enabled)
    throw ConfigError("potential", "the gradient family needs a regularized potential");
  if (cfg.simulation.family != Family::gradient && cfg.potential.enabled)
    throw ConfigError("potential", "a potential is only used by the gradient family");

  if (const json* t = find(root, "tests")) {
    if (!t->is_array()) throw ConfigError("tests", "expected an array of test names");
    for (std::size_t i = 0; i < t->size(); ++i) {
      const std::string path = "tests[" + std::to_string(i) + "]";
      const std::string name = as_string((*t)[i], path);
      const auto& known = known_tests();
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw ConfigError(path, "unknown test '" + name + "'");
      if (name == "sectors" && cfg.dimension != 2) throw ConfigError(path, "sectors needs dimension 2");
      if (name == "residual" && !cfg.potential.enabled)
        throw ConfigError(path, "residual needs a regularized potential");
      cfg.tests.push_back(name);
    }
  }
  if (const json* r = find(root, "residual")) {
    require_object(*r, "residual");
    reject_unknown(*r, "residual", {"tolerance", "nodes", "panels", "mc_samples"});
    if (const json* v = find(*r, "tolerance")) cfg.residual.tolerance = positive(*v, "residual.tolerance");
    if (const json* v = find(*r, "nodes")) {
      cfg.residual.options.nodes = static_cast<int>(as_integer(*v, "residual.nodes"));
      if (cfg.residual.options.nodes < 1 || cfg.residual.options.nodes > 200)
        throw ConfigError("residual.nodes", "must be between 1 and 200");
    }
    if (const json* v = find(*r, "panels")) {
      cfg.residual.options.panels = static_cast<int>(as_integer(*v, "residual.panels"));
      if (cfg.residual.options.panels < 1 || cfg.residual.options.panels > 100)
        throw ConfigError("residual.panels", "must be between 1 and 100");
    }
    if (const json* v = find(*r, "mc_samples")) {
      cfg.residual.options.mc_samples = as_integer(*v, "residual.mc_samples");
      if (cfg.residual.options.mc_samples < 2) throw ConfigError("residual.mc_samples", "must be at least 2");
    }
  }
  if (const json* s = find(root, "sweep")) {
    require_object(*s, "sweep");
    reject_unknown(*s, "sweep", {"n_list", "margin"});
    if (const json* v = find(*s, "n_list")) {
      if (!v->is_array()) throw ConfigError("sweep.n_list", "expected an array of integers");
      cfg.sweep.n_list.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const long long n = as_integer((*v)[i], "sweep.n_list[" + std::to_string(i) + "]");
        if (n < 1) throw ConfigError("sweep.n_list[" + std::to_string(i) + "]", "must be positive");
        if (!cfg.sweep.n_list.empty() && n <= cfg.sweep.n_list.back())
          throw ConfigError("sweep.n_list", "must be strictly increasing");
        cfg.sweep.n_list.push_back(static_cast<int>(n));
      }
      if (cfg.sweep.n_list.size() < 2) throw ConfigError("sweep.n_list", "need at least two entries");
    }
    if (const json* v = find(*s, "margin")) cfg.sweep.margin = positive(*v, "sweep.margin");
  }
  std::filesystem::path out_dir = cfg.config_id;
  if (const json* o = find(root, "output")) {
    require_object(*o, "output");
    reject_unknown(*o, "output", {"directory", "histogram_bins"});
    if (const json* v = find(*o, "directory")) out_dir = as_string(*v, "output.directory");
    if (const json* v = find(*o, "histogram_bins")) {
      cfg.histogram_bins = static_cast<int>(as_integer(*v, "output.histogram_bins"));
      if (cfg.histogram_bins < 2) throw ConfigError("output.histogram_bins", "need at least 2 bins");
    }
  }
  cfg.output_directory = out_dir.is_absolute() ? out_dir : output_root / out_dir;
  if (const json* v = find(root, "strict")) cfg.strict = as_bool(*v, "strict");

  // Build once so geometric and coefficient errors surface at parse time.
  try {
    (void)cfg.build_domain();
  } catch (const GeometryError& e) {
    throw ConfigError("domain", e.what());
  }
  (void)cfg.build_coefficients();
  cfg.canonical_json = root.dump(2);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::filesystem::path& output_root) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), output_root);
}

Domain RunConfig::build_domain() const {
  if (domain.kind == "interval") return Domain::interval(domain.lower[0], domain.upper[0]);
  if (domain.kind == "box") return Domain::box(domain.lower, domain.upper);
  if (domain.kind == "ball") return Domain::ball(domain.center, domain.radius);
  if (domain.kind == "ellipsoid") return Domain::ellipsoid(domain.center, domain.semi_axes);
  throw ConfigError("domain.kind", "unknown kind '" + domain.kind + "'");
}

CoefficientSet RunConfig::build_coefficients() const {
  CoefficientOptions options;
  options.convention = coefficients.convention;
  options.inert_field = coefficients.inert_field == "scaled_conormal"
                            ? InertField::scaled_conormal(coefficients.a0)
                            : InertField::gamma_normal();
  const Domain d = build_domain();
  if (coefficients.preset == "exp_density") return CoefficientSet::exp_density(d, coefficients.gamma, options);
  if (coefficients.preset == "anisotropic")
    return CoefficientSet::anisotropic(d, coefficients.diagonal, coefficients.gamma, options);
  return CoefficientSet::identity(d, coefficients.gamma, options);
}

Potential RunConfig::build_potential() const {
  if (!potential.enabled) throw ConfigError("potential", "no potential configured");
  return Potential::regularized_vn(RegularizedDistance(build_domain(), potential.regularization), potential.n);
}

StationaryMeasure RunConfig::build_stationary() const {
  const CoefficientSet cs = build_coefficients();
  if (potential.enabled) return StationaryMeasure::gradient(cs, build_potential());
  return StationaryMeasure::reflected(cs);
}

}  // namespace inertdrift
