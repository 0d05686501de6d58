#include "inertdrift/simulate.hpp"

#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "csv.hpp"

namespace inertdrift {

Rng make_path_rng(std::uint64_t root_seed, std::uint64_t path_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                    static_cast<std::uint32_t>(path_id), static_cast<std::uint32_t>(path_id >> 32)};
  return Rng(seq);
}

Vec standard_normal(Rng& rng, int d) {
  std::normal_distribution<double> normal;
  Vec z(d);
  for (int i = 0; i < d; ++i) z[i] = normal(rng);
  return z;
}

const char* to_string(Family f) {
  switch (f) {
    case Family::reflected: return "reflected";
    case Family::reflected_reweighted: return "reflected_reweighted";
    case Family::gradient: return "gradient";
  }
  return "unknown";
}

const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::ok: return "ok";
    case PathStatus::boundary_overflow: return "boundary_overflow";
    case PathStatus::reflect_failure: return "reflect_failure";
    case PathStatus::weight_overflow: return "weight_overflow";
  }
  return "unknown";
}

StepOutcome step_gradient(const CoefficientSet& cs, const Potential& potential,
                          const SystemState& s, double dt, const Vec& noise, Rng& rng,
                          const GradientStepOptions& options) {
  const Domain& domain = cs.domain();
  const double h_max = options.h_max > 0.0 ? options.h_max : 0.05 * domain.inradius();
  if (!potential.finite_at(s.x))
    throw BoundaryOverflow("boundary overflow: start point " + format_point(s.x) +
                           " is outside the finite region of the potential");

  StepOutcome out;
  out.state = s;
  out.substeps = 0;
  Vec& x = out.state.x;
  Vec& k = out.state.k;
  double remaining = dt;
  bool first = true;
  while (remaining > 0.0) {
    const Vec xi = first ? noise : standard_normal(rng, cs.dim());
    first = false;
    const Vec grad_v = potential.gradient(x);
    const Mat a = cs.diffusion_matrix(x);
    const DriftVector b = cs.drift_b(x);
    out.one_sided_drift = out.one_sided_drift || b.one_sided_stencil;
    const Vec drift = b.value - 0.5 * a * grad_v + k;
    const Mat sigma = cs.sigma(x);

    double h = remaining;
    const double speed = drift.norm();
    if (options.adaptive && speed * h > h_max) h = h_max / speed;
    Vec proposal = x + std::sqrt(h) * (sigma * xi) + h * drift;
    int halvings = 0;
    while (!potential.finite_at(proposal)) {
      if (!options.adaptive || ++halvings > options.max_halvings) {
        throw BoundaryOverflow("boundary overflow: step from " + format_point(x) +
                               " cannot stay inside the finite region of the potential");
      }
      h *= 0.5;
      proposal = x + std::sqrt(h) * (sigma * xi) + h * drift;
    }
    k -= (0.5 * h) * (cs.gamma() * grad_v);
    x = proposal;
    remaining = (h >= remaining) ? 0.0 : remaining - h;
    ++out.substeps;
  }
  out.state.t = s.t + dt;
  return out;
}

StepOutcome step_reflected(const CoefficientSet& cs, const SystemState& s, double dt,
                           const Vec& noise, bool k_in_drift) {
  const DriftVector b = cs.drift_b(s.x);
  Vec drift = b.value;
  if (k_in_drift) drift += s.k;
  const Vec free_increment = std::sqrt(dt) * (cs.sigma(s.x) * noise) + dt * drift;
  // A Gaussian tail past the guard is split into equal pieces of the same
  // linear increment and reflected in turn.
  const double guard = feature_size_guard(cs.domain());
  const int pieces = std::max(1, static_cast<int>(std::ceil(free_increment.norm() / (0.5 * guard))));
  const Vec piece = free_increment / pieces;
  StepOutcome out;
  out.state.x = s.x;
  out.state.k = s.k;
  out.dl = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const ReflectResult r = reflect_step(cs.domain(), out.state.x, piece,
                                         [&cs](const Vec& p) { return cs.conormal_at_projection(p); });
    out.state.x = r.x_new;
    out.dl += r.dl;
    if (r.dl > 0.0) out.state.k += r.dl * cs.inert_field(r.contact);
  }
  out.state.ell = s.ell + out.dl;
  out.state.t = s.t + dt;
  out.substeps = pieces;
  out.one_sided_drift = b.one_sided_stencil;
  return out;
}

GirsanovWeight girsanov_weight_step(const CoefficientSet& cs, const SystemState& s,
                                    const GirsanovWeight& w, const Vec& dB, double dt) {
  GirsanovWeight next = w;
  if (w.overflow) return next;
  const Vec theta = cs.sigma_inverse(s.x) * s.k;
  next.log_weight += theta.dot(dB) - 0.5 * theta.squaredNorm() * dt;
  if (!std::isfinite(next.log_weight) || std::abs(next.log_weight) > 700.0) next.overflow = true;
  return next;
}

void SimConfig::validate() const {
  if (!(dt_base > 0.0)) throw ConfigError("simulation.dt", "must be positive");
  if (!(t_end > 0.0)) throw ConfigError("simulation.t_end", "must be positive");
  if (!(burn_in >= 0.0 && burn_in < t_end))
    throw ConfigError("simulation.burn_in", "must satisfy 0 <= burn_in < t_end");
  if (n_paths < 0) throw ConfigError("simulation.n_paths", "must be non-negative");
  if (n_threads < 1) throw ConfigError("simulation.threads", "must be at least 1");
}

long long SimConfig::total_steps() const { return std::llround(t_end / dt_base); }
long long SimConfig::burn_in_steps() const { return std::llround(burn_in / dt_base); }
long long SimConfig::stride_steps() const {
  return snapshot_stride > 0.0 ? std::max(1LL, std::llround(snapshot_stride / dt_base)) : 1LL;
}

namespace {

struct PathResult {
  PathSummary summary;
  std::vector<Snapshot> snapshots;
};

PathResult run_path(const CoefficientSet& cs, const Potential* potential, const SimConfig& cfg,
                    int path_id) {
  const int d = cs.dim();
  Rng rng = make_path_rng(cfg.seed, static_cast<std::uint64_t>(path_id));
  PathResult result;
  PathSummary& summary = result.summary;
  summary.path_id = path_id;

  SystemState state;
  if (cfg.initial.sampler) {
    std::tie(state.x, state.k) = cfg.initial.sampler(rng);
  } else {
    state.x = cfg.initial.x;
    state.k = cfg.initial.k;
  }
  if (state.x.size() != d || state.k.size() != d)
    throw ConfigError("simulation.initial", "initial x and k must have dimension " + std::to_string(d));
  summary.initial = state;

  const long long n_steps = cfg.total_steps();
  const long long burn = cfg.burn_in_steps();
  const long long stride = cfg.stride_steps();
  const long long half = n_steps / 2;
  const double sqrt_dt = std::sqrt(cfg.dt_base);
  GirsanovWeight weight;
  summary.max_abs_k = summary.max_abs_k_first_half = state.k.norm();

  auto record = [&](long long step) {
    if (step >= burn && (step - burn) % stride == 0)
      result.snapshots.push_back({path_id, state.t, state.x, state.k, state.ell, weight.log_weight});
  };
  record(0);
  for (long long step = 1; step <= n_steps; ++step) {
    const Vec noise = standard_normal(rng, d);
    try {
      StepOutcome out;
      switch (cfg.family) {
        case Family::reflected:
          out = step_reflected(cs, state, cfg.dt_base, noise, true);
          break;
        case Family::reflected_reweighted:
          weight = girsanov_weight_step(cs, state, weight, sqrt_dt * noise, cfg.dt_base);
          out = step_reflected(cs, state, cfg.dt_base, noise, false);
          break;
        case Family::gradient:
          out = step_gradient(cs, *potential, state, cfg.dt_base, noise, rng, cfg.gradient);
          break;
      }
      summary.substeps += out.substeps;
      if (out.dl > 0.0) ++summary.contact_steps;
      summary.one_sided_drift = summary.one_sided_drift || out.one_sided_drift;
      state = out.state;
    } catch (const BoundaryOverflow& e) {
      summary.status = PathStatus::boundary_overflow;
      summary.message = e.what();
      break;
    } catch (const Error& e) {
      summary.status = PathStatus::reflect_failure;
      summary.message = e.what();
      break;
    }
    state.t = step * cfg.dt_base;
    if (weight.overflow) {
      summary.status = PathStatus::weight_overflow;
      summary.message = "Girsanov log-weight left floating-point range";
      break;
    }
    const double abs_k = state.k.norm();
    summary.max_abs_k = std::max(summary.max_abs_k, abs_k);
    if (step <= half) summary.max_abs_k_first_half = summary.max_abs_k;
    record(step);
  }
  summary.final_state = state;
  summary.log_weight = weight.log_weight;
  if (summary.status != PathStatus::ok) result.snapshots.clear();
  return result;
}

TrajectoryBatch run_batch(const CoefficientSet& cs, const Potential* potential, const SimConfig& cfg) {
  cfg.validate();
  if (cfg.family == Family::gradient && potential == nullptr)
    throw ConfigError("simulation.family", "gradient family requires a potential");
  if (cfg.family != Family::gradient && potential != nullptr)
    throw ConfigError("simulation.family", "a potential is only used by the gradient family");

  std::vector<PathResult> results(static_cast<std::size_t>(cfg.n_paths));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int p = next++; p < cfg.n_paths; p = next++) results[p] = run_path(cs, potential, cfg, p);
  };
  const int threads = std::min(cfg.n_threads, std::max(1, cfg.n_paths));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  TrajectoryBatch batch;
  batch.dim = cs.dim();
  batch.family = cfg.family;
  batch.config = cfg;
  for (auto& r : results) {
    switch (r.summary.status) {
      case PathStatus::ok: break;
      case PathStatus::boundary_overflow: ++batch.diagnostics.boundary_overflow; break;
      case PathStatus::reflect_failure: ++batch.diagnostics.reflect_failure; break;
      case PathStatus::weight_overflow: ++batch.diagnostics.weight_overflow; break;
    }
    if (r.summary.one_sided_drift) ++batch.diagnostics.one_sided_drift_paths;
    batch.diagnostics.substeps += r.summary.substeps;
    batch.snapshots.insert(batch.snapshots.end(), r.snapshots.begin(), r.snapshots.end());
    batch.paths.push_back(std::move(r.summary));
  }
  return batch;
}

}  // namespace

TrajectoryBatch run_ensemble(const CoefficientSet& cs, const SimConfig& cfg) {
  return run_batch(cs, nullptr, cfg);
}

TrajectoryBatch run_ensemble(const CoefficientSet& cs, const Potential& potential,
                             const SimConfig& cfg) {
  return run_batch(cs, &potential, cfg);
}

std::vector<double> TrajectoryBatch::x_coordinate(int j) const {
  std::vector<double> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots) out.push_back(s.x[j]);
  return out;
}

std::vector<double> TrajectoryBatch::k_coordinate(int j) const {
  std::vector<double> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots) out.push_back(s.k[j]);
  return out;
}

TrajectoryBatch TrajectoryBatch::from_samples(const std::vector<Vec>& xs, const std::vector<Vec>& ks) {
  if (xs.size() != ks.size()) throw Error("from_samples: x and k sample counts differ");
  TrajectoryBatch batch;
  batch.dim = xs.empty() ? 1 : static_cast<int>(xs.front().size());
  batch.config.n_paths = static_cast<int>(xs.size());
  batch.snapshots.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    batch.snapshots.push_back({static_cast<int>(i), 0.0, xs[i], ks[i], 0.0, 0.0});
  return batch;
}

void write_batch_csv(std::ostream& out, const TrajectoryBatch& batch) {
  const int d = batch.dim;
  const bool weighted = batch.family == Family::reflected_reweighted;
  out << "path_id,t";
  for (int j = 1; j <= d; ++j) out << ",x" << j;
  for (int j = 1; j <= d; ++j) out << ",k" << j;
  out << ",ell";
  if (weighted) out << ",log_weight";
  out << '\n';
  for (const auto& s : batch.snapshots) {
    out << s.path_id << ',' << csv::format_double(s.t);
    for (int j = 0; j < d; ++j) out << ',' << csv::format_double(s.x[j]);
    for (int j = 0; j < d; ++j) out << ',' << csv::format_double(s.k[j]);
    out << ',' << csv::format_double(s.ell);
    if (weighted) out << ',' << csv::format_double(s.log_weight);
    out << '\n';
  }
}

TrajectoryBatch read_batch_csv(std::istream& in) {
  std::vector<std::string> header;
  if (!csv::read_header(in, header)) throw Error("trajectory csv: empty input");
  if (header.size() < 5 || header[0] != "path_id" || header[1] != "t")
    throw Error("trajectory csv: header must start with path_id,t");
  const bool weighted = header.back() == "log_weight";
  const std::size_t rest = header.size() - 3 - (weighted ? 1 : 0);
  if (rest % 2 != 0) throw Error("trajectory csv: x and k columns do not pair up");
  const int d = static_cast<int>(rest / 2);
  if (d < 1 || d > kMaxDim) throw Error("trajectory csv: unsupported dimension");
  for (int j = 0; j < d; ++j) {
    if (header[2 + j] != "x" + std::to_string(j + 1) || header[2 + d + j] != "k" + std::to_string(j + 1))
      throw Error("trajectory csv: expected columns x1..xd,k1..kd");
  }
  if (header[2 + 2 * d] != "ell") throw Error("trajectory csv: missing ell column");

  TrajectoryBatch batch;
  batch.dim = d;
  batch.family = weighted ? Family::reflected_reweighted : Family::reflected;
  std::string line;
  std::size_t row = 1;
  int max_path = -1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() != header.size()) throw Error("trajectory csv: row " + std::to_string(row) + " has wrong width");
    const std::string ctx = "trajectory csv row " + std::to_string(row);
    Snapshot s;
    s.path_id = static_cast<int>(csv::parse_double(f[0], ctx));
    s.t = csv::parse_double(f[1], ctx);
    s.x.resize(d);
    s.k.resize(d);
    for (int j = 0; j < d; ++j) {
      s.x[j] = csv::parse_double(f[2 + j], ctx);
      s.k[j] = csv::parse_double(f[2 + d + j], ctx);
    }
    s.ell = csv::parse_double(f[2 + 2 * d], ctx);
    if (weighted) s.log_weight = csv::parse_double(f.back(), ctx);
    max_path = std::max(max_path, s.path_id);
    batch.snapshots.push_back(std::move(s));
  }
  batch.config.n_paths = max_path + 1;
  return batch;
}

}  // namespace inertdrift
