#include "inertdrift/skorokhod.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <ostream>
#include <sstream>

#include "csv.hpp"

namespace inertdrift {

double feature_size_guard(const Domain& domain) { return 0.25 * domain.inradius(); }

ReflectResult reflect_step(const Domain& domain, const Vec& x, const Vec& increment,
                           const PushField& push) {
  const double guard = feature_size_guard(domain);
  const double size = increment.norm();
  if (!(size <= guard)) {
    std::ostringstream msg;
    msg << "reflect_step: increment of size " << size << " from " << format_point(x)
        << " exceeds the feature-size guard " << guard << "; refine the time grid";
    throw GeometryError(msg.str());
  }
  const Vec y = x + increment;
  if (domain.inside(y) || domain.signed_distance(y) >= 0.0) return {y, 0.0, y};

  const Vec xi = domain.project_to_boundary(y);
  const Vec u = push(xi);
  const Vec n = domain.normal_at_projection(xi);
  const double un = u.dot(n);
  if (!(un > 0.0)) {
    throw GeometryError("reflect_step: push direction " + format_point(u) +
                        " does not point into the domain at " + format_point(xi));
  }

  if (domain.kind() == DomainKind::interval) {
    // Exact on a line: land on the violated endpoint.
    const double lo = domain.lower()[0];
    const double hi = domain.upper()[0];
    Vec landed(1);
    double dl;
    if (y[0] < lo) {
      dl = (lo - y[0]) / u[0];
      landed[0] = lo;
    } else {
      dl = (y[0] - hi) / (-u[0]);
      landed[0] = hi;
    }
    return {landed, dl, landed};
  }

  auto sd_along = [&](double s) { return domain.signed_distance(y + s * u); };
  double lo = 0.0;
  double hi = -domain.signed_distance(y) / un;
  int doublings = 0;
  while (sd_along(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) {
      throw NumericalError("reflect_step: could not bracket the landing point from " +
                           format_point(y) + " along " + format_point(u));
    }
  }
  double s = hi;
  if (sd_along(hi) > 0.0) {
    boost::uintmax_t max_iter = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        sd_along, lo, hi, sd_along(lo), sd_along(hi), boost::math::tools::eps_tolerance<double>(52),
        max_iter);
    if (max_iter >= 200) {
      std::ostringstream msg;
      msg << "reflect_step: root bracket for dl did not converge from " << format_point(y)
          << " (bracket [" << bracket.first << ", " << bracket.second << "])";
      throw NumericalError(msg.str());
    }
    s = sd_along(bracket.first) >= 0.0 ? bracket.first : bracket.second;
  }
  const Vec landed = y + s * u;
  return {landed, s, landed};
}

ReflectResult reflect_step(const Domain& domain, const Vec& x, const Vec& increment) {
  return reflect_step(domain, x, increment,
                      [&domain](const Vec& p) { return domain.normal_at_projection(p); });
}

ConstrainedPath solve_skorokhod(const Domain& domain, const DrivingPath& f) {
  const std::size_t m = f.times.size();
  if (m == 0 || f.values.size() != m) throw Error("solve_skorokhod: empty or ragged driving path");
  for (std::size_t i = 1; i < m; ++i)
    if (!(f.times[i] > f.times[i - 1]))
      throw Error("solve_skorokhod: sample times must be strictly increasing");
  if (!domain.in_closure(f.values[0]))
    throw GeometryError("solve_skorokhod: f(t0) = " + format_point(f.values[0]) +
                        " is outside the closure of the domain");

  ConstrainedPath out;
  out.times = f.times;
  out.g.reserve(m);
  out.ell.reserve(m);
  out.pushes.reserve(m);
  out.g.push_back(f.values[0]);
  out.ell.push_back(0.0);
  out.pushes.push_back(Vec::Zero(domain.dim()));
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const Vec increment = f.values[i + 1] - f.values[i];
    const ReflectResult r = reflect_step(domain, out.g.back(), increment);
    Vec push = Vec::Zero(domain.dim());
    if (r.dl > 0.0) push = r.dl * domain.normal_at_projection(r.contact);
    out.g.push_back(r.x_new);
    out.ell.push_back(out.ell.back() + r.dl);
    out.pushes.push_back(push);
  }
  return out;
}

DrivingPath read_path_csv(std::istream& in) {
  std::vector<std::string> header;
  if (!csv::read_header(in, header)) throw Error("path csv: empty input");
  if (header.size() < 2 || header[0] != "t") throw Error("path csv: header must be t,x1,...,xd");
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j)
    if (header[j + 1] != "x" + std::to_string(j + 1))
      throw Error("path csv: unexpected column '" + header[j + 1] + "'");
  if (d > static_cast<std::size_t>(kMaxDim)) throw Error("path csv: dimension too large");
  DrivingPath path;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (fields.size() != d + 1) throw Error("path csv: row " + std::to_string(row) + " has wrong width");
    const std::string ctx = "path csv row " + std::to_string(row);
    path.times.push_back(csv::parse_double(fields[0], ctx));
    Vec x(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) x[static_cast<Eigen::Index>(j)] = csv::parse_double(fields[j + 1], ctx);
    path.values.push_back(x);
  }
  return path;
}

void write_path_csv(std::ostream& out, const DrivingPath& path) {
  const Eigen::Index d = path.values.empty() ? 1 : path.values.front().size();
  out << 't';
  for (Eigen::Index j = 0; j < d; ++j) out << ",x" << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out << csv::format_double(path.times[i]);
    for (Eigen::Index j = 0; j < d; ++j) out << ',' << csv::format_double(path.values[i][j]);
    out << '\n';
  }
}

void write_constrained_path_csv(std::ostream& out, const ConstrainedPath& path) {
  const Eigen::Index d = path.g.empty() ? 1 : path.g.front().size();
  out << 't';
  for (Eigen::Index j = 0; j < d; ++j) out << ",x" << j + 1;
  out << ",ell\n";
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out << csv::format_double(path.times[i]);
    for (Eigen::Index j = 0; j < d; ++j) out << ',' << csv::format_double(path.g[i][j]);
    out << ',' << csv::format_double(path.ell[i]) << '\n';
  }
}

}  // namespace inertdrift
