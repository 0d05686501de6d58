#include "inertdrift/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>

namespace inertdrift::quadrature {

const Rule& gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: need at least one node");
  static std::mutex mutex;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Rule rule;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);  // non-negative zeros, ascending
  auto weight = [n](double x) {
    const double dp = boost::math::legendre_p_prime<double>(n, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto z = zeros.rbegin(); z != zeros.rend(); ++z) {
    if (*z == 0.0) continue;
    rule.nodes.push_back(-*z);
    rule.weights.push_back(weight(*z));
  }
  if (n % 2 == 1) {
    rule.nodes.push_back(0.0);
    rule.weights.push_back(weight(0.0));
  }
  for (double z : zeros) {
    if (z == 0.0) continue;
    rule.nodes.push_back(z);
    rule.weights.push_back(weight(z));
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

struct Abscissae {
  std::vector<double> x;
  std::vector<double> w;
};

Abscissae composite(double a, double b, int nodes, int panels) {
  const Rule& rule = gauss_legendre(nodes);
  Abscissae out;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      out.x.push_back(lo + 0.5 * width * (rule.nodes[i] + 1.0));
      out.w.push_back(0.5 * width * rule.weights[i]);
    }
  }
  return out;
}

// Nodes in x for the range [a, b] through x = m - h cos(theta), theta in
// [theta(a), theta(b)]; the Jacobian h sin(theta) is folded into the weights.
Abscissae cosine_mapped(double a, double b, double cap, int nodes, int panels) {
  const double m = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double theta_hi = std::numbers::pi;
  if (cap < b) theta_hi = std::acos(std::clamp((m - cap) / h, -1.0, 1.0));
  Abscissae t = composite(0.0, theta_hi, nodes, panels);
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    const double theta = t.x[i];
    t.w[i] *= h * std::sin(theta);
    t.x[i] = m - h * std::cos(theta);
  }
  return t;
}

double integrate_slices(const Domain& domain, const std::function<double(const Vec&)>& f,
                        const DomainRule& rule, const Vec* caps, Vec& point, int axis) {
  const auto [a, b] = domain.slice_range(point, axis);
  const double cap = caps ? (*caps)[axis] : std::numeric_limits<double>::infinity();
  if (!(a < b) || cap <= a) return 0.0;
  const Abscissae ab = cosine_mapped(a, b, cap, rule.nodes, rule.panels);
  CompensatedSum sum;
  for (std::size_t i = 0; i < ab.x.size(); ++i) {
    point[axis] = ab.x[i];
    const double inner = (axis + 1 == domain.dim())
                             ? f(point)
                             : integrate_slices(domain, f, rule, caps, point, axis + 1);
    sum.add(ab.w[i] * inner);
  }
  return sum.value();
}

}  // namespace

double integrate_box(const Point& lower, const Point& upper,
                     const std::function<double(const Point&)>& f, int nodes, int panels) {
  const int m = static_cast<int>(lower.size());
  std::vector<Abscissae> axes;
  axes.reserve(m);
  for (int j = 0; j < m; ++j) axes.push_back(composite(lower[j], upper[j], nodes, panels));
  const int per_axis = static_cast<int>(axes.front().x.size());
  std::vector<int> idx(m, 0);
  Point p(m);
  CompensatedSum sum;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < m; ++j) {
      p[j] = axes[j].x[idx[j]];
      w *= axes[j].w[idx[j]];
    }
    sum.add(w * f(p));
    int j = 0;
    while (j < m && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == m) break;
  }
  return sum.value();
}

double integrate_domain(const Domain& domain, const std::function<double(const Vec&)>& f,
                        const DomainRule& rule, const Vec* caps) {
  const int d = domain.dim();
  if (domain.supports_slicing()) {
    Vec point = Vec::Zero(d);
    if (!caps || d == 1) return integrate_slices(domain, f, rule, caps, point, 0);
    // A cap on an inner axis leaves a kink in the outer integrand. Capped axes
    // go outermost; sliceable domains are invariant under axis reordering.
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_partition(order.begin(), order.end(), [&](int j) { return std::isfinite((*caps)[j]); });
    auto permute = [&](const Vec& v) {
      Vec w(d);
      for (int i = 0; i < d; ++i) w[i] = v[order[i]];
      return w;
    };
    const Vec lo = permute(domain.bbox_lower()), hi = permute(domain.bbox_upper());
    const Domain permuted = domain.kind() == DomainKind::ball
                                ? Domain::ball(0.5 * (lo + hi), 0.5 * (hi[0] - lo[0]))
                                : domain.kind() == DomainKind::ellipsoid ? Domain::ellipsoid(0.5 * (lo + hi), 0.5 * (hi - lo))
                                                                         : Domain::box(lo, hi);
    const Vec permuted_caps = permute(*caps);
    Vec original(d);
    auto g = [&](const Vec& y) {
      for (int i = 0; i < d; ++i) original[order[i]] = y[i];
      return f(original);
    };
    return integrate_slices(permuted, g, rule, &permuted_caps, point, 0);
  }
  auto masked = [&](const Vec& x) {
    if (caps)
      for (int j = 0; j < d; ++j)
        if (x[j] > (*caps)[j]) return 0.0;
    return domain.inside(x) ? f(x) : 0.0;
  };
  if (d <= 2) {
    Point lo = domain.bbox_lower(), hi = domain.bbox_upper();
    return integrate_box(
        lo, hi, [&](const Point& p) { return masked(Vec(p)); }, rule.nodes, rule.panels * 8);
  }
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vec lo = domain.bbox_lower(), hi = domain.bbox_upper();
  const double volume = (hi - lo).prod();
  CompensatedSum sum;
  const long long pairs = std::max(1LL, rule.mc_samples / 2);
  Vec u(d);
  for (long long i = 0; i < pairs; ++i) {
    for (int j = 0; j < d; ++j) u[j] = unit(rng);
    const Vec x1 = lo.array() + u.array() * (hi - lo).array();
    const Vec x2 = lo.array() + (1.0 - u.array()) * (hi - lo).array();
    sum.add(0.5 * (masked(x1) + masked(x2)));
  }
  return volume * sum.value() / static_cast<double>(pairs);
}

}  // namespace inertdrift::quadrature
