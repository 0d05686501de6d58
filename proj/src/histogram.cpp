#include "inertdrift/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "csv.hpp"

namespace inertdrift {

Histogram make_histogram(const std::vector<double>& values, double lower, double upper, int bins) {
  if (bins < 2) throw Error("histogram: need at least 2 bins");
  if (!(lower < upper)) throw Error("histogram: empty range");
  Histogram h;
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = lower + (upper - lower) * i / bins;
  h.counts.assign(bins, 0);
  const double width = (upper - lower) / bins;
  for (double v : values) {
    if (!(v >= lower && v <= upper)) continue;
    const int i = std::min(bins - 1, static_cast<int>((v - lower) / width));
    ++h.counts[i];
    ++h.total;
  }
  return h;
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << csv::format_double(h.edges[i]) << ',' << csv::format_double(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
}

void write_histogram_svg(std::ostream& out, const Histogram& h, const std::function<double(double)>& density,
                         const std::string& title) {
  constexpr double W = 640, H = 400, ml = 50, mr = 20, mt = 30, mb = 40;
  const double lo = h.edges.front(), hi = h.edges.back();
  const int bins = static_cast<int>(h.counts.size());
  const double width = (hi - lo) / bins;
  std::vector<double> bar(bins, 0.0);
  for (int i = 0; i < bins; ++i)
    if (h.total > 0) bar[i] = h.counts[i] / (static_cast<double>(h.total) * width);
  constexpr int kCurve = 200;
  std::vector<double> cx(kCurve + 1), cy(kCurve + 1);
  for (int i = 0; i <= kCurve; ++i) {
    cx[i] = lo + (hi - lo) * i / kCurve;
    cy[i] = density ? density(cx[i]) : 0.0;
  }
  double ymax = std::max(*std::max_element(bar.begin(), bar.end()), *std::max_element(cy.begin(), cy.end()));
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.1;
  auto px = [&](double x) { return ml + (x - lo) / (hi - lo) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - y / ymax * (H - mt - mb); };
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
      << W << ' ' << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  for (int i = 0; i < bins; ++i) {
    const double x0 = px(h.edges[i]), x1 = px(h.edges[i + 1]);
    out << "<rect x=\"" << num(x0) << "\" y=\"" << num(py(bar[i])) << "\" width=\"" << num(x1 - x0)
        << "\" height=\"" << num(py(0.0) - py(bar[i])) << "\" fill=\"#9ecae1\" stroke=\"#3182bd\"/>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
  for (int i = 0; i <= kCurve; ++i) out << (i ? " " : "") << num(px(cx[i])) << ',' << num(py(cy[i]));
  out << "\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << py(0.0) << "\" x2=\"" << W - mr << "\" y2=\"" << py(0.0)
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << py(0.0)
      << "\" stroke=\"black\"/>\n";
  const double font_y = H - mb + 16;
  out << "<text x=\"" << ml << "\" y=\"" << font_y << "\" font-family=\"sans-serif\" font-size=\"11\">" << num(lo)
      << "</text>\n"
      << "<text x=\"" << W - mr << "\" y=\"" << font_y
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(hi) << "</text>\n"
      << "<text x=\"" << ml - 4 << "\" y=\"" << mt + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(ymax) << "</text>\n"
      << "</svg>\n";
}

std::vector<std::filesystem::path> emit_histograms(const TrajectoryBatch& batch, const StationaryMeasure& sm,
                                                   int bins, const std::filesystem::path& directory) {
  if (bins < 2) throw Error("emit_histograms: need at least 2 bins");
  if (batch.empty()) throw Error("emit_histograms: empty batch");
  if (batch.dim != sm.dim()) throw Error("emit_histograms: batch and measure dimensions differ");
  std::filesystem::create_directories(directory);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& stem, const Histogram& h, const std::function<double(double)>& density) {
    const auto csv_path = directory / (stem + ".csv");
    const auto svg_path = directory / (stem + ".svg");
    std::ofstream c(csv_path);
    write_histogram_csv(c, h);
    std::ofstream s(svg_path);
    write_histogram_svg(s, h, density, stem);
    if (!c || !s) throw Error("emit_histograms: cannot write into " + directory.string());
    written.push_back(csv_path);
    written.push_back(svg_path);
  };
  const Domain& domain = sm.coefficients().domain();
  const Mat cov = sm.y_covariance();
  for (int j = 0; j < batch.dim; ++j) {
    const std::string idx = std::to_string(j + 1);
    emit("hist_x" + idx, make_histogram(batch.x_coordinate(j), domain.bbox_lower()[j], domain.bbox_upper()[j], bins),
         [&sm, j](double v) { return sm.x_marginal_density(j, v); });
    const std::vector<double> ks = batch.k_coordinate(j);
    const double sd = std::sqrt(cov(j, j));
    double range = 4.0 * sd;
    for (double v : ks) range = std::max(range, std::abs(v));
    emit("hist_k" + idx, make_histogram(ks, -range, range, bins), [sd](double v) {
      return std::exp(-0.5 * v * v / (sd * sd)) / (sd * std::sqrt(2.0 * std::numbers::pi));
    });
  }
  return written;
}

}  // namespace inertdrift
