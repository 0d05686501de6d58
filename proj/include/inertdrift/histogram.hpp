#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "inertdrift/simulate.hpp"
#include "inertdrift/stationary.hpp"

namespace inertdrift {

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 increasing edges
  std::vector<long long> counts;
  long long total = 0;
};

/// Equal-width bins over [lower, upper]; values outside are not counted.
Histogram make_histogram(const std::vector<double>& values, double lower, double upper, int bins);

/// CSV `bin_lo,bin_hi,count`.
void write_histogram_csv(std::ostream& out, const Histogram& h);

/// Bars scaled to a probability density with the given curve drawn over them.
void write_histogram_svg(std::ostream& out, const Histogram& h, const std::function<double(double)>& density,
                         const std::string& title);

/// hist_x<j>.{csv,svg} and hist_k<j>.{csv,svg} for every coordinate, overlaid
/// with the stationary marginals of `sm`. Returns the written paths.
std::vector<std::filesystem::path> emit_histograms(const TrajectoryBatch& batch, const StationaryMeasure& sm,
                                                   int bins, const std::filesystem::path& directory);

}  // namespace inertdrift
