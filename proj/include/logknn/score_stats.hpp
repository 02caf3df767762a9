#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "logknn/knn_scorer.hpp"

namespace logknn {

// Population moments (divide by n, not n-1): the score set is the whole
// population, not a sample from one.
struct ScoreStatistics {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double std_dev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct HistogramSeries {
  std::vector<double> bin_edges;   // strictly increasing, >= 2 entries
  std::vector<std::size_t> counts; // one per bin; sums to n
};

struct KdeSeries {
  double bandwidth = 0.0;
  std::vector<double> grid;
  std::vector<double> density;
};

// Throws when a value is non-finite; name_of(i) labels the offender when given.
// The reduction is compensated and runs over a sorted copy, so the result is
// bitwise identical under any permutation of the input.
ScoreStatistics describe(std::span<const double> scores,
                         const std::function<std::string(std::size_t)>& name_of = {});

// Elementwise (x - mean) / std_dev; order preserved.
std::vector<double> z_scores(std::span<const double> scores, const ScoreStatistics& stats);

// Writes each case's z into its slot using the same formula as z_scores.
void fill_z_scores(std::vector<ScoredCase>& scored, const ScoreStatistics& stats);

// Freedman-Diaconis bin count (Sturges when the IQR collapses), evenly spaced
// edges over [min, max]. Bins are right-open, the last bin right-closed.
HistogramSeries histogram(std::span<const double> scores);
// Explicit edges; values outside the range are clamped into the end bins.
HistogramSeries histogram(std::span<const double> scores, std::vector<double> edges);

// Linear-interpolation quantile on an ascending-sorted array, p in [0,1].
double quantile_sorted(std::span<const double> sorted, double p);

// 0.9 * min(sigma, IQR/1.34) * n^(-1/5); falls back to whichever spread
// measure is nonzero, and to 1.0 for constant data.
double silverman_bandwidth(std::span<const double> scores);

// 512 evenly spaced points spanning [min - 4h, max + 4h].
std::vector<double> kde_default_grid(double min, double max, double bandwidth,
                                     std::size_t points = 512);

// Gaussian kernel: density(g) = (1/(n*h*sqrt(2*pi))) * sum_i exp(-(g-x_i)^2/(2h^2)).
// Parallel over grid points only; each point sums sequentially over a sorted
// copy of the scores, so output is deterministic and permutation-invariant.
KdeSeries kde(std::span<const double> scores, double bandwidth, std::vector<double> grid);

// Two-column delimited text, `x;y` per line.
void write_xy_series(std::ostream& out, std::span<const double> xs, std::span<const double> ys);
void write_histogram_series(std::ostream& out, const HistogramSeries& hist);  // midpoint;count

}  // namespace logknn
