#include "logknn/score_stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "logknn/error.hpp"

namespace logknn {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)

// Neumaier-compensated sum: exact enough that the result only depends on the
// multiset of addends' ordering, which callers fix by sorting first.
double compensated_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

ScoreStatistics describe(std::span<const double> scores,
                         const std::function<std::string(std::size_t)>& name_of) {
  if (scores.size() < 2)
    throw Error("stats", "need at least 2 scores, got " + std::to_string(scores.size()));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      const std::string who = name_of ? name_of(i) : "index " + std::to_string(i);
      throw Error("stats", "non-finite score at " + who);
    }
  }

  std::vector<double> sorted = sorted_copy(scores);
  const double n = static_cast<double>(sorted.size());

  ScoreStatistics st;
  st.n = sorted.size();
  st.min = sorted.front();
  st.max = sorted.back();
  st.mean = compensated_sum(sorted) / n;

  std::vector<double> sq(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double d = sorted[i] - st.mean;
    sq[i] = d * d;
  }
  st.variance = compensated_sum(sq) / n;
  st.std_dev = std::sqrt(st.variance);
  return st;
}

std::vector<double> z_scores(std::span<const double> scores, const ScoreStatistics& stats) {
  if (!(stats.std_dev > 0.0))
    throw Error("stats", "degenerate score distribution (standard deviation is 0)");
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    out[i] = (scores[i] - stats.mean) / stats.std_dev;
  return out;
}

void fill_z_scores(std::vector<ScoredCase>& scored, const ScoreStatistics& stats) {
  if (!(stats.std_dev > 0.0))
    throw Error("stats", "degenerate score distribution (standard deviation is 0)");
  for (auto& sc : scored) sc.z_score = (sc.anomaly_score - stats.mean) / stats.std_dev;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error("stats", "quantile of empty data");
  if (sorted.size() == 1) return sorted[0];
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

namespace {

HistogramSeries bin_into(std::span<const double> scores, std::vector<double> edges) {
  if (edges.size() < 2) throw Error("stats", "histogram needs at least 2 bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i - 1] < edges[i]))
      throw Error("stats", "histogram bin edges must be strictly increasing");

  HistogramSeries hist;
  hist.counts.assign(edges.size() - 1, 0);
  for (double x : scores) {
    std::size_t bin;
    if (x < edges.front()) {
      bin = 0;
    } else if (x >= edges.back()) {
      bin = hist.counts.size() - 1;
    } else {
      bin = static_cast<std::size_t>(
          std::upper_bound(edges.begin(), edges.end(), x) - edges.begin() - 1);
    }
    ++hist.counts[bin];
  }
  hist.bin_edges = std::move(edges);
  return hist;
}

}  // namespace

HistogramSeries histogram(std::span<const double> scores) {
  if (scores.empty()) throw Error("stats", "histogram of empty data");
  std::vector<double> sorted = sorted_copy(scores);
  const double lo = sorted.front(), hi = sorted.back();
  const double n = static_cast<double>(sorted.size());

  if (lo == hi) return bin_into(scores, {lo - 0.5, lo + 0.5});

  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  std::size_t bins;
  if (iqr > 0.0) {
    const double width = 2.0 * iqr / std::cbrt(n);
    bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  } else {
    bins = static_cast<std::size_t>(std::ceil(std::log2(n))) + 1;
  }
  bins = std::max<std::size_t>(bins, 1);

  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  edges.back() = hi;  // guard against rounding drift on the final edge
  return bin_into(scores, std::move(edges));
}

HistogramSeries histogram(std::span<const double> scores, std::vector<double> edges) {
  if (scores.empty()) throw Error("stats", "histogram of empty data");
  return bin_into(scores, std::move(edges));
}

double silverman_bandwidth(std::span<const double> scores) {
  if (scores.size() < 2) throw Error("stats", "bandwidth needs at least 2 scores");
  std::vector<double> sorted = sorted_copy(scores);
  const double n = static_cast<double>(sorted.size());
  const double mean = compensated_sum(sorted) / n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / n);
  const double iqr_term = (quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25)) / 1.34;

  double spread;
  if (sigma > 0.0 && iqr_term > 0.0)
    spread = std::min(sigma, iqr_term);
  else if (sigma > 0.0)
    spread = sigma;
  else if (iqr_term > 0.0)
    spread = iqr_term;
  else
    spread = 1.0;  // constant data: any positive width is as good as another
  return 0.9 * spread * std::pow(n, -0.2);
}

std::vector<double> kde_default_grid(double min, double max, double bandwidth,
                                     std::size_t points) {
  if (points < 2) throw Error("stats", "KDE grid needs at least 2 points");
  const double lo = min - 4.0 * bandwidth;
  const double hi = max + 4.0 * bandwidth;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

KdeSeries kde(std::span<const double> scores, double bandwidth, std::vector<double> grid) {
  if (!(bandwidth > 0.0)) throw Error("stats", "KDE bandwidth must be positive");
  if (scores.empty()) throw Error("stats", "KDE of empty data");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i - 1] < grid[i])) throw Error("stats", "KDE grid must be ascending");

  std::vector<double> sorted = sorted_copy(scores);
  KdeSeries series;
  series.bandwidth = bandwidth;
  series.density.assign(grid.size(), 0.0);

  const double scale = kInvSqrt2Pi / (static_cast<double>(sorted.size()) * bandwidth);
  const double inv_h = 1.0 / bandwidth;

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t gi = 0; gi < static_cast<std::int64_t>(grid.size()); ++gi) {
    const double g = grid[static_cast<std::size_t>(gi)];
    double sum = 0.0;
    for (double x : sorted) {
      const double u = (g - x) * inv_h;
      sum += std::exp(-0.5 * u * u);
    }
    series.density[static_cast<std::size_t>(gi)] = scale * sum;
  }
  series.grid = std::move(grid);
  return series;
}

void write_xy_series(std::ostream& out, std::span<const double> xs, std::span<const double> ys) {
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i)
    out << format_double17(xs[i]) << ';' << format_double17(ys[i]) << '\n';
}

void write_histogram_series(std::ostream& out, const HistogramSeries& hist) {
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double mid = 0.5 * (hist.bin_edges[i] + hist.bin_edges[i + 1]);
    out << format_double17(mid) << ';' << hist.counts[i] << '\n';
  }
}

}  // namespace logknn
