#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "logknn/encoding.hpp"
#include "logknn/event_log.hpp"
#include "logknn/knn_scorer.hpp"
#include "logknn/score_stats.hpp"

namespace logknn {

struct DetectorConfig {
  double theta = 5.0;     // z-score threshold; strictly greater flags
  std::size_t top_m = 10; // ranked entries to list even when nothing is flagged
};

struct AnomalyEntry {
  ScoredCase scored;
  std::vector<Symbol> symbols;
  std::vector<std::string> activities;
  bool flagged = false;  // z > theta; unflagged entries are top-m filler
};

struct DetectionResult {
  std::vector<AnomalyEntry> anomalies;  // z descending, ties by case index
  std::size_t outlier_count = 0;        // |{cases : z > theta}|, right tail only
};

struct CorpusSummary {
  std::size_t sequence_count = 0;
  std::size_t alphabet_size = 0;
  std::size_t distinct_variants = 0;
  std::size_t excluded_cases = 0;
  std::vector<std::pair<std::size_t, std::size_t>> events_per_case;      // (length, cases)
  std::vector<std::pair<std::size_t, std::size_t>> variant_multiplicity; // (count, variants)
};

CorpusSummary summarize_corpus(const SequenceCorpus& corpus);

// Everything semantic that shaped the result. Execution knobs (threads,
// pruning, output paths) are deliberately absent: they cannot change a single
// output bit, and the report must stay byte-identical when they vary.
struct ReportConfig {
  char delimiter = ';';
  bool header = false;
  std::string case_col, activity_col, timestamp_col, tiebreak_col;
  std::vector<std::string> timestamp_formats;
  std::string alphabet_source;  // "first-appearance" or the table path
  std::string label_map;        // path, empty when unused
  std::size_t k = 0;
  bool exclude_self = true;
  double similarity_floor = 0.0;
  std::string backend;
  std::string alphabet_hash;
  double theta = 0.0;
  std::size_t top_m = 0;
  double bandwidth = 0.0;       // KDE bandwidth actually used
  bool bandwidth_auto = false;  // true when derived from the data
  std::size_t kde_grid_points = 0;
  std::string binning;          // "freedman-diaconis" or "explicit"
};

struct DetectionReport {
  ReportConfig config;
  IngestSummary ingest_summary;
  CorpusSummary corpus_summary;
  ScoreStatistics score_stats;
  HistogramSeries histogram;
  KdeSeries kde;
  std::vector<AnomalyEntry> anomalies;
  std::size_t outlier_count = 0;
};

// Flags exactly the cases with (score - mean)/std_dev > theta and returns
// them ranked, padded with the next-highest scores up to top_m entries.
// Every scored row must line up with its corpus sequence.
DetectionResult detect(const std::vector<ScoredCase>& scored, const ScoreStatistics& stats,
                       const DetectorConfig& config, const SequenceCorpus& corpus);

enum class ReportFormat { json, text };
ReportFormat report_format_from_string(const std::string& name);

void render_report(std::ostream& out, const DetectionReport& report, ReportFormat format);

// "0; 27;" — every id followed by a semicolon, space-separated.
std::string render_symbols(const std::vector<Symbol>& symbols);
// "Caused By CI; Closed"
std::string render_activities(const std::vector<std::string>& activities);

}  // namespace logknn
