#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "logknn/detector.hpp"
#include "logknn/encoding.hpp"
#include "logknn/event_log.hpp"
#include "logknn/knn_scorer.hpp"
#include "logknn/lcs_kernel.hpp"
#include "logknn/score_stats.hpp"

namespace logknn {

struct StatsConfig {
  double bandwidth = 0.0;               // <= 0: Silverman's rule from the data
  std::size_t kde_grid_points = 512;
  std::vector<double> histogram_edges;  // empty: Freedman-Diaconis
};

struct RunConfig {
  std::string input_path;
  IngestConfig ingest;
  std::string alphabet_table;  // label->id file; empty = first-appearance order
  std::string label_map;       // raw->canonical rewrites applied before encoding
  KnnConfig knn;
  KernelBackend backend = KernelBackend::bit_parallel;
  ScoringOptions scoring;  // execution-only; never reaches the report
  StatsConfig stats;
  DetectorConfig detector;
};

EventLog load_log(const RunConfig& config);

// Applies the label map (if any) to the parsed cases, then encodes them with
// either the explicit alphabet table or first-appearance ordering.
SequenceCorpus build_pipeline_corpus(EventLog& log, const RunConfig& config);

// Stats, threshold rule, and report assembly over already-scored cases.
// `scored` must be in case order — the order score_corpus and read_score_dump
// both emit — and is consumed.
DetectionReport assemble_report(const EventLog& log, const SequenceCorpus& corpus,
                                std::vector<ScoredCase> scored, const RunConfig& config);

// ingest -> encode -> score -> stats -> detect. When scored_out is non-null
// it receives the scored cases (case order, z filled) for side dumps.
DetectionReport run_pipeline(const RunConfig& config,
                             std::vector<ScoredCase>* scored_out = nullptr);

// Same report as run_pipeline, but kth-similarity/score/neighbor columns come
// from a score-stage dump instead of being recomputed.
DetectionReport detect_from_dump(const RunConfig& config, std::istream& dump);

}  // namespace logknn
