#include "logknn/pipeline.hpp"

#include <algorithm>
#include <utility>

#include "logknn/error.hpp"

namespace logknn {

EventLog load_log(const RunConfig& config) {
  if (config.input_path.empty()) throw Error("config", "no input log file given");
  return parse_log_file(config.input_path, config.ingest);
}

SequenceCorpus build_pipeline_corpus(EventLog& log, const RunConfig& config) {
  if (!config.label_map.empty())
    apply_label_map(log.cases, load_label_map(config.label_map));
  if (!config.alphabet_table.empty())
    return build_corpus(log.cases, Alphabet::load(config.alphabet_table));
  return build_corpus(log.cases);
}

namespace {

ReportConfig make_report_config(const RunConfig& rc, const Alphabet& alphabet, double bandwidth,
                                bool bandwidth_auto) {
  ReportConfig c;
  c.delimiter = rc.ingest.delimiter;
  c.header = rc.ingest.header;
  c.case_col = rc.ingest.case_col;
  c.activity_col = rc.ingest.activity_col;
  c.timestamp_col = rc.ingest.timestamp_col;
  c.tiebreak_col = rc.ingest.tiebreak_col;
  c.timestamp_formats = rc.ingest.timestamp_formats;
  c.alphabet_source = rc.alphabet_table.empty() ? "first-appearance" : rc.alphabet_table;
  c.label_map = rc.label_map;
  c.k = rc.knn.k;
  c.exclude_self = rc.knn.exclude_self;
  c.similarity_floor = rc.knn.similarity_floor;
  c.backend = to_string(rc.backend);
  c.alphabet_hash = alphabet_fingerprint(alphabet);
  c.theta = rc.detector.theta;
  c.top_m = rc.detector.top_m;
  c.bandwidth = bandwidth;
  c.bandwidth_auto = bandwidth_auto;
  c.kde_grid_points = rc.stats.kde_grid_points;
  c.binning = rc.stats.histogram_edges.empty() ? "freedman-diaconis" : "explicit";
  return c;
}

}  // namespace

DetectionReport assemble_report(const EventLog& log, const SequenceCorpus& corpus,
                                std::vector<ScoredCase> scored, const RunConfig& config) {
  std::vector<double> scores(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) scores[i] = scored[i].anomaly_score;

  const ScoreStatistics stats = describe(
      scores, [&](std::size_t i) { return "case '" + scored[i].case_id + "'"; });
  fill_z_scores(scored, stats);

  const bool bandwidth_auto = !(config.stats.bandwidth > 0.0);
  const double bandwidth =
      bandwidth_auto ? silverman_bandwidth(scores) : config.stats.bandwidth;

  DetectionReport report;
  report.config = make_report_config(config, corpus.alphabet, bandwidth, bandwidth_auto);
  report.ingest_summary = log.summary;
  report.corpus_summary = summarize_corpus(corpus);
  report.score_stats = stats;
  report.histogram = config.stats.histogram_edges.empty()
                         ? histogram(scores)
                         : histogram(scores, config.stats.histogram_edges);
  report.kde =
      kde(scores, bandwidth,
          kde_default_grid(stats.min, stats.max, bandwidth, config.stats.kde_grid_points));

  DetectionResult detection = detect(scored, stats, config.detector, corpus);
  report.anomalies = std::move(detection.anomalies);
  report.outlier_count = detection.outlier_count;
  return report;
}

DetectionReport run_pipeline(const RunConfig& config, std::vector<ScoredCase>* scored_out) {
  EventLog log = load_log(config);
  SequenceCorpus corpus = build_pipeline_corpus(log, config);
  std::vector<ScoredCase> scored =
      score_corpus(corpus, config.knn, config.backend, config.scoring);
  DetectionReport report = assemble_report(log, corpus, scored, config);
  if (scored_out) {
    fill_z_scores(scored, report.score_stats);
    *scored_out = std::move(scored);
  }
  return report;
}

DetectionReport detect_from_dump(const RunConfig& config, std::istream& dump) {
  EventLog log = load_log(config);
  SequenceCorpus corpus = build_pipeline_corpus(log, config);
  std::vector<ScoredCase> scored = read_score_dump(dump, config.knn.similarity_floor);
  return assemble_report(log, corpus, std::move(scored), config);
}

}  // namespace logknn
