#include "logknn/detector.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>

#include "json.hpp"

#include "logknn/error.hpp"

namespace logknn {

namespace {

using nlohmann::json;

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

}  // namespace

CorpusSummary summarize_corpus(const SequenceCorpus& corpus) {
  CorpusSummary s;
  s.sequence_count = corpus.n();
  s.alphabet_size = corpus.alphabet.size();
  s.excluded_cases = corpus.excluded_cases;

  std::map<std::size_t, std::size_t> lengths;
  for (const auto& seq : corpus.sequences) ++lengths[seq.length()];
  s.events_per_case.assign(lengths.begin(), lengths.end());

  const auto variants = variant_histogram(corpus);
  s.distinct_variants = variants.size();
  std::map<std::size_t, std::size_t> multiplicity;
  for (const auto& [symbols, count] : variants) ++multiplicity[count];
  s.variant_multiplicity.assign(multiplicity.begin(), multiplicity.end());
  return s;
}

DetectionResult detect(const std::vector<ScoredCase>& scored, const ScoreStatistics& stats,
                       const DetectorConfig& config, const SequenceCorpus& corpus) {
  if (!(stats.std_dev > 0.0))
    throw Error("stats", "degenerate score distribution (standard deviation is 0)");
  if (!(config.theta > 0.0)) throw Error("config", "theta must be positive");
  if (config.top_m < 1) throw Error("config", "top_m must be >= 1");
  if (scored.size() != corpus.n())
    throw Error("detect", "score list has " + std::to_string(scored.size()) +
                              " rows but the corpus has " + std::to_string(corpus.n()) +
                              " sequences");
  for (const auto& sc : scored) {
    if (sc.case_index >= corpus.n() ||
        corpus.sequences[sc.case_index].case_id != sc.case_id)
      throw Error("detect", "score row for case '" + sc.case_id +
                                "' does not line up with the corpus (index " +
                                std::to_string(sc.case_index) + ")");
  }

  DetectionResult result;
  std::vector<std::size_t> order(scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scored[a].anomaly_score != scored[b].anomaly_score)
      return scored[a].anomaly_score > scored[b].anomaly_score;
    return scored[a].case_index < scored[b].case_index;
  });

  auto z_of = [&](const ScoredCase& sc) { return (sc.anomaly_score - stats.mean) / stats.std_dev; };
  for (const auto& sc : scored)
    if (z_of(sc) > config.theta) ++result.outlier_count;

  const std::size_t take = std::min(scored.size(), std::max(config.top_m, result.outlier_count));
  result.anomalies.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const ScoredCase& sc = scored[order[r]];
    AnomalyEntry entry;
    entry.scored = sc;
    entry.scored.z_score = z_of(sc);
    entry.flagged = entry.scored.z_score > config.theta;
    const Sequence& seq = corpus.sequences[sc.case_index];
    entry.symbols = seq.symbols;
    entry.activities = decode(seq, corpus.alphabet);
    result.anomalies.push_back(std::move(entry));
  }
  return result;
}

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "text") return ReportFormat::text;
  throw Error("config", "unknown report format '" + name + "' (expected json or text)");
}

std::string render_symbols(const std::vector<Symbol>& symbols) {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(symbols[i]);
    out += ';';
  }
  return out;
}

std::string render_activities(const std::vector<std::string>& activities) {
  std::string out;
  for (std::size_t i = 0; i < activities.size(); ++i) {
    if (i) out += "; ";
    out += activities[i];
  }
  return out;
}

namespace {

json config_to_json(const ReportConfig& c) {
  return json{{"delimiter", std::string(1, c.delimiter)},
              {"header", c.header},
              {"case_col", c.case_col},
              {"activity_col", c.activity_col},
              {"timestamp_col", c.timestamp_col},
              {"tiebreak_col", c.tiebreak_col},
              {"timestamp_formats", c.timestamp_formats},
              {"alphabet_source", c.alphabet_source},
              {"label_map", c.label_map},
              {"k", c.k},
              {"exclude_self", c.exclude_self},
              {"similarity_floor", c.similarity_floor},
              {"backend", c.backend},
              {"alphabet_hash", c.alphabet_hash},
              {"theta", c.theta},
              {"top_m", c.top_m},
              {"bandwidth", c.bandwidth},
              {"bandwidth_auto", c.bandwidth_auto},
              {"kde_grid_points", c.kde_grid_points},
              {"binning", c.binning}};
}

json pairs_to_json(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  json arr = json::array();
  for (const auto& [a, b] : pairs) arr.push_back(json::array({a, b}));
  return arr;
}

json report_to_json(const DetectionReport& r) {
  json j;
  j["config"] = config_to_json(r.config);
  j["ingest_summary"] = {{"total_rows", r.ingest_summary.total_rows},
                         {"parsed_rows", r.ingest_summary.parsed_rows},
                         {"skipped_rows", r.ingest_summary.skipped_rows},
                         {"skip_reasons", r.ingest_summary.skip_reasons},
                         {"case_count", r.ingest_summary.case_count},
                         {"event_count", r.ingest_summary.event_count}};
  j["corpus_summary"] = {{"sequence_count", r.corpus_summary.sequence_count},
                         {"alphabet_size", r.corpus_summary.alphabet_size},
                         {"distinct_variants", r.corpus_summary.distinct_variants},
                         {"excluded_cases", r.corpus_summary.excluded_cases},
                         {"events_per_case", pairs_to_json(r.corpus_summary.events_per_case)},
                         {"variant_multiplicity",
                          pairs_to_json(r.corpus_summary.variant_multiplicity)}};
  j["score_stats"] = {{"n", r.score_stats.n},         {"mean", r.score_stats.mean},
                      {"variance", r.score_stats.variance}, {"std_dev", r.score_stats.std_dev},
                      {"min", r.score_stats.min},     {"max", r.score_stats.max}};
  j["histogram"] = {{"bin_edges", r.histogram.bin_edges}, {"counts", r.histogram.counts}};
  j["kde"] = {{"bandwidth", r.kde.bandwidth}, {"grid", r.kde.grid}, {"density", r.kde.density}};
  j["outlier_count"] = r.outlier_count;

  json anomalies = json::array();
  for (std::size_t i = 0; i < r.anomalies.size(); ++i) {
    const AnomalyEntry& e = r.anomalies[i];
    anomalies.push_back({{"rank", i + 1},
                         {"case_id", e.scored.case_id},
                         {"case_index", e.scored.case_index},
                         {"kth_similarity", e.scored.kth_similarity},
                         {"anomaly_score", e.scored.anomaly_score},
                         {"kth_neighbor_id", e.scored.kth_neighbor_id},
                         {"z_score", e.scored.z_score},
                         {"similarity_floor_hit", e.scored.similarity_floor_hit},
                         {"flagged", e.flagged},
                         {"symbols", e.symbols},
                         {"symbols_text", render_symbols(e.symbols)},
                         {"activities", e.activities},
                         {"activities_text", render_activities(e.activities)}});
  }
  j["anomalies"] = std::move(anomalies);
  return j;
}

void render_text(std::ostream& out, const DetectionReport& r) {
  out << "anomaly detection report\n";
  out << "------------------------\n";
  out << "ingest     rows=" << r.ingest_summary.total_rows
      << " parsed=" << r.ingest_summary.parsed_rows
      << " skipped=" << r.ingest_summary.skipped_rows;
  if (!r.ingest_summary.skip_reasons.empty()) {
    out << " (";
    bool first = true;
    for (const auto& [reason, count] : r.ingest_summary.skip_reasons) {
      if (!first) out << ", ";
      out << reason << "=" << count;
      first = false;
    }
    out << ")";
  }
  out << "\n";
  out << "corpus     cases=" << r.corpus_summary.sequence_count
      << " alphabet=" << r.corpus_summary.alphabet_size
      << " variants=" << r.corpus_summary.distinct_variants
      << " excluded=" << r.corpus_summary.excluded_cases << "\n";
  out << "scoring    k=" << r.config.k << " exclude_self=" << (r.config.exclude_self ? "true" : "false")
      << " backend=" << r.config.backend << " floor=" << fmt6(r.config.similarity_floor) << "\n";
  out << "scores     n=" << r.score_stats.n << " mean=" << fmt6(r.score_stats.mean)
      << " variance=" << fmt6(r.score_stats.variance)
      << " std_dev=" << fmt6(r.score_stats.std_dev) << " min=" << fmt6(r.score_stats.min)
      << " max=" << fmt6(r.score_stats.max) << "\n";
  out << "kde        bandwidth=" << fmt6(r.kde.bandwidth) << " grid=" << r.kde.grid.size()
      << "\n";
  out << "threshold  theta=" << fmt6(r.config.theta) << " outlier_count=" << r.outlier_count
      << "\n\n";
  out << "top anomalies (flagged entries marked *):\n";
  for (std::size_t i = 0; i < r.anomalies.size(); ++i) {
    const AnomalyEntry& e = r.anomalies[i];
    out << (i + 1 < 10 ? " " : "") << (i + 1) << "." << (e.flagged ? "* " : "  ")
        << "case=" << e.scored.case_id << " score=" << fmt6(e.scored.anomaly_score)
        << " z=" << fmt6(e.scored.z_score) << " ksim=" << fmt6(e.scored.kth_similarity)
        << " neighbor=" << e.scored.kth_neighbor_id;
    if (e.scored.similarity_floor_hit) out << " [floor]";
    out << "\n";
    out << "      ids: " << render_symbols(e.symbols) << "\n";
    out << "      activities: " << render_activities(e.activities) << "\n";
  }
}

}  // namespace

void render_report(std::ostream& out, const DetectionReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    out << report_to_json(report).dump(2) << '\n';
  } else {
    render_text(out, report);
  }
  if (!out) throw Error("report", "failed writing report");
}

}  // namespace logknn
