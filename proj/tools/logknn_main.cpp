// Command-line front end: ingest | score | detect | run | synth.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#ifdef _WIN32
#include <io.h>
#define LOGKNN_ISATTY(fd) _isatty(fd)
#else
#include <unistd.h>
#define LOGKNN_ISATTY(fd) isatty(fd)
#endif

#include "CLI11.hpp"

#include "logknn/error.hpp"
#include "logknn/pipeline.hpp"
#include "logknn/synthgen.hpp"

namespace {

using namespace logknn;

struct CliOptions {
  RunConfig rc;
  std::string delimiter = ";";
  std::string backend_name = "bit-parallel";
  bool no_prune = false;
  bool force_progress = false;  // default: progress only when stderr is a tty
  bool no_progress = false;

  std::string output_path;      // report or score dump destination
  std::string format_name = "json";
  std::string emit_plots_dir;
  std::string dump_scores_path; // run: optional side dump
  std::string scores_path;      // detect: dump to consume
  std::string dump_corpus_path; // ingest: optional corpus dump
};

char parse_delimiter(const std::string& text) {
  if (text == "\\t") return '\t';
  if (text.size() != 1)
    throw Error("config", "delimiter must be a single character (or \\t), got '" + text + "'");
  return text[0];
}

void add_ingest_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("input", opt.rc.input_path, "event log file (delimited text)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--delimiter", opt.delimiter, "field delimiter (single char, or \\t)")
      ->capture_default_str();
  cmd->add_flag("--header,!--no-header", opt.rc.ingest.header,
                "first data line is a header row");
  cmd->add_option("--case-col", opt.rc.ingest.case_col,
                  "case-id column (0-based index, or header name)")
      ->capture_default_str();
  cmd->add_option("--activity-col", opt.rc.ingest.activity_col, "activity column")
      ->capture_default_str();
  cmd->add_option("--timestamp-col", opt.rc.ingest.timestamp_col, "timestamp column")
      ->capture_default_str();
  cmd->add_option("--tiebreak-col", opt.rc.ingest.tiebreak_col,
                  "column ordering events that share a timestamp");
  cmd->add_option("--timestamp-formats", opt.rc.ingest.timestamp_formats,
                  "accepted timestamp patterns, tried in order");
  cmd->add_option("--alphabet-table", opt.rc.alphabet_table,
                  "label<TAB>id file fixing the symbol ids")
      ->check(CLI::ExistingFile);
  cmd->add_option("--label-map", opt.rc.label_map,
                  "raw<TAB>canonical activity rewrites applied before encoding")
      ->check(CLI::ExistingFile);
}

void add_scoring_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--k,-k", opt.rc.knn.k, "kNN parameter K")->required();
  cmd->add_flag("--exclude-self,!--include-self", opt.rc.knn.exclude_self,
                "exclude the query's own instance from its candidates");
  cmd->add_option("--similarity-floor", opt.rc.knn.similarity_floor,
                  "epsilon guarding 1/similarity")
      ->capture_default_str();
  cmd->add_option("--threads", opt.rc.scoring.threads,
                  "worker threads for scoring (0 = all available)")
      ->capture_default_str();
  cmd->add_flag("--no-prune", opt.no_prune, "score every candidate pair (verification mode)");
  cmd->add_option("--backend", opt.backend_name, "LCS kernel: bit-parallel or reference-DP")
      ->capture_default_str();
  cmd->add_flag("--progress", opt.force_progress,
                "progress on stderr even when it is not a terminal");
  cmd->add_flag("--no-progress", opt.no_progress, "suppress scoring progress");
}

void add_stats_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--bandwidth", opt.rc.stats.bandwidth,
                  "KDE bandwidth (0 = Silverman's rule)");
  cmd->add_option("--kde-grid-points", opt.rc.stats.kde_grid_points, "KDE grid resolution")
      ->capture_default_str();
  cmd->add_option("--histogram-edges", opt.rc.stats.histogram_edges,
                  "explicit histogram bin edges (default: Freedman-Diaconis)");
}

void add_detector_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--theta", opt.rc.detector.theta, "z-score threshold (flags z > theta)")
      ->capture_default_str();
  cmd->add_option("--top-m", opt.rc.detector.top_m, "ranked anomalies to list")
      ->capture_default_str();
}

void add_report_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--output,-o", opt.output_path, "report destination (default stdout)");
  cmd->add_option("--format", opt.format_name, "report format: json or text")
      ->capture_default_str();
  cmd->add_option("--emit-plots", opt.emit_plots_dir,
                  "directory for histogram.csv / kde.csv plot series");
}

void finalize(CliOptions& opt) {
  opt.rc.ingest.delimiter = parse_delimiter(opt.delimiter);
  opt.rc.backend = kernel_backend_from_string(opt.backend_name);
  opt.rc.scoring.prune = !opt.no_prune;

  const bool want_progress =
      !opt.no_progress && (opt.force_progress || LOGKNN_ISATTY(fileno(stderr)));
  if (want_progress) {
    auto start = std::chrono::steady_clock::now();
    auto last = std::make_shared<std::chrono::steady_clock::time_point>(start);
    opt.rc.scoring.progress = [start, last](std::size_t done, std::size_t total) {
      const auto now = std::chrono::steady_clock::now();
      if (done < total && now - *last < std::chrono::milliseconds(500)) return;
      *last = now;
      const double secs = std::chrono::duration<double>(now - start).count();
      const double rate = secs > 0 ? static_cast<double>(done) / secs : 0.0;
      const double eta = rate > 0 ? static_cast<double>(total - done) / rate : 0.0;
      std::fprintf(stderr, "\rscoring %zu/%zu cases (%.0f cases/s, ETA %.0fs)   ", done,
                   total, rate, eta);
      if (done >= total) std::fprintf(stderr, "\n");
    };
  }
}

void write_report(const DetectionReport& report, const CliOptions& opt) {
  const ReportFormat format = report_format_from_string(opt.format_name);
  if (opt.output_path.empty()) {
    render_report(std::cout, report, format);
  } else {
    std::ofstream out(opt.output_path, std::ios::binary);
    if (!out) throw Error("report", "cannot open output file: " + opt.output_path);
    render_report(out, report, format);
  }
}

void emit_plots(const DetectionReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);  // best effort; opens fail below
  {
    std::ofstream out(dir + "/histogram.csv", std::ios::binary);
    if (!out) throw Error("report", "cannot write " + dir + "/histogram.csv");
    write_histogram_series(out, report.histogram);
  }
  {
    std::ofstream out(dir + "/kde.csv", std::ios::binary);
    if (!out) throw Error("report", "cannot write " + dir + "/kde.csv");
    write_xy_series(out, report.kde.grid, report.kde.density);
  }
}

// One-screen result line; goes to stderr when stdout already carries the report.
void print_summary(const DetectionReport& report, bool report_on_stdout) {
  std::ostringstream top;
  const std::size_t shown = std::min<std::size_t>(5, report.anomalies.size());
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) top << ", ";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", report.anomalies[i].scored.anomaly_score);
    top << buf;
  }
  char line[256];
  std::snprintf(line, sizeof(line),
                "n=%zu k=%zu mean=%.4g std_dev=%.4g outlier_count=%zu top%zu=[%s]",
                report.score_stats.n, report.config.k, report.score_stats.mean,
                report.score_stats.std_dev, report.outlier_count, shown, top.str().c_str());
  (report_on_stdout ? std::cerr : std::cout) << line << "\n";
}

int cmd_ingest(CliOptions& opt) {
  finalize(opt);
  EventLog log = load_log(opt.rc);
  SequenceCorpus corpus = build_pipeline_corpus(log, opt.rc);
  if (!opt.dump_corpus_path.empty()) {
    std::ofstream out(opt.dump_corpus_path, std::ios::binary);
    if (!out) throw Error("ingest", "cannot write " + opt.dump_corpus_path);
    dump_corpus(out, corpus);
  }
  std::cout << "rows: total=" << log.summary.total_rows << " parsed=" << log.summary.parsed_rows
            << " skipped=" << log.summary.skipped_rows << "\n";
  for (const auto& [reason, count] : log.summary.skip_reasons)
    std::cout << "  skipped (" << reason << "): " << count << "\n";
  std::cout << "cases: " << log.summary.case_count << "\n";
  std::cout << "events: " << log.summary.event_count << "\n";
  std::cout << "alphabet: " << corpus.alphabet.size() << "\n";
  std::cout << "variants: " << variant_histogram(corpus).size() << "\n";
  const auto lengths = case_length_histogram(log.cases);
  std::size_t min_len = 0, max_len = 0;
  if (!lengths.empty()) {
    min_len = lengths.begin()->first;
    max_len = lengths.rbegin()->first;
  }
  std::cout << "events per case: min=" << min_len << " max=" << max_len << "\n";
  return 0;
}

int cmd_score(CliOptions& opt) {
  finalize(opt);
  EventLog log = load_log(opt.rc);
  SequenceCorpus corpus = build_pipeline_corpus(log, opt.rc);
  std::vector<ScoredCase> scored =
      score_corpus(corpus, opt.rc.knn, opt.rc.backend, opt.rc.scoring);
  if (opt.output_path.empty()) {
    write_score_dump(std::cout, scored);
  } else {
    std::ofstream out(opt.output_path, std::ios::binary);
    if (!out) throw Error("scoring", "cannot open output file: " + opt.output_path);
    write_score_dump(out, scored);
  }
  return 0;
}

int cmd_detect(CliOptions& opt) {
  finalize(opt);
  std::ifstream dump(opt.scores_path, std::ios::binary);
  if (!dump) throw Error("detect", "cannot open score dump: " + opt.scores_path);
  DetectionReport report = detect_from_dump(opt.rc, dump);
  write_report(report, opt);
  if (!opt.emit_plots_dir.empty()) emit_plots(report, opt.emit_plots_dir);
  print_summary(report, opt.output_path.empty());
  return 0;
}

int cmd_run(CliOptions& opt) {
  finalize(opt);
  std::vector<ScoredCase> scored;
  DetectionReport report = run_pipeline(opt.rc, &scored);
  if (!opt.dump_scores_path.empty()) {
    std::ofstream out(opt.dump_scores_path, std::ios::binary);
    if (!out) throw Error("scoring", "cannot open score dump file: " + opt.dump_scores_path);
    write_score_dump(out, scored);
  }
  write_report(report, opt);
  if (!opt.emit_plots_dir.empty()) emit_plots(report, opt.emit_plots_dir);
  print_summary(report, opt.output_path.empty());
  return 0;
}

struct SynthCli {
  std::size_t n = 0;
  SynthSpec spec;
  std::vector<std::string> variant_specs;  // "0,1,2|3"
  std::vector<std::string> inject_specs;   // "shuffle|10"
  std::string output_path;
  std::string truth_path;
};

std::vector<Symbol> parse_symbol_list(const std::string& text) {
  std::vector<Symbol> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw Error("config", "empty symbol in variant spec '" + text + "'");
    out.push_back(static_cast<Symbol>(std::stoul(item)));
  }
  if (out.empty()) throw Error("config", "variant spec '" + text + "' has no symbols");
  return out;
}

int cmd_synth(SynthCli& opt) {
  for (const auto& vs : opt.variant_specs) {
    const auto bar = vs.find('|');
    if (bar == std::string::npos)
      throw Error("config", "variant spec '" + vs + "' must look like 0,1,2|3 (symbols|weight)");
    opt.spec.normal_variants.emplace_back(parse_symbol_list(vs.substr(0, bar)),
                                          std::stod(vs.substr(bar + 1)));
  }
  for (const auto& is : opt.inject_specs) {
    const auto bar = is.find('|');
    if (bar == std::string::npos)
      throw Error("config", "inject spec '" + is + "' must look like shuffle|10 (kind|count)");
    opt.spec.anomaly_injections.emplace_back(mutation_kind_from_string(is.substr(0, bar)),
                                             std::stoul(is.substr(bar + 1)));
  }
  SynthResult result = generate(opt.spec, opt.n);
  if (opt.output_path.empty()) {
    write_cases_csv(std::cout, result.cases);
  } else {
    std::ofstream out(opt.output_path, std::ios::binary);
    if (!out) throw Error("synth", "cannot open output file: " + opt.output_path);
    write_cases_csv(out, result.cases);
  }
  if (!opt.truth_path.empty()) {
    std::ofstream out(opt.truth_path, std::ios::binary);
    if (!out) throw Error("synth", "cannot open truth file: " + opt.truth_path);
    for (const auto& id : result.anomaly_ids) out << id << '\n';
  }
  std::cerr << "generated " << result.cases.size() << " cases, " << result.anomaly_ids.size()
            << " injected anomalies\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kNN anomaly detector for business-process event logs"};
  app.require_subcommand(1);

  CliOptions ingest_opt, score_opt, detect_opt, run_opt;
  SynthCli synth_opt;

  CLI::App* ingest = app.add_subcommand("ingest", "parse a log and report corpus statistics");
  ingest->set_config("--config");
  add_ingest_flags(ingest, ingest_opt);
  ingest->add_option("--dump-corpus", ingest_opt.dump_corpus_path,
                     "write `case_id: s0 s1 ...` lines to this file");

  CLI::App* score = app.add_subcommand("score", "compute kNN anomaly scores, write a score dump");
  score->set_config("--config");
  add_ingest_flags(score, score_opt);
  add_scoring_flags(score, score_opt);
  score->add_option("--output,-o", score_opt.output_path, "score dump file (default stdout)");

  CLI::App* detect = app.add_subcommand("detect", "apply stats + threshold to a score dump");
  detect->set_config("--config");
  add_ingest_flags(detect, detect_opt);
  detect->add_option("--scores", detect_opt.scores_path, "score dump from the score stage")
      ->required()
      ->check(CLI::ExistingFile);
  detect->add_option("--k,-k", detect_opt.rc.knn.k, "K the dump was scored with")->required();
  detect
      ->add_flag("--exclude-self,!--include-self", detect_opt.rc.knn.exclude_self,
                 "self-exclusion the dump was scored with")
      ->capture_default_str();
  detect
      ->add_option("--similarity-floor", detect_opt.rc.knn.similarity_floor,
                   "epsilon guarding 1/similarity")
      ->capture_default_str();
  detect->add_option("--backend", detect_opt.backend_name, "backend recorded in the report")
      ->capture_default_str();
  add_stats_flags(detect, detect_opt);
  add_detector_flags(detect, detect_opt);
  add_report_flags(detect, detect_opt);

  CLI::App* run = app.add_subcommand("run", "full pipeline: ingest, score, detect, report");
  run->set_config("--config");
  add_ingest_flags(run, run_opt);
  add_scoring_flags(run, run_opt);
  add_stats_flags(run, run_opt);
  add_detector_flags(run, run_opt);
  add_report_flags(run, run_opt);
  run->add_option("--dump-scores", run_opt.dump_scores_path,
                  "also write the intermediate score dump here");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic log with known anomalies");
  synth->set_config("--config");
  synth->add_option("--n,-n", synth_opt.n, "number of cases")->required();
  synth->add_option("--alphabet-size", synth_opt.spec.alphabet_size, "symbol ids 0..size-1")
      ->required();
  synth->add_option("--seed", synth_opt.spec.seed, "RNG seed")->capture_default_str();
  synth->add_option("--noise-prob", synth_opt.spec.noise_prob,
                    "per-position chance a normal case's symbol is redrawn")
      ->capture_default_str();
  synth
      ->add_option("--variant", synth_opt.variant_specs,
                   "normal variant as symbols|weight, e.g. 0,1,2|3 (repeatable)")
      ->required();
  synth->add_option("--inject", synth_opt.inject_specs,
                    "anomaly injection as kind|count, e.g. shuffle|10 (repeatable)");
  synth->add_option("--output,-o", synth_opt.output_path, "log file (default stdout)");
  synth->add_option("--truth", synth_opt.truth_path, "write injected case ids here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(ingest_opt);
    if (score->parsed()) return cmd_score(score_opt);
    if (detect->parsed()) return cmd_detect(detect_opt);
    if (run->parsed()) return cmd_run(run_opt);
    if (synth->parsed()) return cmd_synth(synth_opt);
  } catch (const Error& e) {
    std::cerr << "error [" << e.phase() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
