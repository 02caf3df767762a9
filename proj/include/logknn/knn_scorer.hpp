#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "logknn/encoding.hpp"
#include "logknn/lcs_kernel.hpp"

namespace logknn {

struct KnnConfig {
  std::size_t k = 0;  // required; validated against n before any work
  bool exclude_self = true;
  double similarity_floor = 1e-9;  // epsilon guarding the inverse
};

struct ScoredCase {
  std::string case_id;
  std::size_t case_index = 0;
  double kth_similarity = 0.0;
  double anomaly_score = 0.0;  // 1 / max(kth_similarity, floor)
  std::string kth_neighbor_id;
  double z_score = 0.0;  // filled by the stats stage
  bool similarity_floor_hit = false;
};

struct ScoringOptions {
  int threads = 0;    // 0 = runtime default
  bool prune = true;  // skip candidates whose length-ratio bound cannot matter
  // Called occasionally with (cases done, cases total); may run on any worker.
  std::function<void(std::size_t, std::size_t)> progress;
};

// One ScoredCase per sequence, in case order. Identical sequences are scored
// once per distinct variant; results are exact (bit-equal to the reference
// scorer) under any thread count, pruning setting, and corpus permutation.
// Ties at the k-th rank resolve by (similarity desc, case index asc).
std::vector<ScoredCase> score_corpus(const SequenceCorpus& corpus, const KnnConfig& config,
                                     KernelBackend backend, const ScoringOptions& options = {});

// Naive serial oracle: every query sorts all its candidate similarities.
std::vector<ScoredCase> score_corpus_reference(const SequenceCorpus& corpus,
                                               const KnnConfig& config, KernelBackend backend);

// m highest anomaly scores, descending, ties by case index ascending.
std::vector<ScoredCase> top_scores(const std::vector<ScoredCase>& scored, std::size_t m);

// `case_id;kth_similarity;anomaly_score;kth_neighbor_id`, one row per case in
// case order. Doubles are printed with 17 significant digits so a re-read
// reproduces them bit-exactly.
void write_score_dump(std::ostream& out, const std::vector<ScoredCase>& scored);
std::vector<ScoredCase> read_score_dump(std::istream& in, double similarity_floor);

std::string format_double17(double v);

}  // namespace logknn
