#include "logknn/knn_scorer.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "logknn/error.hpp"
#include "logknn/event_log.hpp"

namespace logknn {

namespace {

void validate(const SequenceCorpus& corpus, const KnnConfig& config) {
  const std::size_t n = corpus.n();
  if (n < 2) throw Error("scoring", "corpus has " + std::to_string(n) + " sequences; need >= 2");
  if (config.k < 1) throw Error("config", "k must be >= 1");
  const std::size_t k_max = config.exclude_self ? n - 1 : n;
  if (config.k > k_max)
    throw Error("config", "k=" + std::to_string(config.k) + " too large for " +
                              std::to_string(n) + " cases (max " + std::to_string(k_max) +
                              (config.exclude_self ? " excluding self)" : ")"));
  if (!(config.similarity_floor > 0))
    throw Error("config", "similarity floor must be positive");
}

ScoredCase make_scored(const Sequence& seq, std::size_t index, double kth_sim,
                       std::string neighbor_id, double floor) {
  ScoredCase sc;
  sc.case_id = seq.case_id;
  sc.case_index = index;
  sc.kth_similarity = kth_sim;
  sc.anomaly_score = 1.0 / std::max(kth_sim, floor);
  sc.kth_neighbor_id = std::move(neighbor_id);
  sc.similarity_floor_hit = kth_sim < floor;
  return sc;
}

struct SymbolsHash {
  std::size_t operator()(const std::vector<Symbol>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (Symbol s : v) {
      h ^= s;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct Variant {
  const std::vector<Symbol>* symbols = nullptr;
  std::vector<std::size_t> members;  // ascending case indices
};

// Min-heap over (similarity, weight) keeping just enough mass to know the
// weighted k-th largest similarity: entries wholly below rank k are dropped.
class WeightedTopK {
public:
  explicit WeightedTopK(std::size_t k) : k_(k) {}

  void push(double sim, std::size_t weight) {
    entries_.push_back({sim, weight});
    std::push_heap(entries_.begin(), entries_.end(), cmp);
    total_ += weight;
    while (total_ - entries_.front().weight >= k_) {
      total_ -= entries_.front().weight;
      std::pop_heap(entries_.begin(), entries_.end(), cmp);
      entries_.pop_back();
    }
  }

  std::size_t total() const noexcept { return total_; }
  double kth() const noexcept { return entries_.front().sim; }

  void reset() {
    entries_.clear();
    total_ = 0;
  }

private:
  struct Entry {
    double sim;
    std::size_t weight;
  };
  static bool cmp(const Entry& a, const Entry& b) { return a.sim > b.sim; }

  std::size_t k_;
  std::size_t total_ = 0;
  std::vector<Entry> entries_;
};

struct QueryScratch {
  WeightedTopK heap{1};
  std::vector<std::pair<double, std::size_t>> computed;  // (sim, variant), self excluded
  std::vector<std::size_t> tie_members;
};

class DedupScorer {
public:
  DedupScorer(const SequenceCorpus& corpus, const KnnConfig& config, KernelBackend backend,
              const ScoringOptions& options)
      : corpus_(corpus), config_(config), backend_(backend), options_(options) {
    group_variants();
    sort_by_length();
    if (backend_ == KernelBackend::bit_parallel) build_masks();
  }

  std::vector<ScoredCase> run() {
    const std::size_t d = variants_.size();
    std::vector<ScoredCase> out(corpus_.n());

#ifdef _OPENMP
    int threads = options_.threads > 0 ? options_.threads : omp_get_max_threads();
#pragma omp parallel num_threads(threads)
    {
      QueryScratch scratch{WeightedTopK(config_.k), {}, {}};
#pragma omp for schedule(dynamic, 8)
      for (std::int64_t qi = 0; qi < static_cast<std::int64_t>(d); ++qi) {
        score_variant(static_cast<std::size_t>(qi), scratch, out);
        report_progress(variants_[static_cast<std::size_t>(qi)].members.size());
      }
    }
#else
    QueryScratch scratch{WeightedTopK(config_.k), {}, {}};
    for (std::size_t qi = 0; qi < d; ++qi) {
      score_variant(qi, scratch, out);
      report_progress(variants_[qi].members.size());
    }
#endif
    return out;
  }

private:
  void group_variants() {
    std::unordered_map<std::vector<Symbol>, std::size_t, SymbolsHash> seen;
    for (std::size_t i = 0; i < corpus_.n(); ++i) {
      const auto& seq = corpus_.sequences[i];
      auto [it, inserted] = seen.try_emplace(seq.symbols, variants_.size());
      if (inserted) variants_.push_back(Variant{&seq.symbols, {}});
      variants_[it->second].members.push_back(i);
    }
  }

  void sort_by_length() {
    const std::size_t d = variants_.size();
    order_.resize(d);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      const std::size_t la = variants_[a].symbols->size();
      const std::size_t lb = variants_[b].symbols->size();
      return la != lb ? la < lb : a < b;
    });
    pos_of_.resize(d);
    for (std::size_t p = 0; p < d; ++p) pos_of_[order_[p]] = p;
  }

  void build_masks() {
    masks_.reserve(variants_.size());
    for (const auto& v : variants_)
      masks_.emplace_back(std::span<const Symbol>(*v.symbols), corpus_.alphabet.size());
  }

  double pair_similarity(std::size_t a, std::size_t b) const {
    const auto& sa = *variants_[a].symbols;
    const auto& sb = *variants_[b].symbols;
    std::size_t lcs;
    if (backend_ == KernelBackend::bit_parallel) {
      // Mask side = shorter sequence; fewer words per streamed symbol.
      if (sa.size() <= sb.size())
        lcs = masks_[a].lcs_with(sb);
      else
        lcs = masks_[b].lcs_with(sa);
    } else {
      lcs = lcs_length_dp(sa, sb);
    }
    return nlcs_from_lcs(lcs, sa.size(), sb.size());
  }

  void score_variant(std::size_t qi, QueryScratch& s, std::vector<ScoredCase>& out) {
    const Variant& q = variants_[qi];
    const std::size_t len_q = q.symbols->size();
    const std::size_t k = config_.k;
    const std::size_t d = variants_.size();
    const std::size_t self_weight =
        config_.exclude_self ? q.members.size() - 1 : q.members.size();

    s.heap.reset();
    s.computed.clear();
    if (self_weight > 0) s.heap.push(1.0, self_weight);

    // Sweep candidates outward from the query's slot in the length order, so
    // the length-ratio bound is non-increasing and the prune can stop early
    // without ever dropping a candidate that could reach the k-th rank.
    const std::size_t p = pos_of_[qi];
    std::size_t l = p;  // moves left (shorter), exclusive of p itself
    std::size_t r = p + 1;
    auto bound_at = [&](std::size_t pos) {
      return nlcs_upper_bound(len_q, variants_[order_[pos]].symbols->size());
    };
    while (l > 0 || r < d) {
      double bl = l > 0 ? bound_at(l - 1) : -1.0;
      double br = r < d ? bound_at(r) : -1.0;
      double next = std::max(bl, br);
      if (options_.prune && s.heap.total() >= k && next < s.heap.kth()) break;
      std::size_t u;
      if (bl >= br)
        u = order_[--l];
      else
        u = order_[r++];
      const double sim = pair_similarity(qi, u);
      s.heap.push(sim, variants_[u].members.size());
      s.computed.emplace_back(sim, u);
    }

    const double theta = s.heap.kth();
    const double floor = config_.similarity_floor;

    if (theta == 1.0) {
      // Only duplicates of the query itself can sit at similarity 1.0, so the
      // k-th neighbor is the k-th lowest-indexed co-member.
      for (std::size_t mi = 0; mi < q.members.size(); ++mi) {
        const std::size_t i = q.members[mi];
        std::size_t nb;
        if (config_.exclude_self)
          nb = k - 1 < mi ? q.members[k - 1] : q.members[k];
        else
          nb = q.members[k - 1];
        out[i] = make_scored(corpus_.sequences[i], i, theta,
                             corpus_.sequences[nb].case_id, floor);
      }
      return;
    }

    // Rank within the exact-theta tie set, after everything strictly above it.
    std::size_t above = self_weight;
    s.tie_members.clear();
    for (const auto& [sim, u] : s.computed) {
      if (sim > theta)
        above += variants_[u].members.size();
      else if (sim == theta)
        s.tie_members.insert(s.tie_members.end(), variants_[u].members.begin(),
                             variants_[u].members.end());
    }
    const std::size_t rank = k - above;  // 1-based within the tie set
    auto nth = s.tie_members.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(s.tie_members.begin(), nth, s.tie_members.end());
    const std::string& neighbor = corpus_.sequences[*nth].case_id;

    for (std::size_t i : q.members)
      out[i] = make_scored(corpus_.sequences[i], i, theta, neighbor, floor);
  }

  void report_progress(std::size_t cases) {
    if (!options_.progress) return;
    const std::size_t done = done_.fetch_add(cases, std::memory_order_relaxed) + cases;
    std::lock_guard<std::mutex> lock(progress_mutex_);
    options_.progress(done, corpus_.n());
  }

  const SequenceCorpus& corpus_;
  const KnnConfig& config_;
  KernelBackend backend_;
  const ScoringOptions& options_;

  std::vector<Variant> variants_;
  std::vector<std::size_t> order_;   // variant ids sorted by (length, id)
  std::vector<std::size_t> pos_of_;  // inverse of order_
  std::vector<MatchMasks> masks_;

  std::atomic<std::size_t> done_{0};
  std::mutex progress_mutex_;
};

}  // namespace

std::vector<ScoredCase> score_corpus(const SequenceCorpus& corpus, const KnnConfig& config,
                                     KernelBackend backend, const ScoringOptions& options) {
  validate(corpus, config);
  DedupScorer scorer(corpus, config, backend, options);
  return scorer.run();
}

std::vector<ScoredCase> score_corpus_reference(const SequenceCorpus& corpus,
                                               const KnnConfig& config, KernelBackend backend) {
  validate(corpus, config);
  const std::size_t n = corpus.n();
  const std::size_t alphabet = corpus.alphabet.size();
  std::vector<ScoredCase> out(n);
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) {
        if (!config.exclude_self) cand.emplace_back(1.0, i);
        continue;
      }
      cand.emplace_back(nlcs(corpus.sequences[i].symbols, corpus.sequences[j].symbols,
                             backend, alphabet),
                        j);
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const auto& kth = cand[config.k - 1];
    out[i] = make_scored(corpus.sequences[i], i, kth.first,
                         corpus.sequences[kth.second].case_id, config.similarity_floor);
  }
  return out;
}

std::vector<ScoredCase> top_scores(const std::vector<ScoredCase>& scored, std::size_t m) {
  std::vector<ScoredCase> out = scored;
  std::sort(out.begin(), out.end(), [](const ScoredCase& a, const ScoredCase& b) {
    if (a.anomaly_score != b.anomaly_score) return a.anomaly_score > b.anomaly_score;
    return a.case_index < b.case_index;
  });
  if (out.size() > m) out.resize(m);
  return out;
}

std::string format_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

namespace {

std::string quote_field(const std::string& s) {
  if (s.find(';') == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_score_dump(std::ostream& out, const std::vector<ScoredCase>& scored) {
  for (const auto& sc : scored) {
    out << quote_field(sc.case_id) << ';' << format_double17(sc.kth_similarity) << ';'
        << format_double17(sc.anomaly_score) << ';' << quote_field(sc.kth_neighbor_id) << '\n';
  }
}

std::vector<ScoredCase> read_score_dump(std::istream& in, double similarity_floor) {
  std::vector<ScoredCase> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_delimited(line, ';');
    if (fields.size() != 4)
      throw Error("detect", "score dump line " + std::to_string(lineno) + ": expected 4 fields, got " +
                                std::to_string(fields.size()));
    ScoredCase sc;
    sc.case_id = fields[0];
    sc.case_index = out.size();
    char* end = nullptr;
    sc.kth_similarity = std::strtod(fields[1].c_str(), &end);
    if (end == fields[1].c_str() || *end != '\0')
      throw Error("detect", "score dump line " + std::to_string(lineno) + ": bad similarity '" +
                                fields[1] + "'");
    sc.anomaly_score = std::strtod(fields[2].c_str(), &end);
    if (end == fields[2].c_str() || *end != '\0')
      throw Error("detect", "score dump line " + std::to_string(lineno) + ": bad score '" +
                                fields[2] + "'");
    sc.kth_neighbor_id = fields[3];
    sc.similarity_floor_hit = sc.kth_similarity < similarity_floor;
    out.push_back(std::move(sc));
  }
  if (out.empty()) throw Error("detect", "score dump is empty");
  return out;
}

}  // namespace logknn
