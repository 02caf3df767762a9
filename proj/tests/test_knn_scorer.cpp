#include "logknn/knn_scorer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "logknn/error.hpp"
#include "logknn/synthgen.hpp"
#include "support/test_helpers.hpp"

using namespace logknn;

namespace {

KnnConfig knn(std::size_t k, bool exclude_self = true) {
  KnnConfig config;
  config.k = k;
  config.exclude_self = exclude_self;
  return config;
}

void check_same(const std::vector<ScoredCase>& got, const std::vector<ScoredCase>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CAPTURE(i);
    CHECK(got[i].case_id == want[i].case_id);
    CHECK(got[i].case_index == want[i].case_index);
    CHECK(got[i].kth_similarity == want[i].kth_similarity);  // bit-equal
    CHECK(got[i].anomaly_score == want[i].anomaly_score);
    CHECK(got[i].kth_neighbor_id == want[i].kth_neighbor_id);
    CHECK(got[i].similarity_floor_hit == want[i].similarity_floor_hit);
  }
}

}  // namespace

TEST_SUITE("scorer") {

TEST_CASE("identical sequences, nearest neighbors by index") {
  auto corpus = test::make_corpus({{0, 1}, {0, 1}, {0, 1}}, 2);
  auto scored = score_corpus(corpus, knn(1), KernelBackend::bit_parallel);
  REQUIRE(scored.size() == 3);
  for (const auto& sc : scored) {
    CHECK(sc.kth_similarity == 1.0);
    CHECK(sc.anomaly_score == 1.0);
    CHECK_FALSE(sc.similarity_floor_hit);
  }
  // Self excluded, ties by case index ascending.
  CHECK(scored[0].kth_neighbor_id == "case-1");
  CHECK(scored[1].kth_neighbor_id == "case-0");
  CHECK(scored[2].kth_neighbor_id == "case-0");

  SUBCASE("k=2 shifts the tie pick") {
    auto s2 = score_corpus(corpus, knn(2), KernelBackend::bit_parallel);
    CHECK(s2[0].kth_neighbor_id == "case-2");
    CHECK(s2[1].kth_neighbor_id == "case-2");
    CHECK(s2[2].kth_neighbor_id == "case-1");
  }
  SUBCASE("include_self makes the first neighbor the case itself") {
    auto s = score_corpus(corpus, knn(1, false), KernelBackend::bit_parallel);
    CHECK(s[0].kth_neighbor_id == "case-0");
    CHECK(s[1].kth_neighbor_id == "case-0");  // lowest index wins the 1.0 tie
    CHECK(s[2].kth_neighbor_id == "case-0");
  }
}

TEST_CASE("disjoint case hits the similarity floor") {
  auto corpus = test::make_corpus({{0, 1, 2, 3}, {0, 1, 2, 3}, {7, 8}}, 9);
  auto scored = score_corpus(corpus, knn(1), KernelBackend::bit_parallel);
  CHECK(scored[0].anomaly_score == 1.0);
  CHECK(scored[1].anomaly_score == 1.0);
  CHECK(scored[2].kth_similarity == 0.0);
  CHECK(scored[2].anomaly_score == 1.0 / 1e-9);  // inverse guarded by the floor
  CHECK(scored[2].similarity_floor_hit);

  auto top = top_scores(scored, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].case_id == "case-2");
  CHECK(top[1].case_id == "case-0");  // score tie resolves by index
}

TEST_CASE("score is the guarded inverse of the similarity") {
  Rng rng(5150);
  auto corpus = test::random_corpus(rng, 60, 1, 25, 6);
  for (const auto& sc : score_corpus(corpus, knn(5), KernelBackend::bit_parallel)) {
    const double sim = std::max(sc.kth_similarity, 1e-9);
    CHECK(sc.anomaly_score * sim == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sc.anomaly_score >= 1.0);  // similarity never exceeds 1
  }
}

TEST_CASE("validation") {
  auto corpus = test::make_corpus({{0}, {1}, {2}}, 3);
  CHECK_THROWS_AS(score_corpus(corpus, knn(0), KernelBackend::bit_parallel), Error);
  CHECK_THROWS_AS(score_corpus(corpus, knn(3), KernelBackend::bit_parallel), Error);
  CHECK_NOTHROW(score_corpus(corpus, knn(2), KernelBackend::bit_parallel));
  CHECK_NOTHROW(score_corpus(corpus, knn(3, false), KernelBackend::bit_parallel));
  CHECK_THROWS_AS(score_corpus(corpus, knn(4, false), KernelBackend::bit_parallel), Error);

  KnnConfig bad_floor = knn(1);
  bad_floor.similarity_floor = 0.0;
  CHECK_THROWS_AS(score_corpus(corpus, bad_floor, KernelBackend::bit_parallel), Error);

  auto tiny = test::make_corpus({{0}}, 1);
  CHECK_THROWS_AS(score_corpus(tiny, knn(1), KernelBackend::bit_parallel), Error);
}

TEST_CASE("matches the full-sort reference on random corpora") {
  Rng rng(9001);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 20 + rng.uniform(100);
    const std::size_t alphabet = 2 + rng.uniform(12);
    auto corpus = test::random_corpus(rng, n, 1, 30, alphabet);
    for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{19}}) {
      for (bool exclude_self : {true, false}) {
        auto config = knn(k, exclude_self);
        auto want = score_corpus_reference(corpus, config, KernelBackend::reference_dp);
        for (bool prune : {true, false}) {
          for (int threads : {1, 3}) {
            ScoringOptions options;
            options.prune = prune;
            options.threads = threads;
            CAPTURE(trial);
            CAPTURE(k);
            CAPTURE(exclude_self);
            CAPTURE(prune);
            CAPTURE(threads);
            check_same(score_corpus(corpus, config, KernelBackend::bit_parallel, options), want);
          }
        }
      }
    }
  }
}

TEST_CASE("backends agree bit for bit") {
  Rng rng(404);
  auto corpus = test::random_corpus(rng, 80, 1, 40, 10);
  auto a = score_corpus(corpus, knn(7), KernelBackend::bit_parallel);
  auto b = score_corpus(corpus, knn(7), KernelBackend::reference_dp);
  check_same(a, b);
}

TEST_CASE("permutation invariance") {
  Rng rng(808);
  auto corpus = test::random_corpus(rng, 70, 1, 25, 8);
  auto base = score_corpus(corpus, knn(5), KernelBackend::bit_parallel);

  // Reverse the corpus; every per-case result must be unchanged.
  SequenceCorpus reversed;
  reversed.alphabet = corpus.alphabet;
  reversed.sequences.assign(corpus.sequences.rbegin(), corpus.sequences.rend());
  auto moved = score_corpus(reversed, knn(5), KernelBackend::bit_parallel);
  const std::size_t n = corpus.n();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& was = base[i];
    const auto& now = moved[n - 1 - i];
    CHECK(now.case_id == was.case_id);
    CHECK(now.kth_similarity == was.kth_similarity);
    CHECK(now.anomaly_score == was.anomaly_score);
    // Neighbor ids may differ under reordering (ties resolve by the new
    // indices), but the similarity the neighbor realizes may not.
  }
}

TEST_CASE("kth similarity is non-increasing in k") {
  Rng rng(606);
  auto corpus = test::random_corpus(rng, 50, 1, 20, 5);
  std::vector<double> prev;
  for (std::size_t k = 1; k < 10; ++k) {
    auto scored = score_corpus(corpus, knn(k), KernelBackend::bit_parallel);
    if (!prev.empty())
      for (std::size_t i = 0; i < scored.size(); ++i) CHECK(scored[i].kth_similarity <= prev[i]);
    prev.clear();
    for (const auto& sc : scored) prev.push_back(sc.kth_similarity);
  }
}

TEST_CASE("duplicate groups carry their full weight") {
  // Three copies of [0,1], one [0,2]: nlcs between the variants is 1/2.
  auto corpus = test::make_corpus({{0, 1}, {0, 1}, {0, 1}, {0, 2}}, 3);

  SUBCASE("k=2 query in the big group stays at 1.0") {
    auto scored = score_corpus(corpus, knn(2), KernelBackend::bit_parallel);
    CHECK(scored[0].kth_similarity == 1.0);
    CHECK(scored[0].kth_neighbor_id == "case-2");
    CHECK(scored[3].kth_similarity == 0.5);  // both its neighbors sit at 1/2
    CHECK(scored[3].kth_neighbor_id == "case-1");
  }
  SUBCASE("k=3 crosses into the other variant") {
    auto scored = score_corpus(corpus, knn(3), KernelBackend::bit_parallel);
    CHECK(scored[0].kth_similarity == 0.5);
    CHECK(scored[0].kth_neighbor_id == "case-3");
    CHECK(scored[3].kth_similarity == 0.5);
    CHECK(scored[3].kth_neighbor_id == "case-2");
  }
  SUBCASE("reference agrees everywhere") {
    for (std::size_t k = 1; k <= 3; ++k)
      check_same(score_corpus(corpus, knn(k), KernelBackend::bit_parallel),
                 score_corpus_reference(corpus, knn(k), KernelBackend::reference_dp));
  }
}

TEST_CASE("tie set spanning several variants") {
  // Two [0,1,2], two [0,1,3], one [5]: cross-variant similarity is 2/3, so at
  // k=3 a query in the first variant lands inside the two-member tie set.
  auto corpus = test::make_corpus({{0, 1, 2}, {0, 1, 3}, {0, 1, 2}, {0, 1, 3}, {5}}, 6);
  auto scored = score_corpus(corpus, knn(3), KernelBackend::bit_parallel);
  CHECK(scored[0].kth_similarity == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(scored[0].kth_neighbor_id == "case-3");  // rank 2 inside tie set {1,3}
  CHECK(scored[2].kth_neighbor_id == "case-3");
  CHECK(scored[1].kth_neighbor_id == "case-2");  // tie set {0,2}
  // The length-1 alien: lcs([5], anything)=0... k=3 of four zeros.
  CHECK(scored[4].kth_similarity == 0.0);
  CHECK(scored[4].similarity_floor_hit);
  check_same(scored, score_corpus_reference(corpus, knn(3), KernelBackend::reference_dp));
}

TEST_CASE("progress reaches the total") {
  Rng rng(33);
  auto corpus = test::random_corpus(rng, 40, 1, 15, 4);
  std::atomic<std::size_t> last{0};
  ScoringOptions options;
  options.threads = 2;
  options.progress = [&](std::size_t done, std::size_t total) {
    CHECK(done <= total);
    last = std::max(last.load(), done);
  };
  score_corpus(corpus, knn(3), KernelBackend::bit_parallel, options);
  CHECK(last == corpus.n());
}

TEST_CASE("top_scores ordering") {
  std::vector<ScoredCase> scored(4);
  for (std::size_t i = 0; i < 4; ++i) {
    scored[i].case_id = "case-" + std::to_string(i);
    scored[i].case_index = i;
  }
  scored[0].anomaly_score = 3.0;
  scored[1].anomaly_score = 1.0;
  scored[2].anomaly_score = 3.0;
  scored[3].anomaly_score = 2.0;
  auto top = top_scores(scored, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].case_index == 0);  // tie with case-2 resolves by index
  CHECK(top[1].case_index == 2);
  CHECK(top[2].case_index == 3);
  CHECK(top_scores(scored, 10).size() == 4);  // m larger than n is fine
}

TEST_CASE("score dump round trips bit-exactly") {
  Rng rng(2112);
  auto corpus = test::random_corpus(rng, 50, 1, 20, 6);
  auto scored = score_corpus(corpus, knn(4), KernelBackend::bit_parallel);

  std::ostringstream out;
  write_score_dump(out, scored);
  std::istringstream in(out.str());
  auto back = read_score_dump(in, 1e-9);
  check_same(back, scored);
}

TEST_CASE("score dump quoting") {
  std::vector<ScoredCase> scored(1);
  scored[0].case_id = "odd;id\"x";
  scored[0].kth_similarity = 0.25;
  scored[0].anomaly_score = 4.0;
  scored[0].kth_neighbor_id = "other;id";
  std::ostringstream out;
  write_score_dump(out, scored);
  CHECK(out.str() == "\"odd;id\"\"x\";0.25;4;\"other;id\"\n");
  std::istringstream in(out.str());
  auto back = read_score_dump(in, 1e-9);
  REQUIRE(back.size() == 1);
  CHECK(back[0].case_id == "odd;id\"x");
  CHECK(back[0].kth_neighbor_id == "other;id");
}

TEST_CASE("score dump parse errors") {
  std::istringstream three_fields("a;1;2\n");
  CHECK_THROWS_AS(read_score_dump(three_fields, 1e-9), Error);
  std::istringstream bad_double("a;one;2;b\n");
  CHECK_THROWS_AS(read_score_dump(bad_double, 1e-9), Error);
  std::istringstream trailing("a;1;2x;b\n");
  CHECK_THROWS_AS(read_score_dump(trailing, 1e-9), Error);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_score_dump(empty, 1e-9), Error);
}

TEST_CASE("format_double17 round trips doubles") {
  for (double v : {1.0, 1.0 / 3.0, 0.1, 1e-9, 1e9, 2.0 / std::sqrt(8.0), 5.196152422706632}) {
    CHECK(std::strtod(format_double17(v).c_str(), nullptr) == v);
  }
}

}  // TEST_SUITE
