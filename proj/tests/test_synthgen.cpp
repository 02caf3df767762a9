#include "logknn/synthgen.hpp"

#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "logknn/error.hpp"
#include "support/test_helpers.hpp"

using namespace logknn;

namespace {

SynthSpec basic_spec() {
  SynthSpec spec;
  spec.alphabet_size = 8;
  spec.seed = 1;
  spec.normal_variants = {{{0, 1, 2, 3}, 2.0}, {{0, 1, 4, 5, 3}, 1.0}};
  return spec;
}

// encode with the generator's own label table so corpus symbol ids equal the
// template values (first-appearance encoding would renumber them).
Alphabet synth_alphabet(std::size_t size) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < size; ++i) labels.push_back(synth_label(static_cast<Symbol>(i)));
  return Alphabet::from_labels(labels);
}

}  // namespace

TEST_SUITE("synthgen") {

TEST_CASE("same seed, same log; different seed, different log") {
  auto spec = basic_spec();
  spec.noise_prob = 0.1;
  spec.anomaly_injections = {{MutationKind::shuffle, 3}};
  auto a = generate(spec, 200);
  auto b = generate(spec, 200);
  REQUIRE(a.cases.size() == b.cases.size());
  CHECK(a.anomaly_ids == b.anomaly_ids);
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    CHECK(a.cases[i].case_id == b.cases[i].case_id);
    REQUIRE(a.cases[i].events.size() == b.cases[i].events.size());
    for (std::size_t j = 0; j < a.cases[i].events.size(); ++j) {
      CHECK(a.cases[i].events[j].activity == b.cases[i].events[j].activity);
      CHECK(a.cases[i].events[j].timestamp == b.cases[i].events[j].timestamp);
    }
  }

  spec.seed = 2;
  auto c = generate(spec, 200);
  bool any_difference = c.anomaly_ids != a.anomaly_ids;
  for (std::size_t i = 0; i < a.cases.size() && !any_difference; ++i) {
    if (a.cases[i].events.size() != c.cases[i].events.size()) any_difference = true;
  }
  CHECK(any_difference);
}

TEST_CASE("counts and ids") {
  auto spec = basic_spec();
  spec.anomaly_injections = {{MutationKind::shuffle, 2}, {MutationKind::truncate, 3}};
  auto result = generate(spec, 50);
  CHECK(result.cases.size() == 50);
  CHECK(result.anomaly_ids.size() == 5);
  CHECK(result.cases[0].case_id == "case-000000");
  CHECK(result.cases[49].case_id == "case-000049");
  for (const auto& id : result.anomaly_ids)
    CHECK(std::any_of(result.cases.begin(), result.cases.end(),
                      [&](const RawCase& c) { return c.case_id == id; }));
}

TEST_CASE("timestamps increase within each case") {
  auto result = generate(basic_spec(), 20);
  for (const auto& c : result.cases)
    for (std::size_t i = 1; i < c.events.size(); ++i)
      CHECK(c.events[i - 1].timestamp < c.events[i].timestamp);
}

TEST_CASE("without noise every normal matches a template") {
  auto spec = basic_spec();
  auto result = generate(spec, 100);
  CHECK(result.anomaly_ids.empty());
  auto corpus = build_corpus(result.cases);
  // Labels are a0..a7; map templates through the observed alphabet.
  for (const auto& c : result.cases) {
    std::vector<Symbol> got;
    for (const auto& ev : c.events) {
      REQUIRE(!ev.activity.empty());
      got.push_back(static_cast<Symbol>(std::stoul(ev.activity.substr(1))));
    }
    const bool matches = std::any_of(
        spec.normal_variants.begin(), spec.normal_variants.end(),
        [&](const auto& v) { return v.first == got; });
    CHECK(matches);
  }
}

TEST_CASE("variant weights shape the mix") {
  auto spec = basic_spec();  // weights 2:1
  auto result = generate(spec, 900);
  std::size_t first = 0;
  for (const auto& c : result.cases)
    if (c.events.size() == 4) ++first;
  // Expect about 600; a wide tolerance keeps this robust across reseeding.
  CHECK(first > 480);
  CHECK(first < 720);
}

TEST_CASE("injected sequences differ from every normal sequence") {
  auto spec = basic_spec();
  spec.noise_prob = 0.05;
  spec.anomaly_injections = {{MutationKind::shuffle, 4},
                             {MutationKind::rare_insert, 3},
                             {MutationKind::truncate, 3},
                             {MutationKind::alien_symbols, 2}};
  auto result = generate(spec, 300);
  REQUIRE(result.anomaly_ids.size() == 12);

  auto corpus = build_corpus(result.cases);
  std::vector<std::vector<Symbol>> normals, injected;
  for (std::size_t i = 0; i < corpus.n(); ++i) {
    const auto& seq = corpus.sequences[i];
    if (result.anomaly_ids.count(seq.case_id))
      injected.push_back(seq.symbols);
    else
      normals.push_back(seq.symbols);
  }
  for (const auto& bad : injected)
    for (const auto& good : normals) CHECK(bad != good);
}

TEST_CASE("mutation shapes") {
  auto spec = basic_spec();

  SUBCASE("shuffle permutes a template's multiset") {
    spec.anomaly_injections = {{MutationKind::shuffle, 5}};
    auto result = generate(spec, 60);
    auto corpus = build_corpus(result.cases, synth_alphabet(spec.alphabet_size));
    for (std::size_t i = 0; i < corpus.n(); ++i) {
      if (!result.anomaly_ids.count(corpus.sequences[i].case_id)) continue;
      auto sorted = corpus.sequences[i].symbols;
      std::sort(sorted.begin(), sorted.end());
      bool matches_some_template = false;
      for (const auto& [tmpl, _] : spec.normal_variants) {
        auto t = tmpl;
        std::sort(t.begin(), t.end());
        // Noise is off, so the multiset must match a template exactly.
        if (t == sorted) matches_some_template = true;
      }
      CHECK(matches_some_template);
    }
  }
  SUBCASE("truncate keeps a proper prefix") {
    spec.anomaly_injections = {{MutationKind::truncate, 5}};
    auto result = generate(spec, 60);
    auto corpus = build_corpus(result.cases, synth_alphabet(spec.alphabet_size));
    for (std::size_t i = 0; i < corpus.n(); ++i) {
      if (!result.anomaly_ids.count(corpus.sequences[i].case_id)) continue;
      const auto& got = corpus.sequences[i].symbols;
      bool is_prefix = false;
      for (const auto& [tmpl, _] : spec.normal_variants) {
        if (got.size() < tmpl.size() &&
            std::equal(got.begin(), got.end(), tmpl.begin()))
          is_prefix = true;
      }
      CHECK(is_prefix);
      CHECK(!got.empty());
    }
  }
  SUBCASE("rare-insert grows the sequence by three") {
    spec.anomaly_injections = {{MutationKind::rare_insert, 5}};
    auto result = generate(spec, 60);
    auto corpus = build_corpus(result.cases);
    for (std::size_t i = 0; i < corpus.n(); ++i) {
      if (!result.anomaly_ids.count(corpus.sequences[i].case_id)) continue;
      const std::size_t len = corpus.sequences[i].symbols.size();
      CHECK((len == 4 + 3 || len == 5 + 3));
    }
  }
  SUBCASE("alien symbols come from outside the templates") {
    spec.anomaly_injections = {{MutationKind::alien_symbols, 5}};
    auto result = generate(spec, 60);
    std::set<std::string> template_labels;
    for (const auto& [tmpl, _] : spec.normal_variants)
      for (Symbol s : tmpl) template_labels.insert(synth_label(s));
    for (const auto& c : result.cases) {
      if (!result.anomaly_ids.count(c.case_id)) continue;
      bool any_alien = false;
      for (const auto& ev : c.events)
        if (!template_labels.count(ev.activity)) any_alien = true;
      CHECK(any_alien);
    }
  }
}

TEST_CASE("validation") {
  SynthSpec spec;
  spec.alphabet_size = 4;
  spec.seed = 1;

  SUBCASE("no variants") { CHECK_THROWS_AS(generate(spec, 10), Error); }
  SUBCASE("template symbol outside the alphabet") {
    spec.normal_variants = {{{0, 9}, 1.0}};
    CHECK_THROWS_AS(generate(spec, 10), Error);
  }
  SUBCASE("nonpositive weight") {
    spec.normal_variants = {{{0, 1}, 0.0}};
    CHECK_THROWS_AS(generate(spec, 10), Error);
  }
  SUBCASE("empty template") {
    spec.normal_variants = {{{}, 1.0}};
    CHECK_THROWS_AS(generate(spec, 10), Error);
  }
  SUBCASE("more injections than cases") {
    spec.normal_variants = {{{0, 1}, 1.0}};
    spec.anomaly_injections = {{MutationKind::shuffle, 11}};
    CHECK_THROWS_AS(generate(spec, 10), Error);
  }
  SUBCASE("noise probability out of range") {
    spec.normal_variants = {{{0, 1}, 1.0}};
    spec.noise_prob = 1.5;
    CHECK_THROWS_AS(generate(spec, 10), Error);
  }
  SUBCASE("alien mutation with a saturated alphabet") {
    // Every symbol is used by the templates: nothing alien can exist.
    spec.alphabet_size = 2;
    spec.normal_variants = {{{0, 1}, 1.0}};
    spec.anomaly_injections = {{MutationKind::alien_symbols, 1}};
    CHECK_THROWS_AS(generate(spec, 10), Error);
  }
  SUBCASE("zero cases") {
    spec.normal_variants = {{{0, 1}, 1.0}};
    CHECK_THROWS_AS(generate(spec, 0), Error);
  }
}

TEST_CASE("mutation kind names") {
  CHECK(to_string(MutationKind::shuffle) == "shuffle");
  CHECK(to_string(MutationKind::rare_insert) == "rare-insert");
  CHECK(to_string(MutationKind::truncate) == "truncate");
  CHECK(to_string(MutationKind::alien_symbols) == "alien-symbols");
  for (const char* name : {"shuffle", "rare-insert", "truncate", "alien-symbols"})
    CHECK(to_string(mutation_kind_from_string(name)) == name);
  CHECK_THROWS_AS(mutation_kind_from_string("swap"), Error);
}

TEST_CASE("pinned engine stream") {
  // mt19937_64's output is fixed by the standard; the 10000th draw from seed
  // 5489 is part of its reference stream, so a platform drift would show here.
  std::mt19937_64 reference(5489);
  Rng rng(5489);
  for (int i = 0; i < 9999; ++i) {
    reference();
    rng.next();
  }
  CHECK(reference() == 9981545732273789042ull);
  CHECK(rng.next() == 9981545732273789042ull);
}

TEST_CASE("uniform draws respect the bound") {
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    CHECK(rng.uniform(7) < 7);
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(rng.uniform(1) == 0);
}

TEST_CASE("csv round trip through ingest and encoding") {
  auto spec = basic_spec();
  spec.noise_prob = 0.02;
  spec.anomaly_injections = {{MutationKind::rare_insert, 2}};
  auto result = generate(spec, 80);

  std::ostringstream csv;
  write_cases_csv(csv, result.cases);
  std::istringstream in(csv.str());
  auto log = parse_log(in, IngestConfig{});

  REQUIRE(log.cases.size() == result.cases.size());
  for (std::size_t i = 0; i < log.cases.size(); ++i) {
    CHECK(log.cases[i].case_id == result.cases[i].case_id);
    REQUIRE(log.cases[i].events.size() == result.cases[i].events.size());
    for (std::size_t j = 0; j < log.cases[i].events.size(); ++j)
      CHECK(log.cases[i].events[j].activity == result.cases[i].events[j].activity);
  }

  auto direct = build_corpus(result.cases);
  auto reparsed = build_corpus(log.cases);
  REQUIRE(direct.n() == reparsed.n());
  for (std::size_t i = 0; i < direct.n(); ++i)
    CHECK(direct.sequences[i].symbols == reparsed.sequences[i].symbols);
}

}  // TEST_SUITE
