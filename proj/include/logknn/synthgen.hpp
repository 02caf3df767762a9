#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "logknn/encoding.hpp"
#include "logknn/event_log.hpp"

namespace logknn {

// mt19937_64 with unbiased draws on top: the engine's stream is pinned by the
// standard, so one seed yields one log on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, bound), bound >= 1, rejection-sampled.
  std::size_t uniform(std::size_t bound);

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 gen_;
};

enum class MutationKind { shuffle, rare_insert, truncate, alien_symbols };

MutationKind mutation_kind_from_string(const std::string& name);
std::string to_string(MutationKind kind);

struct SynthSpec {
  std::vector<std::pair<std::vector<Symbol>, double>> normal_variants;  // (template, weight)
  std::vector<std::pair<MutationKind, std::size_t>> anomaly_injections; // (kind, count)
  std::size_t alphabet_size = 0;
  std::uint64_t seed = 0;
  // Per-position chance that a normal case's symbol is redrawn uniformly.
  double noise_prob = 0.0;
};

struct SynthResult {
  std::vector<RawCase> cases;          // case ids "case-000000".."case-NNNNNN"
  std::set<std::string> anomaly_ids;   // ground truth for recall measurement
};

// n cases: normals sampled from the weighted variants with local noise,
// injected anomalies substituted at seed-chosen positions. An injected
// sequence is resampled until it differs from every normal sequence, so the
// ground truth is never accidentally benign.
SynthResult generate(const SynthSpec& spec, std::size_t n);

// Activity label for a symbol in generated logs.
std::string synth_label(Symbol s);

// `case_id;activity;timestamp` rows, the default ingest layout. Timestamps
// are a fixed epoch plus per-event minute steps, so re-parsing reproduces the
// generated order exactly.
void write_cases_csv(std::ostream& out, const std::vector<RawCase>& cases);

}  // namespace logknn
