#include "logknn/synthgen.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "logknn/error.hpp"
#include "logknn/timestamp.hpp"

namespace logknn {

std::size_t Rng::uniform(std::size_t bound) {
  if (bound == 0) throw Error("synth", "uniform(0) is undefined");
  const std::uint64_t b = bound;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return static_cast<std::size_t>(v % b);
}

MutationKind mutation_kind_from_string(const std::string& name) {
  if (name == "shuffle") return MutationKind::shuffle;
  if (name == "rare-insert") return MutationKind::rare_insert;
  if (name == "truncate") return MutationKind::truncate;
  if (name == "alien-symbols") return MutationKind::alien_symbols;
  throw Error("config", "unknown mutation kind '" + name +
                            "' (expected shuffle, rare-insert, truncate, alien-symbols)");
}

std::string to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::shuffle: return "shuffle";
    case MutationKind::rare_insert: return "rare-insert";
    case MutationKind::truncate: return "truncate";
    case MutationKind::alien_symbols: return "alien-symbols";
  }
  return "?";
}

namespace {

void validate_spec(const SynthSpec& spec, std::size_t n) {
  if (spec.normal_variants.empty()) throw Error("config", "synth spec has no normal variants");
  if (spec.alphabet_size == 0) throw Error("config", "synth alphabet size must be >= 1");
  for (const auto& [symbols, weight] : spec.normal_variants) {
    if (symbols.empty()) throw Error("config", "synth variant template is empty");
    if (!(weight > 0.0)) throw Error("config", "synth variant weight must be positive");
    for (Symbol s : symbols)
      if (s >= spec.alphabet_size)
        throw Error("config", "synth variant symbol " + std::to_string(s) +
                                  " outside alphabet of size " +
                                  std::to_string(spec.alphabet_size));
  }
  std::size_t injected = 0;
  for (const auto& [kind, count] : spec.anomaly_injections) {
    if (count < 1) throw Error("config", "injection count must be >= 1");
    injected += count;
  }
  if (injected >= n)
    throw Error("config", "n=" + std::to_string(n) + " leaves no room for " +
                              std::to_string(injected) + " injected anomalies");
  if (!(spec.noise_prob >= 0.0 && spec.noise_prob < 1.0))
    throw Error("config", "noise probability must be in [0, 1)");
}

std::vector<Symbol> unused_symbols(const SynthSpec& spec) {
  std::vector<bool> used(spec.alphabet_size, false);
  for (const auto& [symbols, weight] : spec.normal_variants)
    for (Symbol s : symbols) used[s] = true;
  std::vector<Symbol> pool;
  for (std::size_t s = 0; s < spec.alphabet_size; ++s)
    if (!used[s]) pool.push_back(static_cast<Symbol>(s));
  return pool;
}

std::size_t pick_variant(const SynthSpec& spec, Rng& rng, double total_weight) {
  const double r = rng.uniform01() * total_weight;
  double acc = 0.0;
  for (std::size_t v = 0; v < spec.normal_variants.size(); ++v) {
    acc += spec.normal_variants[v].second;
    if (r < acc) return v;
  }
  return spec.normal_variants.size() - 1;
}

std::vector<Symbol> mutate(const SynthSpec& spec, MutationKind kind, Rng& rng,
                           double total_weight, const std::vector<Symbol>& alien_pool) {
  std::size_t base_idx = pick_variant(spec, rng, total_weight);
  if (kind == MutationKind::shuffle) {
    // A length-1 template has only the identity permutation.
    std::size_t attempts = 0;
    while (spec.normal_variants[base_idx].first.size() < 2) {
      if (++attempts > 10000)
        throw Error("synth", "shuffle injection needs a variant of length >= 2");
      base_idx = pick_variant(spec, rng, total_weight);
    }
  }
  const auto& base = spec.normal_variants[base_idx].first;
  std::vector<Symbol> out = base;
  switch (kind) {
    case MutationKind::shuffle: {
      do {
        out = base;
        for (std::size_t i = out.size() - 1; i > 0; --i)
          std::swap(out[i], out[rng.uniform(i + 1)]);
      } while (out == base);  // an identity permutation is no anomaly
      break;
    }
    case MutationKind::rare_insert: {
      for (int i = 0; i < 3; ++i) {
        const Symbol s = alien_pool.empty()
                             ? static_cast<Symbol>(rng.uniform(spec.alphabet_size))
                             : alien_pool[rng.uniform(alien_pool.size())];
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(rng.uniform(out.size() + 1)), s);
      }
      break;
    }
    case MutationKind::truncate: {
      out.resize(std::max<std::size_t>(1, base.size() / 3));
      break;
    }
    case MutationKind::alien_symbols: {
      if (alien_pool.empty())
        throw Error("synth",
                    "alien-symbols injection needs alphabet symbols unused by the variants");
      for (auto& s : out) s = alien_pool[rng.uniform(alien_pool.size())];
      break;
    }
  }
  return out;
}

std::string case_name(std::size_t index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "case-%06zu", index);
  return std::string(buf);
}

}  // namespace

std::string synth_label(Symbol s) { return "a" + std::to_string(s); }

SynthResult generate(const SynthSpec& spec, std::size_t n) {
  validate_spec(spec, n);
  Rng rng(spec.seed);

  double total_weight = 0.0;
  for (const auto& [symbols, weight] : spec.normal_variants) total_weight += weight;
  const std::vector<Symbol> alien_pool = unused_symbols(spec);

  std::vector<std::vector<Symbol>> sequences(n);
  std::set<std::vector<Symbol>> normal_set;
  for (std::size_t i = 0; i < n; ++i) {
    auto seq = spec.normal_variants[pick_variant(spec, rng, total_weight)].first;
    if (spec.noise_prob > 0.0) {
      for (auto& s : seq)
        if (rng.uniform01() < spec.noise_prob)
          s = static_cast<Symbol>(rng.uniform(spec.alphabet_size));
    }
    sequences[i] = std::move(seq);
    normal_set.insert(sequences[i]);
  }

  SynthResult result;
  std::set<std::size_t> taken;
  for (const auto& [kind, count] : spec.anomaly_injections) {
    for (std::size_t c = 0; c < count; ++c) {
      std::size_t pos;
      do {
        pos = rng.uniform(n);
      } while (taken.count(pos));
      taken.insert(pos);

      // Resample until the mutant matches no benign sequence. normal_set may
      // still hold sequences from slots already replaced, which only makes
      // the rejection stricter, never wrong.
      std::vector<Symbol> mutant;
      std::size_t attempts = 0;
      do {
        if (++attempts > 10000)
          throw Error("synth", "could not produce a distinct " + to_string(kind) +
                                   " anomaly after 10000 attempts");
        mutant = mutate(spec, kind, rng, total_weight, alien_pool);
      } while (normal_set.count(mutant));
      sequences[pos] = std::move(mutant);
      result.anomaly_ids.insert(case_name(pos));
    }
  }

  const EpochSeconds epoch = days_from_civil(2020, 1, 1) * 86400;
  result.cases.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RawCase rc;
    rc.case_id = case_name(i);
    rc.events.reserve(sequences[i].size());
    const EpochSeconds start = epoch + static_cast<EpochSeconds>(i) * 3600;
    for (std::size_t j = 0; j < sequences[i].size(); ++j) {
      EventRecord ev;
      ev.case_id = rc.case_id;
      ev.activity = synth_label(sequences[i][j]);
      ev.timestamp = start + static_cast<EpochSeconds>(j) * 60;
      rc.events.push_back(std::move(ev));
    }
    result.cases.push_back(std::move(rc));
  }
  return result;
}

void write_cases_csv(std::ostream& out, const std::vector<RawCase>& cases) {
  for (const auto& rc : cases)
    for (const auto& ev : rc.events)
      out << ev.case_id << ';' << ev.activity << ';' << format_timestamp(ev.timestamp) << '\n';
}

}  // namespace logknn
