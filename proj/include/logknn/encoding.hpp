#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "logknn/event_log.hpp"

namespace logknn {

using Symbol = std::uint32_t;

// Bijection between activity labels and contiguous ids 0..size-1.
struct Alphabet {
  std::vector<std::string> labels;
  std::unordered_map<std::string, Symbol> index;

  static Alphabet from_labels(std::vector<std::string> labels);
  // Two-column file, `label<TAB>id`; ids must cover 0..size-1 exactly.
  static Alphabet load(const std::string& path);

  std::size_t size() const noexcept { return labels.size(); }
};

struct Sequence {
  std::string case_id;
  std::vector<Symbol> symbols;

  std::size_t length() const noexcept { return symbols.size(); }
};

struct SequenceCorpus {
  Alphabet alphabet;
  std::vector<Sequence> sequences;  // one per case, input order
  std::size_t excluded_cases = 0;   // cases dropped for having no events

  std::size_t n() const noexcept { return sequences.size(); }
};

// Alphabet ids assigned in order of first appearance across the case stream.
SequenceCorpus build_corpus(const std::vector<RawCase>& cases);

// Ids taken from the explicit table; any activity missing from it is fatal,
// with every offending label listed in the error.
SequenceCorpus build_corpus(const std::vector<RawCase>& cases, const Alphabet& table);

// Rewrites raw activity names to their canonical label before encoding.
using LabelMap = std::unordered_map<std::string, std::string>;
LabelMap load_label_map(const std::string& path);  // `raw<TAB>canonical`
void apply_label_map(std::vector<RawCase>& cases, const LabelMap& map);

std::vector<std::string> decode(const Sequence& seq, const Alphabet& alphabet);

// Order-sensitive 64-bit digest of the label list, as 16 hex chars; reports
// carry it so two runs can be compared for alphabet agreement at a glance.
std::string alphabet_fingerprint(const Alphabet& alphabet);

// distinct symbol sequence -> number of cases sharing it; counts sum to n
std::map<std::vector<Symbol>, std::size_t> variant_histogram(const SequenceCorpus& corpus);

// One line per case: `case_id: s0 s1 s2 ...`
void dump_corpus(std::ostream& out, const SequenceCorpus& corpus);

}  // namespace logknn
