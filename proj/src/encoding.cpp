#include "logknn/encoding.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <set>

#include "logknn/error.hpp"

namespace logknn {

namespace {

std::string trim_copy(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

SequenceCorpus build_corpus_impl(const std::vector<RawCase>& cases, const Alphabet* table) {
  SequenceCorpus corpus;
  if (table) corpus.alphabet = *table;
  std::set<std::string> unknown;

  for (const auto& rc : cases) {
    if (rc.events.empty()) {
      ++corpus.excluded_cases;
      continue;
    }
    Sequence seq;
    seq.case_id = rc.case_id;
    seq.symbols.reserve(rc.events.size());
    for (const auto& ev : rc.events) {
      auto it = corpus.alphabet.index.find(ev.activity);
      if (it == corpus.alphabet.index.end()) {
        if (table) {
          unknown.insert(ev.activity);
          continue;
        }
        Symbol id = static_cast<Symbol>(corpus.alphabet.labels.size());
        corpus.alphabet.labels.push_back(ev.activity);
        it = corpus.alphabet.index.emplace(ev.activity, id).first;
      }
      seq.symbols.push_back(it->second);
    }
    corpus.sequences.push_back(std::move(seq));
  }

  if (!unknown.empty()) {
    std::string msg = "activity labels missing from the alphabet table:";
    for (const auto& label : unknown) msg += " '" + label + "'";
    throw Error("encoding", msg);
  }
  return corpus;
}

}  // namespace

Alphabet Alphabet::from_labels(std::vector<std::string> labels) {
  Alphabet a;
  a.labels = std::move(labels);
  for (size_t i = 0; i < a.labels.size(); ++i) {
    auto [it, inserted] = a.index.emplace(a.labels[i], static_cast<Symbol>(i));
    if (!inserted) throw Error("encoding", "duplicate alphabet label: '" + a.labels[i] + "'");
  }
  return a;
}

Alphabet Alphabet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("encoding", "cannot open alphabet table: " + path);

  std::vector<std::pair<std::string, Symbol>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("encoding", "alphabet table " + path + " line " + std::to_string(lineno) +
                                  ": expected `label<TAB>id`");
    std::string label = trim_copy(line.substr(0, tab));
    std::string id_text = trim_copy(line.substr(tab + 1));
    if (label.empty())
      throw Error("encoding", "alphabet table " + path + " line " + std::to_string(lineno) +
                                  ": empty label");
    size_t pos = 0;
    unsigned long id = 0;
    try {
      id = std::stoul(id_text, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;  // non-numeric or out of range; fail below
    }
    if (pos != id_text.size() || id_text.empty() || !std::isdigit((unsigned char)id_text[0]))
      throw Error("encoding", "alphabet table " + path + " line " + std::to_string(lineno) +
                                  ": bad id '" + id_text + "'");
    rows.emplace_back(std::move(label), static_cast<Symbol>(id));
  }
  if (rows.empty()) throw Error("encoding", "alphabet table is empty: " + path);

  std::vector<std::string> labels(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (auto& [label, id] : rows) {
    if (id >= rows.size() || seen[id])
      throw Error("encoding",
                  "alphabet table ids must cover 0.." + std::to_string(rows.size() - 1) +
                      " exactly (offending id " + std::to_string(id) + ")");
    seen[id] = true;
    labels[id] = std::move(label);
  }
  return from_labels(std::move(labels));
}

SequenceCorpus build_corpus(const std::vector<RawCase>& cases) {
  return build_corpus_impl(cases, nullptr);
}

SequenceCorpus build_corpus(const std::vector<RawCase>& cases, const Alphabet& table) {
  return build_corpus_impl(cases, &table);
}

LabelMap load_label_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("encoding", "cannot open label map: " + path);
  LabelMap map;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("encoding", "label map " + path + " line " + std::to_string(lineno) +
                                  ": expected `raw<TAB>canonical`");
    std::string raw = trim_copy(line.substr(0, tab));
    std::string canonical = trim_copy(line.substr(tab + 1));
    if (raw.empty() || canonical.empty())
      throw Error("encoding", "label map " + path + " line " + std::to_string(lineno) +
                                  ": empty name");
    map[raw] = canonical;
  }
  return map;
}

void apply_label_map(std::vector<RawCase>& cases, const LabelMap& map) {
  for (auto& rc : cases)
    for (auto& ev : rc.events) {
      auto it = map.find(ev.activity);
      if (it != map.end()) ev.activity = it->second;
    }
}

std::vector<std::string> decode(const Sequence& seq, const Alphabet& alphabet) {
  std::vector<std::string> out;
  out.reserve(seq.symbols.size());
  for (Symbol s : seq.symbols) {
    if (s >= alphabet.labels.size())
      throw Error("encoding", "symbol id " + std::to_string(s) + " outside alphabet");
    out.push_back(alphabet.labels[s]);
  }
  return out;
}

std::string alphabet_fingerprint(const Alphabet& alphabet) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& label : alphabet.labels) {
    for (unsigned char c : label) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= '\n';
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::map<std::vector<Symbol>, std::size_t> variant_histogram(const SequenceCorpus& corpus) {
  std::map<std::vector<Symbol>, std::size_t> hist;
  for (const auto& seq : corpus.sequences) ++hist[seq.symbols];
  return hist;
}

void dump_corpus(std::ostream& out, const SequenceCorpus& corpus) {
  for (const auto& seq : corpus.sequences) {
    out << seq.case_id << ':';
    for (Symbol s : seq.symbols) out << ' ' << s;
    out << '\n';
  }
}

}  // namespace logknn
