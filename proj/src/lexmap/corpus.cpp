#include "lexmap/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "lexmap/common.hpp"
#include "lexmap/text.hpp"

namespace lexmap {

namespace {

bool contains_digit(std::u32string_view piece) {
  return std::any_of(piece.begin(), piece.end(),
                     [](char32_t c) { return is_decimal_digit(c); });
}

void strip_non_letters(std::u32string& piece) {
  std::size_t b = 0;
  while (b < piece.size() && !is_letter(piece[b])) ++b;
  std::size_t e = piece.size();
  while (e > b && !is_letter(piece[e - 1])) --e;
  piece = piece.substr(b, e - b);
}

using CountMap = std::unordered_map<std::string, std::uint64_t>;

void canonical_sort(std::vector<Vocabulary::Entry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.word < b.word;
  });
}

Vocabulary from_counts(CountMap&& counts, std::uint64_t min_count) {
  Vocabulary v;
  v.min_count = min_count;
  v.entries.reserve(counts.size());
  for (auto& [word, count] : counts) {
    if (count >= min_count) v.entries.push_back({word, count});
  }
  canonical_sort(v.entries);
  return v;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view line, const TokenRules& rules) {
  std::string s(line);
  if (rules.unicode_nfc) s = nfc(s);
  if (rules.lowercase) s = lowercase(s);

  std::u32string cps = decode_utf8(s);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i])) ++i;
    std::size_t start = i;
    while (i < cps.size() && !is_space(cps[i])) ++i;
    if (i == start) continue;
    std::u32string piece = cps.substr(start, i - start);
    strip_non_letters(piece);
    if (piece.empty()) continue;
    if (contains_digit(piece)) continue;
    if (piece.size() < rules.min_token_length) continue;
    tokens.push_back(encode_utf8(piece));
  }
  return tokens;
}

bool Vocabulary::contains(std::string_view word) const {
  return count_of(word).has_value();
}

std::optional<std::uint64_t> Vocabulary::count_of(std::string_view word) const {
  for (const auto& e : entries) {
    if (e.word == word) return e.count;
  }
  return std::nullopt;
}

std::vector<std::string> Vocabulary::words() const {
  std::vector<std::string> w;
  w.reserve(entries.size());
  for (const auto& e : entries) w.push_back(e.word);
  return w;
}

void Vocabulary::save(std::ostream& os) const {
  for (const auto& e : entries) os << e.word << '\t' << e.count << '\n';
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open for writing: " + path.string());
  save(os);
  if (!os) throw Error("write failed: " + path.string());
}

Vocabulary Vocabulary::load(std::istream& is, const std::string& name) {
  Vocabulary v;
  v.min_count = UINT64_MAX;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(name + ":" + std::to_string(lineno) + ": expected word<TAB>count", lineno);
    }
    Entry e;
    e.word = line.substr(0, tab);
    try {
      e.count = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError(name + ":" + std::to_string(lineno) + ": bad count field", lineno);
    }
    v.min_count = std::min(v.min_count, e.count);
    v.entries.push_back(std::move(e));
  }
  if (v.entries.empty()) v.min_count = 1;
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open: " + path.string());
  return load(is, path.string());
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences,
                       std::uint64_t min_count, int threads) {
  if (min_count < 1) throw Error("min_count must be >= 1");
  if (threads < 1) threads = 1;

  if (threads == 1 || sentences.size() < 2) {
    CountMap counts;
    for (const auto& sent : sentences) {
      for (const auto& tok : sent) ++counts[tok];
    }
    return from_counts(std::move(counts), min_count);
  }

  const std::size_t n = sentences.size();
  const std::size_t shards = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<CountMap> partial(shards);
  std::vector<std::thread> workers;
  workers.reserve(shards);
  for (std::size_t s = 0; s < shards; ++s) {
    workers.emplace_back([&, s] {
      const std::size_t lo = n * s / shards;
      const std::size_t hi = n * (s + 1) / shards;
      for (std::size_t i = lo; i < hi; ++i) {
        for (const auto& tok : sentences[i]) ++partial[s][tok];
      }
    });
  }
  for (auto& w : workers) w.join();

  CountMap merged;
  for (auto& p : partial) {
    for (auto& [word, count] : p) merged[word] += count;
  }
  return from_counts(std::move(merged), min_count);
}

Vocabulary build_vocab(const std::vector<std::string>& tokens, std::uint64_t min_count) {
  if (min_count < 1) throw Error("min_count must be >= 1");
  CountMap counts;
  for (const auto& tok : tokens) ++counts[tok];
  return from_counts(std::move(counts), min_count);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::vector<std::string>> tokenize_lines(const std::vector<std::string>& lines,
                                                     const TokenRules& rules,
                                                     int threads) {
  std::vector<std::vector<std::string>> out(lines.size());
  if (threads < 1) threads = 1;
  if (threads == 1 || lines.size() < 2) {
    for (std::size_t i = 0; i < lines.size(); ++i) out[i] = tokenize(lines[i], rules);
    return out;
  }
  const std::size_t n = lines.size();
  const std::size_t shards = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> workers;
  for (std::size_t s = 0; s < shards; ++s) {
    workers.emplace_back([&, s] {
      const std::size_t lo = n * s / shards;
      const std::size_t hi = n * (s + 1) / shards;
      for (std::size_t i = lo; i < hi; ++i) out[i] = tokenize(lines[i], rules);
    });
  }
  for (auto& w : workers) w.join();
  return out;
}

void write_tokenized(const std::filesystem::path& path,
                     const std::vector<std::vector<std::string>>& sentences) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open for writing: " + path.string());
  for (const auto& sent : sentences) {
    for (std::size_t i = 0; i < sent.size(); ++i) {
      if (i) os << ' ';
      os << sent[i];
    }
    os << '\n';
  }
  if (!os) throw Error("write failed: " + path.string());
}

std::vector<std::vector<std::string>> read_tokenized(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> out;
  for (const auto& line : read_lines(path)) {
    std::vector<std::string> sent;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) sent.push_back(tok);
    out.push_back(std::move(sent));
  }
  return out;
}

}  // namespace lexmap
