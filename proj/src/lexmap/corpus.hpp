#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexmap {

// Normalization applied before any word comparison in the pipeline.
// Tokenization is deterministic: identical bytes in, identical tokens out.
struct TokenRules {
  bool lowercase = true;
  bool unicode_nfc = true;  // compose to NFC before anything else
  std::size_t min_token_length = 1;  // in code points
};

// NFC -> lowercase (if enabled) -> split on whitespace -> strip leading and
// trailing non-letter characters -> drop pieces that are empty, contain a
// decimal digit, or are shorter than min_token_length.
std::vector<std::string> tokenize(std::string_view line, const TokenRules& rules);

struct Vocabulary {
  struct Entry {
    std::string word;
    std::uint64_t count = 0;
  };

  // Canonical order: count descending, ties by byte-wise lexicographic word
  // order. Every count is >= min_count and words are unique.
  std::vector<Entry> entries;
  std::uint64_t min_count = 1;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  bool contains(std::string_view word) const;
  std::optional<std::uint64_t> count_of(std::string_view word) const;
  std::vector<std::string> words() const;

  // One "word<TAB>count" per line, canonical order.
  void save(std::ostream& os) const;
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(std::istream& is, const std::string& name = "<stream>");
  static Vocabulary load(const std::filesystem::path& path);
};

// Counting may be sharded over threads; the merged result is identical to
// the sequential one because the canonical order is a total order.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences,
                       std::uint64_t min_count, int threads = 1);
Vocabulary build_vocab(const std::vector<std::string>& tokens, std::uint64_t min_count);

// File ingestion: one sentence per line, UTF-8.
std::vector<std::string> read_lines(const std::filesystem::path& path);
std::vector<std::vector<std::string>> tokenize_lines(const std::vector<std::string>& lines,
                                                     const TokenRules& rules,
                                                     int threads = 1);
void write_tokenized(const std::filesystem::path& path,
                     const std::vector<std::vector<std::string>>& sentences);
std::vector<std::vector<std::string>> read_tokenized(const std::filesystem::path& path);

}  // namespace lexmap
