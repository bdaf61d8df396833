#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexmap/common.hpp"
#include "lexmap/corpus.hpp"
#include "lexmap/dictionary.hpp"

namespace lexmap {

// A translation source. Implementations must be safe to call from several
// threads at once; results for the same word must not change within a run.
class TranslationBackend {
public:
  virtual ~TranslationBackend() = default;
  // nullopt when no translation is available (unknown word, network or
  // quota failure after retries).
  virtual std::optional<std::string> translate(const std::string& word) = 0;
  virtual std::string name() const = 0;
};

class StaticTableBackend : public TranslationBackend {
public:
  explicit StaticTableBackend(std::unordered_map<std::string, std::string> table);
  static StaticTableBackend from_file(const std::filesystem::path& path);

  std::optional<std::string> translate(const std::string& word) override;
  std::string name() const override { return "static"; }

private:
  std::unordered_map<std::string, std::string> table_;
};

struct HttpBackendConfig {
  std::string endpoint;  // full URL, e.g. http://host:8080/translate
  std::string lang_pair;
  std::string api_key_env = "LEXMAP_API_KEY";  // empty = no key required
  int retries = 3;
  int backoff_ms = 500;  // doubled after each failed attempt
  int timeout_s = 10;
};

// GET <endpoint>?key=...&lang=...&text=<word>; expects a JSON body with a
// "text" field holding the translation (string or array of strings).
class HttpBackend : public TranslationBackend {
public:
  explicit HttpBackend(HttpBackendConfig config);

  std::optional<std::string> translate(const std::string& word) override;
  std::string name() const override { return "http:" + config_.endpoint; }

private:
  HttpBackendConfig config_;
  std::string base_;  // scheme://host:port
  std::string path_;
  std::string api_key_;
};

// Append-only TSV cache of raw backend responses, one file per language
// pair. Lookups served from here cost no budget.
class TranslationCache {
public:
  explicit TranslationCache(std::filesystem::path file);

  std::optional<std::string> lookup(const std::string& word) const;
  void append(const std::string& word, const std::string& raw_translation);
  std::size_t size() const { return map_.size(); }

private:
  std::filesystem::path file_;
  std::unordered_map<std::string, std::string> map_;
  std::ofstream out_;
};

// Daily/monthly character allowance. Counters persist across restarts via
// load/save and never exceed the limits.
struct CharBudget {
  std::uint64_t daily_limit = 1'000'000;
  std::uint64_t monthly_limit = 10'000'000;
  std::uint64_t consumed_today = 0;
  std::uint64_t consumed_month = 0;
  std::string day;    // "YYYY-MM-DD" the daily counter refers to
  std::string month;  // "YYYY-MM"

  bool fits(std::uint64_t chars) const;
  void consume(std::uint64_t chars);
  // Resets the counters whose period changed.
  void roll_over(const std::string& today, const std::string& this_month);

  static CharBudget load(const std::filesystem::path& path, std::uint64_t daily,
                         std::uint64_t monthly, const std::string& today,
                         const std::string& this_month);
  void save(const std::filesystem::path& path) const;
};

std::string utc_day_string();
std::string utc_month_string();

struct TranslateReport {
  BilingualDictionary dict;
  std::size_t n_words = 0;      // input size
  std::size_t n_unique = 0;     // deduplicated sources submitted
  std::size_t n_translated = 0;
  std::size_t n_skipped_multiword = 0;    // not exactly one usable token
  std::size_t n_skipped_unavailable = 0;
  std::size_t n_cache_hits = 0;
};

struct TranslateOptions {
  TokenRules rules;    // targets are normalized with the corpus rules
  int parallelism = 4;  // backend requests in flight
  TranslationCache* cache = nullptr;
  std::filesystem::path budget_state;  // persisted after each chunk when set
};

class BudgetExceededError : public Error {
public:
  BudgetExceededError(const std::string& what, std::size_t next_index, TranslateReport partial)
      : Error(what), next_index(next_index), partial(std::move(partial)) {}

  std::size_t next_index;   // position in the input list to resume from
  TranslateReport partial;  // pairs completed before the budget ran out
};

// One pair per word whose translation is a single token. Duplicate sources
// are submitted once; the budget is charged per backend request, before the
// request is made. Throws BudgetExceededError once the next word no longer
// fits.
TranslateReport translate_batch(const std::vector<std::string>& words,
                                TranslationBackend& backend, CharBudget& budget,
                                const TranslateOptions& opts = {});

}  // namespace lexmap
