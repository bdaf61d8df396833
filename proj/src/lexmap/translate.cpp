#include "lexmap/translate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "lexmap/text.hpp"

namespace lexmap {

namespace {

std::string sanitize_tsv(std::string s) {
  for (char& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

std::string format_utc(const char* fmt) {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), fmt, &tm);
  return buf;
}

}  // namespace

StaticTableBackend::StaticTableBackend(std::unordered_map<std::string, std::string> table)
    : table_(std::move(table)) {}

StaticTableBackend StaticTableBackend::from_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open: " + path.string());
  std::unordered_map<std::string, std::string> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                           ": expected word<TAB>translation",
                       lineno);
    }
    table[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return StaticTableBackend(std::move(table));
}

std::optional<std::string> StaticTableBackend::translate(const std::string& word) {
  auto it = table_.find(word);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error("http backend: endpoint must be a full URL: " + config_.endpoint);
  }
  const auto path_start = config_.endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_ = config_.endpoint;
    path_ = "/";
  } else {
    base_ = config_.endpoint.substr(0, path_start);
    path_ = config_.endpoint.substr(path_start);
  }
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr) {
      throw Error("http backend: environment variable " + config_.api_key_env + " is not set");
    }
    api_key_ = key;
  }
}

std::optional<std::string> HttpBackend::translate(const std::string& word) {
  const std::string query = path_ + "?key=" + url_encode(api_key_) +
                            "&lang=" + url_encode(config_.lang_pair) +
                            "&text=" + url_encode(word);
  int backoff = config_.backoff_ms;
  for (int attempt = 0; attempt < std::max(1, config_.retries); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    // One client per request so concurrent calls never share a connection.
    httplib::Client client(base_);
    client.set_connection_timeout(config_.timeout_s, 0);
    client.set_read_timeout(config_.timeout_s, 0);
    auto res = client.Get(query);
    if (!res || res->status != 200) continue;
    try {
      auto body = nlohmann::json::parse(res->body);
      const auto& text = body.at("text");
      if (text.is_array()) {
        if (text.empty() || !text[0].is_string()) continue;
        return text[0].get<std::string>();
      }
      if (text.is_string()) return text.get<std::string>();
    } catch (const nlohmann::json::exception&) {
      continue;
    }
  }
  return std::nullopt;
}

TranslationCache::TranslationCache(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream is(file_);
  if (is) {
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) continue;  // tolerate partial last line
      map_.emplace(line.substr(0, tab), line.substr(tab + 1));
    }
  }
}

std::optional<std::string> TranslationCache::lookup(const std::string& word) const {
  auto it = map_.find(word);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void TranslationCache::append(const std::string& word, const std::string& raw_translation) {
  if (map_.count(word)) return;
  if (!out_.is_open()) {
    std::filesystem::create_directories(file_.parent_path().empty() ? "." : file_.parent_path());
    out_.open(file_, std::ios::app);
    if (!out_) throw Error("cannot open cache for append: " + file_.string());
  }
  const std::string value = sanitize_tsv(raw_translation);
  out_ << sanitize_tsv(word) << '\t' << value << '\n';
  out_.flush();
  map_.emplace(word, value);
}

bool CharBudget::fits(std::uint64_t chars) const {
  return consumed_today + chars <= daily_limit && consumed_month + chars <= monthly_limit;
}

void CharBudget::consume(std::uint64_t chars) {
  if (!fits(chars)) throw Error("budget exceeded");
  consumed_today += chars;
  consumed_month += chars;
}

void CharBudget::roll_over(const std::string& today, const std::string& this_month) {
  if (day != today) {
    day = today;
    consumed_today = 0;
  }
  if (month != this_month) {
    month = this_month;
    consumed_month = 0;
  }
}

CharBudget CharBudget::load(const std::filesystem::path& path, std::uint64_t daily,
                            std::uint64_t monthly, const std::string& today,
                            const std::string& this_month) {
  CharBudget b;
  b.daily_limit = daily;
  b.monthly_limit = monthly;
  b.day = today;
  b.month = this_month;
  std::ifstream is(path);
  if (is) {
    try {
      auto j = nlohmann::json::parse(is);
      b.day = j.value("day", today);
      b.month = j.value("month", this_month);
      b.consumed_today = j.value("consumed_today", std::uint64_t{0});
      b.consumed_month = j.value("consumed_month", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
      throw Error("budget state unreadable: " + path.string() + ": " + e.what());
    }
  }
  b.roll_over(today, this_month);
  return b;
}

void CharBudget::save(const std::filesystem::path& path) const {
  nlohmann::json j{{"day", day},
                   {"month", month},
                   {"consumed_today", consumed_today},
                   {"consumed_month", consumed_month}};
  std::ofstream os(path);
  if (!os) throw Error("cannot open for writing: " + path.string());
  os << j.dump(2) << '\n';
}

std::string utc_day_string() { return format_utc("%Y-%m-%d"); }
std::string utc_month_string() { return format_utc("%Y-%m"); }

namespace {

struct PendingWord {
  std::string word;
  std::size_t input_index;
  std::optional<std::string> raw;
};

void process_raw(const std::string& word, const std::optional<std::string>& raw,
                 const TokenRules& rules, TranslateReport& report) {
  if (!raw) {
    ++report.n_skipped_unavailable;
    return;
  }
  const std::vector<std::string> tokens = tokenize(*raw, rules);
  if (tokens.size() != 1) {
    ++report.n_skipped_multiword;
    return;
  }
  report.dict.add(word, tokens[0]);
  ++report.n_translated;
}

}  // namespace

TranslateReport translate_batch(const std::vector<std::string>& words,
                                TranslationBackend& backend, CharBudget& budget,
                                const TranslateOptions& opts) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!is_single_token(words[i])) {
      throw Error("translate_batch: word " + std::to_string(i) + " ('" + words[i] +
                  "') is not a single token");
    }
  }

  TranslateReport report;
  report.n_words = words.size();

  const int parallelism = std::max(1, opts.parallelism);
  std::vector<PendingWord> pending;
  pending.reserve(static_cast<std::size_t>(parallelism));

  auto flush = [&] {
    if (pending.empty()) return;
    if (pending.size() == 1) {
      pending[0].raw = backend.translate(pending[0].word);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(pending.size());
      for (auto& p : pending) {
        pool.emplace_back([&backend, &p] { p.raw = backend.translate(p.word); });
      }
      for (auto& t : pool) t.join();
    }
    for (const auto& p : pending) {
      if (opts.cache && p.raw) opts.cache->append(p.word, *p.raw);
      process_raw(p.word, p.raw, opts.rules, report);
    }
    pending.clear();
    if (!opts.budget_state.empty()) budget.save(opts.budget_state);
  };

  std::unordered_set<std::string> submitted;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string& word = words[i];
    if (!submitted.insert(word).second) continue;
    ++report.n_unique;

    if (opts.cache) {
      if (auto cached = opts.cache->lookup(word)) {
        // Served locally; no request, no budget.
        flush();  // keep processing order aligned with input order
        ++report.n_cache_hits;
        process_raw(word, cached, opts.rules, report);
        continue;
      }
    }

    const std::uint64_t chars = codepoint_count(word);
    if (!budget.fits(chars)) {
      flush();
      throw BudgetExceededError(
          "budget exceeded: word " + std::to_string(i) + " ('" + word + "', " +
              std::to_string(chars) + " chars) does not fit; daily " +
              std::to_string(budget.consumed_today) + "/" + std::to_string(budget.daily_limit) +
              ", monthly " + std::to_string(budget.consumed_month) + "/" +
              std::to_string(budget.monthly_limit),
          i, std::move(report));
    }
    budget.consume(chars);
    pending.push_back({word, i, std::nullopt});
    if (pending.size() >= static_cast<std::size_t>(parallelism)) flush();
  }
  flush();
  return report;
}

}  // namespace lexmap
