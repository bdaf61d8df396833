#include <doctest.h>

#include <map>
#include <sstream>

#include "lexmap/common.hpp"
#include "lexmap/corpus.hpp"

using namespace lexmap;

TEST_CASE("tokenize strips punctuation and lowercases") {
  TokenRules rules;
  CHECK(tokenize("Hello, world!", rules) == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("", rules).empty());
}

TEST_CASE("tokenize drops digit-bearing and empty pieces") {
  TokenRules rules;
  // "42" and "b2c" contain digits, the dash strips to nothing.
  CHECK(tokenize("\xC3\x89tat 42 b2c \xE2\x80\x94", rules) ==
        std::vector<std::string>{"\xC3\xA9tat"});
}

TEST_CASE("tokenize composes decomposed accents before comparing") {
  TokenRules rules;
  // "E" + combining acute, as NFD, must equal the precomposed form.
  const auto nfd = tokenize("E\xCC\x81tat", rules);
  const auto nfc_form = tokenize("\xC3\x89tat", rules);
  CHECK(nfd == nfc_form);
  CHECK(nfd == std::vector<std::string>{"\xC3\xA9tat"});
}

TEST_CASE("tokenize honors rule flags") {
  TokenRules keep_case;
  keep_case.lowercase = false;
  CHECK(tokenize("Hello", keep_case) == std::vector<std::string>{"Hello"});

  TokenRules min_len;
  min_len.min_token_length = 3;
  CHECK(tokenize("a bb ccc dddd", min_len) == std::vector<std::string>{"ccc", "dddd"});
}

TEST_CASE("tokenize keeps interior punctuation") {
  TokenRules rules;
  CHECK(tokenize("don't stop-gap", rules) == std::vector<std::string>{"don't", "stop-gap"});
}

TEST_CASE("tokenize is idempotent over join") {
  TokenRules rules;
  const std::vector<std::string> inputs = {
      "Hello, world!",
      "a-b c'd  (e) [f] \xC3\xA9l\xC3\xA9phant",
      "Mixed CASE Text; with. punct!",
      "\xC3\x89tat 42 b2c \xE2\x80\x94",
  };
  for (const auto& input : inputs) {
    const auto once = tokenize(input, rules);
    std::string joined;
    for (const auto& t : once) {
      if (!joined.empty()) joined += ' ';
      joined += t;
    }
    CHECK(tokenize(joined, rules) == once);
  }
}

namespace {

std::map<std::string, std::uint64_t> naive_counts(
    const std::vector<std::vector<std::string>>& sentences, std::uint64_t min_count) {
  std::map<std::string, std::uint64_t> all;
  for (const auto& s : sentences) {
    for (const auto& t : s) ++all[t];
  }
  std::map<std::string, std::uint64_t> kept;
  for (const auto& [w, c] : all) {
    if (c >= min_count) kept[w] = c;
  }
  return kept;
}

}  // namespace

TEST_CASE("build_vocab filters by min_count") {
  std::vector<std::string> tokens{"a", "a", "a", "a", "a", "b"};
  const Vocabulary v = build_vocab(tokens, 5);
  REQUIRE(v.size() == 1);
  CHECK(v.entries[0].word == "a");
  CHECK(v.entries[0].count == 5);

  const Vocabulary v2 = build_vocab(std::vector<std::string>{"a", "b", "a", "b"}, 1);
  REQUIRE(v2.size() == 2);
  CHECK(v2.count_of("a") == 2);
  CHECK(v2.count_of("b") == 2);

  CHECK(build_vocab(std::vector<std::string>{}, 5).empty());
}

TEST_CASE("build_vocab matches a naive counting oracle") {
  Rng rng(42);
  std::vector<std::string> pool{"alpha", "beta", "gamma", "delta", "epsilon", "zeta"};
  std::vector<std::vector<std::string>> sentences;
  for (int s = 0; s < 200; ++s) {
    std::vector<std::string> sent;
    const std::size_t len = 1 + rand_below(rng, 8);
    for (std::size_t i = 0; i < len; ++i) sent.push_back(pool[rand_below(rng, pool.size())]);
    sentences.push_back(std::move(sent));
  }
  for (std::uint64_t m : {1, 3, 50}) {
    const Vocabulary v = build_vocab(sentences, m);
    const auto expect = naive_counts(sentences, m);
    REQUIRE(v.size() == expect.size());
    for (const auto& e : v.entries) {
      REQUIRE(expect.count(e.word) == 1);
      CHECK(expect.at(e.word) == e.count);
    }
  }
}

TEST_CASE("vocabulary order is count-desc then lexicographic and stable") {
  std::vector<std::string> tokens{"pear", "apple", "pear", "apple", "kiwi", "fig", "fig", "fig"};
  const Vocabulary v = build_vocab(tokens, 1);
  REQUIRE(v.size() == 4);
  CHECK(v.entries[0].word == "fig");    // 3
  CHECK(v.entries[1].word == "apple");  // 2, ties broken lexicographically
  CHECK(v.entries[2].word == "pear");   // 2
  CHECK(v.entries[3].word == "kiwi");   // 1
}

TEST_CASE("sharded vocabulary counting equals sequential") {
  Rng rng(7);
  std::vector<std::vector<std::string>> sentences;
  for (int s = 0; s < 137; ++s) {
    std::vector<std::string> sent;
    for (std::size_t i = 0; i < 1 + rand_below(rng, 12); ++i) {
      sent.push_back("w" + std::to_string(rand_below(rng, 30)));
    }
    sentences.push_back(std::move(sent));
  }
  const Vocabulary seq = build_vocab(sentences, 2, 1);
  const Vocabulary par = build_vocab(sentences, 2, 4);
  REQUIRE(seq.size() == par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq.entries[i].word == par.entries[i].word);
    CHECK(seq.entries[i].count == par.entries[i].count);
  }
}

TEST_CASE("vocabulary round-trips through the TSV format") {
  const Vocabulary v = build_vocab(std::vector<std::string>{"b", "a", "b", "c", "c", "c"}, 1);
  std::stringstream ss;
  v.save(ss);
  CHECK(ss.str() == "c\t3\nb\t2\na\t1\n");
  const Vocabulary back = Vocabulary::load(ss);
  REQUIRE(back.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(back.entries[i].word == v.entries[i].word);
    CHECK(back.entries[i].count == v.entries[i].count);
  }
}

TEST_CASE("vocabulary load rejects malformed lines") {
  std::stringstream ss("word without tab\n");
  CHECK_THROWS_AS(Vocabulary::load(ss), ParseError);
  std::stringstream ss2("word\tnotanumber\n");
  CHECK_THROWS_AS(Vocabulary::load(ss2), ParseError);
}
