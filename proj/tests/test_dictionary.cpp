#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "lexmap/common.hpp"
#include "lexmap/dictionary.hpp"

using namespace lexmap;

namespace {

BilingualDictionary numbered_dict(std::size_t n) {
  BilingualDictionary d;
  for (std::size_t i = 0; i < n; ++i) {
    d.add("s" + std::to_string(i), "t" + std::to_string(i));
  }
  return d;
}

}  // namespace

TEST_CASE("dictionary enforces single tokens and unique pairs") {
  BilingualDictionary d;
  CHECK(d.add("dog", "koer"));
  CHECK_FALSE(d.add("dog", "koer"));  // duplicate pair collapses
  CHECK(d.add("dog", "hund"));        // same source, new target is fine
  CHECK(d.size() == 2);
  CHECK_THROWS_AS(d.add("give up", "x"), Error);
  CHECK_THROWS_AS(d.add("x", "fel ad"), Error);
  CHECK_THROWS_AS(d.add("", "x"), Error);
}

TEST_CASE("dictionary TSV round-trip") {
  BilingualDictionary d;
  d.add("a", "x");
  d.add("b", "y");
  std::stringstream ss;
  d.save(ss);
  CHECK(ss.str() == "a\tx\nb\ty\n");
  const auto back = BilingualDictionary::load(ss);
  CHECK(back.pairs() == d.pairs());
}

TEST_CASE("dictionary load rejects malformed lines") {
  std::stringstream ss("no_tab_here\n");
  CHECK_THROWS_AS(BilingualDictionary::load(ss), ParseError);
  std::stringstream ss2("a\tb c\n");
  CHECK_THROWS_AS(BilingualDictionary::load(ss2), ParseError);
}

TEST_CASE("split sizes reproduce the published 70/30 splits") {
  // (total, train, test) rows; round-to-nearest is the only rule matching
  // all four.
  const std::vector<std::array<std::size_t, 3>> rows{
      {6096, 4267, 1829}, {8329, 5830, 2499}, {3984, 2789, 1195}, {8460, 5922, 2538}};
  for (const auto& [total, train_n, test_n] : rows) {
    const auto d = numbered_dict(total);
    const auto [train, test] = split_dictionary(d, SplitSpec{0.7, 123});
    CHECK(train.size() == train_n);
    CHECK(test.size() == test_n);
  }
}

TEST_CASE("split is a disjoint partition and seed-deterministic") {
  const auto d = numbered_dict(101);
  const SplitSpec spec{0.7, 42};
  const auto [train1, test1] = split_dictionary(d, spec);
  const auto [train2, test2] = split_dictionary(d, spec);
  CHECK(train1.pairs() == train2.pairs());
  CHECK(test1.pairs() == test2.pairs());

  std::set<BilingualDictionary::Pair> all(d.pairs().begin(), d.pairs().end());
  std::set<BilingualDictionary::Pair> got(train1.pairs().begin(), train1.pairs().end());
  for (const auto& p : test1.pairs()) {
    CHECK(got.insert(p).second);  // disjoint
  }
  CHECK(got == all);  // union is the input

  // A different seed permutes but preserves the union.
  const auto [train3, test3] = split_dictionary(d, SplitSpec{0.7, 43});
  CHECK(train3.size() == train1.size());
  std::set<BilingualDictionary::Pair> got3(train3.pairs().begin(), train3.pairs().end());
  for (const auto& p : test3.pairs()) got3.insert(p);
  CHECK(got3 == all);
  CHECK(train3.pairs() != train1.pairs());  // 101! permutations; collision is negligible
}

TEST_CASE("split actually shuffles") {
  const auto d = numbered_dict(50);
  const auto [train, test] = split_dictionary(d, SplitSpec{0.7, 1});
  CHECK(train.size() == 35);
  // The first 35 input pairs staying in input order would mean no shuffle.
  std::vector<BilingualDictionary::Pair> head(d.pairs().begin(), d.pairs().begin() + 35);
  CHECK(train.pairs() != head);
}

TEST_CASE("split rejects bad input") {
  CHECK_THROWS_AS(split_dictionary(BilingualDictionary{}, SplitSpec{0.7, 1}), Error);
  const auto d = numbered_dict(10);
  CHECK_THROWS_AS(split_dictionary(d, SplitSpec{0.0, 1}), Error);
  CHECK_THROWS_AS(split_dictionary(d, SplitSpec{1.0, 1}), Error);
}
