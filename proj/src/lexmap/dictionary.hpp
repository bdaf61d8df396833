#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace lexmap {

// Ordered (source, target) pairs. Both sides are single tokens and pairs are
// unique; a source may repeat with different targets (multiple golds).
class BilingualDictionary {
public:
  using Pair = std::pair<std::string, std::string>;

  BilingualDictionary() = default;
  explicit BilingualDictionary(const std::vector<Pair>& pairs);

  // Returns false if the exact pair is already present. Throws on empty
  // sides or internal whitespace.
  bool add(std::string source, std::string target);

  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  // UTF-8 TSV, one "source<TAB>target" per line. Duplicate pairs in a file
  // are collapsed on load.
  void save(std::ostream& os) const;
  void save(const std::filesystem::path& path) const;
  static BilingualDictionary load(std::istream& is, const std::string& name = "<stream>");
  static BilingualDictionary load(const std::filesystem::path& path);

private:
  std::vector<Pair> pairs_;
  std::unordered_set<std::string> seen_;  // "source\ttarget" keys
};

struct SplitSpec {
  double train_fraction = 0.7;  // must lie in (0, 1)
  std::uint64_t seed = 1;
};

// Seeded shuffle, then the first round(train_fraction * N) pairs become the
// training set and the remainder the test set.
std::pair<BilingualDictionary, BilingualDictionary> split_dictionary(
    const BilingualDictionary& dict, const SplitSpec& spec);

}  // namespace lexmap
