#include "lexmap/dictionary.hpp"

#include <cmath>
#include <fstream>

#include "lexmap/common.hpp"
#include "lexmap/text.hpp"

namespace lexmap {

BilingualDictionary::BilingualDictionary(const std::vector<Pair>& pairs) {
  for (const auto& [src, tgt] : pairs) add(src, tgt);
}

bool BilingualDictionary::add(std::string source, std::string target) {
  if (!is_single_token(source)) {
    throw Error("dictionary: source '" + source + "' is not a single token");
  }
  if (!is_single_token(target)) {
    throw Error("dictionary: target '" + target + "' is not a single token");
  }
  std::string key = source + '\t' + target;
  if (!seen_.insert(std::move(key)).second) return false;
  pairs_.emplace_back(std::move(source), std::move(target));
  return true;
}

void BilingualDictionary::save(std::ostream& os) const {
  for (const auto& [src, tgt] : pairs_) os << src << '\t' << tgt << '\n';
}

void BilingualDictionary::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open for writing: " + path.string());
  save(os);
  if (!os) throw Error("write failed: " + path.string());
}

BilingualDictionary BilingualDictionary::load(std::istream& is, const std::string& name) {
  BilingualDictionary dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(name + ":" + std::to_string(lineno) + ": expected source<TAB>target",
                       lineno);
    }
    try {
      dict.add(line.substr(0, tab), line.substr(tab + 1));
    } catch (const Error& e) {
      throw ParseError(name + ":" + std::to_string(lineno) + ": " + e.what(), lineno);
    }
  }
  return dict;
}

BilingualDictionary BilingualDictionary::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open: " + path.string());
  return load(is, path.string());
}

std::pair<BilingualDictionary, BilingualDictionary> split_dictionary(
    const BilingualDictionary& dict, const SplitSpec& spec) {
  if (dict.empty()) throw Error("split: dictionary is empty");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error("split: train_fraction must lie in (0, 1)");
  }

  std::vector<BilingualDictionary::Pair> shuffled = dict.pairs();
  Rng rng(spec.seed);
  shuffle_deterministic(shuffled, rng);

  // Round to nearest; this reproduces published 70/30 splits where flooring
  // would be off by one.
  const auto n = static_cast<double>(shuffled.size());
  auto train_n = static_cast<std::size_t>(std::llround(spec.train_fraction * n));
  train_n = std::min(train_n, shuffled.size());

  BilingualDictionary train, test;
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    auto& out = i < train_n ? train : test;
    out.add(shuffled[i].first, shuffled[i].second);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace lexmap
