#include "lexmap/embedding.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lexmap/common.hpp"

namespace lexmap {

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, RowMatrixXd vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows()) {
    throw Error("embedding table: " + std::to_string(words_.size()) + " words but " +
                std::to_string(vectors_.rows()) + " vector rows");
  }
  if (!vectors_.allFinite()) {
    throw Error("embedding table: non-finite vector component");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto [it, inserted] = index_.emplace(words_[i], i);
    (void)it;
    if (!inserted) throw Error("embedding table: duplicate word '" + words_[i] + "'");
  }
}

std::optional<std::size_t> EmbeddingTable::row_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void save_embeddings(const EmbeddingTable& table, std::ostream& os) {
  char buf[64];
  os << table.size() << ' ' << table.dim() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    os << table.word(i);
    for (Eigen::Index j = 0; j < table.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.6g", table.vectors()(static_cast<Eigen::Index>(i), j));
      os << ' ' << buf;
    }
    os << '\n';
  }
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open for writing: " + path.string());
  save_embeddings(table, os);
  if (!os) throw Error("write failed: " + path.string());
}

namespace {

double parse_value(std::string_view field, const std::string& name, std::size_t lineno) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(name + ":" + std::to_string(lineno) + ": non-numeric field '" +
                         std::string(field) + "'",
                     lineno);
  }
  if (!std::isfinite(v)) {
    throw ParseError(name + ":" + std::to_string(lineno) + ": non-finite value", lineno);
  }
  return v;
}

}  // namespace

EmbeddingTable load_embeddings(std::istream& is, const std::string& name) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(name + ": empty file", 0);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::size_t vocab_size = 0;
  std::size_t dim = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> vocab_size >> dim) || (header >> extra)) {
      throw ParseError(name + ":1: malformed header, expected '<vocab_size> <dimension>'", 1);
    }
  }

  std::vector<std::string> words;
  words.reserve(vocab_size);
  RowMatrixXd vectors(static_cast<Eigen::Index>(vocab_size), static_cast<Eigen::Index>(dim));

  std::size_t lineno = 1;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= vocab_size) {
      throw ParseError(name + ":" + std::to_string(lineno) + ": more rows than header declares (" +
                           std::to_string(vocab_size) + ")",
                       lineno);
    }
    std::size_t pos = line.find(' ');
    if (pos == std::string::npos || pos == 0) {
      throw ParseError(name + ":" + std::to_string(lineno) + ": expected 'word v1 .. vd'", lineno);
    }
    words.push_back(line.substr(0, pos));
    std::size_t count = 0;
    std::size_t i = pos;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      if (i >= line.size()) break;
      std::size_t j = line.find(' ', i);
      if (j == std::string::npos) j = line.size();
      if (count >= dim) {
        throw ParseError(name + ":" + std::to_string(lineno) + ": row has more than " +
                             std::to_string(dim) + " values",
                         lineno);
      }
      vectors(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(count)) =
          parse_value(std::string_view(line).substr(i, j - i), name, lineno);
      ++count;
      i = j;
    }
    if (count != dim) {
      throw ParseError(name + ":" + std::to_string(lineno) + ": row has " + std::to_string(count) +
                           " values, expected " + std::to_string(dim),
                       lineno);
    }
    ++row;
  }
  if (row != vocab_size) {
    throw ParseError(name + ": end-of-file after " + std::to_string(row) +
                         " rows, header declares " + std::to_string(vocab_size),
                     0);
  }
  return EmbeddingTable(std::move(words), std::move(vectors));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open: " + path.string());
  return load_embeddings(is, path.string());
}

}  // namespace lexmap
