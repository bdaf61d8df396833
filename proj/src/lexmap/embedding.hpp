#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexmap {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Vocabulary plus one dense row per word. Immutable after construction and
// safe to share read-only across threads.
class EmbeddingTable {
public:
  EmbeddingTable() = default;

  // Validates: one row per word, unique words, all entries finite.
  EmbeddingTable(std::vector<std::string> words, RowMatrixXd vectors);

  std::size_t size() const { return words_.size(); }
  Eigen::Index dim() const { return vectors_.cols(); }
  const std::vector<std::string>& words() const { return words_; }
  const RowMatrixXd& vectors() const { return vectors_; }
  const std::string& word(std::size_t row) const { return words_[row]; }

  std::optional<std::size_t> row_of(std::string_view word) const;
  bool contains(std::string_view word) const { return row_of(word).has_value(); }

private:
  std::vector<std::string> words_;
  RowMatrixXd vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

// word2vec text format: header "<vocab_size> <dimension>", then one line per
// word with space-separated values, 6 significant digits, newline-terminated.
void save_embeddings(const EmbeddingTable& table, std::ostream& os);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);
EmbeddingTable load_embeddings(std::istream& is, const std::string& name = "<stream>");
EmbeddingTable load_embeddings(const std::filesystem::path& path);

}  // namespace lexmap
