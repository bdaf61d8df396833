#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lexmap/dictionary.hpp"
#include "lexmap/embedding.hpp"

namespace lexmap {

// Row-aligned source/target matrices for the usable dictionary pairs.
struct AlignedMatrices {
  RowMatrixXd X;  // source vectors, one row per retained pair
  RowMatrixXd Z;  // target vectors, same row order
  std::vector<std::pair<std::string, std::string>> used_pairs;
  std::size_t dropped = 0;  // pairs skipped because either side was OOV
};

// Orthogonal map fitted from aligned matrices; y = x * W.
struct MappingModel {
  Eigen::MatrixXd W;       // d x d, orthogonal
  bool normalized = true;  // rows were unit-normalized at fit time
  int rank = 0;            // numerical rank of X^T Z at fit time

  Eigen::Index dim() const { return W.rows(); }

  void save(const std::filesystem::path& path) const;
  static MappingModel load(const std::filesystem::path& path);
};

// Keeps the pairs whose source word is in src and target word in tgt. With
// normalize, every retained row is scaled to unit length (zero rows stay
// zero). Throws when no pair is usable.
AlignedMatrices align(const BilingualDictionary& dict, const EmbeddingTable& src,
                      const EmbeddingTable& tgt, bool normalize);

// W = U V^T from the SVD of X^T Z: the orthogonal matrix maximizing
// trace(W^T X^T Z). Rank deficiency is reported via MappingModel::rank and a
// warning, not an error.
MappingModel fit_orthogonal(const AlignedMatrices& am);

// Maps every row x to x*W (normalizing first iff the model was fitted on
// normalized rows). The vocabulary is unchanged.
EmbeddingTable apply_mapping(const MappingModel& model, const EmbeddingTable& table);

}  // namespace lexmap
