#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "lexmap/corpus.hpp"
#include "lexmap/embedding.hpp"

namespace lexmap {

struct SgnsConfig {
  int dimension = 300;
  int window = 5;
  int epochs = 10;
  int negatives = 5;
  std::uint64_t min_count = 5;
  double learning_rate = 0.025;      // linearly decayed to min_learning_rate
  double min_learning_rate = 1e-4;
  std::uint64_t seed = 1;
  int threads = 1;                   // >1 trades determinism for speed
  bool dynamic_window = true;        // effective window uniform in [1, window]
  double subsample = 0.0;            // 0 disables frequent-word subsampling
  double unigram_power = 0.75;       // negative-sampling distribution exponent

  void validate() const;
};

// Per-event gradients of the skip-gram negative-sampling objective
//   J = log sigmoid(u.v) + sum_i log sigmoid(-u.n_i)
// where u is the center (input) vector, v the context (output) vector and
// n_i the sampled negative (output) vectors. The trainer ascends J, so these
// are the exact update directions before the learning-rate factor.
struct SgnsGradient {
  Eigen::VectorXd center;                  // dJ/du
  Eigen::VectorXd context;                 // dJ/dv
  std::vector<Eigen::VectorXd> negatives;  // dJ/dn_i
};

SgnsGradient sgns_gradient(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                           const std::vector<Eigen::VectorXd>& negatives);

// Trains over the min_count-filtered vocabulary of the stream. With
// threads = 1 and a fixed seed the result is bit-reproducible; with more
// threads updates are lock-free and results vary run to run.
EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& sentences,
                          const SgnsConfig& config);
EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& sentences,
                          const SgnsConfig& config, const Vocabulary& vocab);

}  // namespace lexmap
