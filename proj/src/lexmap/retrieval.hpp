#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "lexmap/embedding.hpp"

namespace lexmap {

enum class RetrievalMode { Nn, Inn, Isf, Csls };

RetrievalMode parse_mode(const std::string& name);
std::string mode_name(RetrievalMode mode);

struct RetrievalConfig {
  RetrievalMode mode = RetrievalMode::Nn;
  int k = 10;               // CSLS neighborhood size
  double beta = 30.0;       // inverted-softmax inverse temperature
  std::size_t batch_size = 1024;
  std::size_t top_n = 10;   // candidates kept per query; 0 = full ranking
};

struct RankedCandidates {
  std::string query;
  bool oov = false;  // query word missing from the mapped source table
  // Descending score; ties broken by target-table row order.
  std::vector<std::pair<std::string, double>> candidates;
};

// Plain cosine; a zero vector has similarity 0 to everything.
double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Mean cosine of x to its k most-similar rows of the table.
double mean_topk(const Eigen::VectorXd& x, const EmbeddingTable& table, int k);

// Scores every target for every query under the configured mode:
//   nn    cos(x, y)
//   csls  2 cos(x, y) - mean_topk(x, tgt, k) - mean_topk(y, src, k)
//   isf   exp(beta cos(x, y)) normalized over all source vectors per target
//   inn   -(number of source vectors strictly closer to y than x),
//         ties broken by cos(x, y)
// Unknown query words yield an oov marker instead of failing the batch.
std::vector<RankedCandidates> retrieve(const std::vector<std::string>& queries,
                                       const EmbeddingTable& src_mapped,
                                       const EmbeddingTable& tgt,
                                       const RetrievalConfig& config, int threads = 1);

// TSV dump: query<TAB>rank<TAB>candidate<TAB>score, rank starting at 1.
void write_predictions(std::ostream& os, const std::vector<RankedCandidates>& results);

}  // namespace lexmap
