#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lexmap/dictionary.hpp"
#include "lexmap/embedding.hpp"

namespace lexmap {

// A test source word is covered iff its embedding exists and at least one of
// its gold targets is in the target table.
struct CoverageResult {
  std::vector<std::string> covered;  // distinct covered sources, test order
  std::size_t n_test_sources = 0;    // distinct sources in the test set
  std::size_t n_test_pairs = 0;
  std::size_t n_covered_pairs = 0;   // pairs whose both sides are in vocabulary
  double coverage_pct = 0.0;         // over distinct sources
};

CoverageResult coverage(const BilingualDictionary& test, const EmbeddingTable& src_mapped,
                        const EmbeddingTable& tgt);

struct Prediction {
  std::string query;
  std::string predicted;  // top-1 candidate
  double score = 0.0;
  bool correct = false;
};

struct AccuracyResult {
  std::size_t n_correct = 0;
  // Over covered queries; empty when nothing is covered (never 0/0).
  std::optional<double> accuracy_pct;
  // Secondary figure over all distinct test sources.
  double accuracy_over_all_pct = 0.0;
  std::vector<Prediction> predictions;  // input order, correctness filled in
};

// A query is correct iff its top-1 candidate equals any gold target of that
// source; with strict_single_gold only the first-listed gold counts.
// Predictions must exist for exactly the covered queries.
AccuracyResult accuracy(const BilingualDictionary& test, const CoverageResult& cov,
                        const std::vector<Prediction>& top1,
                        bool strict_single_gold = false);

struct ModeResult {
  std::string mode;
  AccuracyResult result;
};

struct EvalReport {
  std::string language_pair;
  std::size_t n_test_pairs = 0;
  std::size_t n_test_sources = 0;
  std::size_t n_covered = 0;
  std::size_t n_covered_pairs = 0;
  double coverage_pct = 0.0;
  std::vector<ModeResult> modes;
  std::string test_digest;  // identifies the test set for comparisons
};

// Side-by-side per-mode accuracies with deltas against the first mode.
// All reports must describe the same test set.
std::string compare_modes(const std::vector<EvalReport>& reports);

nlohmann::json report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);

// Digest of the test pairs, used to detect mismatched test sets.
std::string dictionary_digest(const BilingualDictionary& dict);

}  // namespace lexmap
