#include "lexmap/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "lexmap/common.hpp"
#include "lexmap/digest.hpp"

namespace lexmap {

namespace {

std::unordered_map<std::string, std::unordered_set<std::string>> gold_targets(
    const BilingualDictionary& test) {
  std::unordered_map<std::string, std::unordered_set<std::string>> gold;
  for (const auto& [s, t] : test.pairs()) gold[s].insert(t);
  return gold;
}

std::string pct_cell(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v);
  return buf;
}

}  // namespace

CoverageResult coverage(const BilingualDictionary& test, const EmbeddingTable& src_mapped,
                        const EmbeddingTable& tgt) {
  if (test.empty()) throw Error("coverage: empty test dictionary");

  CoverageResult cov;
  cov.n_test_pairs = test.size();

  std::vector<std::string> sources;  // distinct, first-appearance order
  std::unordered_set<std::string> seen;
  for (const auto& [s, t] : test.pairs()) {
    if (seen.insert(s).second) sources.push_back(s);
    if (src_mapped.contains(s) && tgt.contains(t)) ++cov.n_covered_pairs;
  }
  cov.n_test_sources = sources.size();

  const auto gold = gold_targets(test);
  for (const auto& s : sources) {
    if (!src_mapped.contains(s)) continue;
    const auto& targets = gold.at(s);
    const bool any_target = std::any_of(targets.begin(), targets.end(),
                                        [&](const std::string& t) { return tgt.contains(t); });
    if (any_target) cov.covered.push_back(s);
  }
  cov.coverage_pct =
      100.0 * static_cast<double>(cov.covered.size()) / static_cast<double>(sources.size());
  return cov;
}

AccuracyResult accuracy(const BilingualDictionary& test, const CoverageResult& cov,
                        const std::vector<Prediction>& top1, bool strict_single_gold) {
  std::unordered_set<std::string> covered(cov.covered.begin(), cov.covered.end());
  std::unordered_set<std::string> predicted_for;
  for (const auto& p : top1) {
    if (!covered.count(p.query)) {
      throw Error("accuracy: prediction for uncovered query '" + p.query + "'");
    }
    if (!predicted_for.insert(p.query).second) {
      throw Error("accuracy: duplicate prediction for query '" + p.query + "'");
    }
  }
  if (predicted_for.size() != covered.size()) {
    throw Error("accuracy: " + std::to_string(covered.size() - predicted_for.size()) +
                " covered queries lack a prediction");
  }

  const auto gold = gold_targets(test);
  std::unordered_map<std::string, std::string> first_gold;
  if (strict_single_gold) {
    for (const auto& [s, t] : test.pairs()) first_gold.emplace(s, t);
  }

  AccuracyResult res;
  res.predictions = top1;
  for (auto& p : res.predictions) {
    p.correct = strict_single_gold ? first_gold.at(p.query) == p.predicted
                                   : gold.at(p.query).count(p.predicted) > 0;
    if (p.correct) ++res.n_correct;
  }
  if (!covered.empty()) {
    res.accuracy_pct = 100.0 * static_cast<double>(res.n_correct) /
                       static_cast<double>(covered.size());
  }
  res.accuracy_over_all_pct =
      cov.n_test_sources == 0
          ? 0.0
          : 100.0 * static_cast<double>(res.n_correct) / static_cast<double>(cov.n_test_sources);
  return res;
}

std::string compare_modes(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw Error("compare_modes: no reports");
  for (const auto& r : reports) {
    if (r.test_digest != reports[0].test_digest || r.n_test_pairs != reports[0].n_test_pairs) {
      throw Error("compare_modes: reports describe different test sets");
    }
  }

  std::vector<std::string> modes;  // order of first appearance
  for (const auto& r : reports) {
    for (const auto& m : r.modes) {
      if (std::find(modes.begin(), modes.end(), m.mode) == modes.end()) modes.push_back(m.mode);
    }
  }
  if (modes.empty()) throw Error("compare_modes: reports carry no mode results");

  std::vector<std::string> header{"Language"};
  for (const auto& m : modes) header.push_back(m + " (%)");
  for (std::size_t i = 1; i < modes.size(); ++i) {
    header.push_back("d(" + modes[i] + "-" + modes[0] + ")");
  }

  std::vector<std::vector<std::string>> table{header};
  for (const auto& r : reports) {
    std::vector<std::optional<double>> acc(modes.size());
    for (const auto& m : r.modes) {
      const auto it = std::find(modes.begin(), modes.end(), m.mode);
      acc[static_cast<std::size_t>(it - modes.begin())] = m.result.accuracy_pct;
    }
    std::vector<std::string> row{r.language_pair};
    for (const auto& a : acc) row.push_back(pct_cell(a));
    for (std::size_t i = 1; i < modes.size(); ++i) {
      if (acc[i] && acc[0]) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%+.2f", *acc[i] - *acc[0]);
        row.push_back(buf);
      } else {
        row.push_back("n/a");
      }
    }
    table.push_back(std::move(row));
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      os << row[c];
      for (std::size_t pad = row[c].size(); pad < width[c]; ++pad) os << ' ';
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : report.modes) {
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& p : m.result.predictions) {
      preds.push_back({{"query", p.query},
                       {"predicted", p.predicted},
                       {"score", p.score},
                       {"correct", p.correct}});
    }
    nlohmann::json jm{{"mode", m.mode},
                      {"n_correct", m.result.n_correct},
                      {"accuracy_over_all_pct", m.result.accuracy_over_all_pct},
                      {"predictions", std::move(preds)}};
    if (m.result.accuracy_pct) {
      jm["accuracy_pct"] = *m.result.accuracy_pct;
    } else {
      jm["accuracy_pct"] = nullptr;
    }
    modes.push_back(std::move(jm));
  }
  return nlohmann::json{{"format_version", 1},
                        {"language_pair", report.language_pair},
                        {"n_test_pairs", report.n_test_pairs},
                        {"n_test_sources", report.n_test_sources},
                        {"n_covered", report.n_covered},
                        {"n_covered_pairs", report.n_covered_pairs},
                        {"coverage_pct", report.coverage_pct},
                        {"test_digest", report.test_digest},
                        {"modes", std::move(modes)}};
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream os;
  char buf[64];
  os << "language pair: " << report.language_pair << '\n';
  os << "test pairs: " << report.n_test_pairs << " (" << report.n_test_sources
     << " distinct sources)\n";
  std::snprintf(buf, sizeof(buf), "%.2f", report.coverage_pct);
  os << "coverage: " << report.n_covered << "/" << report.n_test_sources << " sources (" << buf
     << "%), " << report.n_covered_pairs << "/" << report.n_test_pairs << " pairs\n\n";
  os << compare_modes({report});
  os << '\n';
  for (const auto& m : report.modes) {
    os << m.mode << ": " << m.result.n_correct << "/" << report.n_covered << " correct";
    os << ", accuracy " << pct_cell(m.result.accuracy_pct) << "%";
    std::snprintf(buf, sizeof(buf), "%.2f", m.result.accuracy_over_all_pct);
    os << " (over all test sources: " << buf << "%)\n";
  }
  return os.str();
}

std::string dictionary_digest(const BilingualDictionary& dict) {
  std::string bytes;
  for (const auto& [s, t] : dict.pairs()) {
    bytes += s;
    bytes += '\t';
    bytes += t;
    bytes += '\n';
  }
  return sha256_hex(bytes);
}

}  // namespace lexmap
