#include "lexmap/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <thread>

#include "lexmap/common.hpp"

namespace lexmap {

namespace {

template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const std::size_t shards =
      std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (shards <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(shards);
  for (std::size_t s = 0; s < shards; ++s) {
    pool.emplace_back([&f, s, shards, n] {
      const std::size_t lo = n * s / shards;
      const std::size_t hi = n * (s + 1) / shards;
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

RowMatrixXd normalized_rows(const RowMatrixXd& m) {
  RowMatrixXd out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

// Mean of the k largest values; the selection order within exact ties does
// not change the sum.
double mean_top_values(const Eigen::VectorXd& values, int k) {
  std::vector<double> v(values.data(), values.data() + values.size());
  std::partial_sort(v.begin(), v.begin() + k, v.end(), std::greater<>());
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += v[static_cast<std::size_t>(i)];
  return sum / static_cast<double>(k);
}

std::vector<std::size_t> ranked_indices(const Eigen::VectorXd& scores,
                                        const Eigen::VectorXd* tie_cos, std::size_t top_n) {
  const auto n = static_cast<std::size_t>(scores.size());
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto cmp = [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    if (scores(ia) != scores(ib)) return scores(ia) > scores(ib);
    if (tie_cos && (*tie_cos)(ia) != (*tie_cos)(ib)) return (*tie_cos)(ia) > (*tie_cos)(ib);
    return a < b;
  };
  if (top_n > 0 && top_n < n) {
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(top_n), idx.end(),
                      cmp);
    idx.resize(top_n);
  } else {
    std::sort(idx.begin(), idx.end(), cmp);
  }
  return idx;
}

}  // namespace

RetrievalMode parse_mode(const std::string& name) {
  if (name == "nn") return RetrievalMode::Nn;
  if (name == "inn") return RetrievalMode::Inn;
  if (name == "isf") return RetrievalMode::Isf;
  if (name == "csls") return RetrievalMode::Csls;
  throw Error("unknown retrieval mode '" + name + "' (expected nn, inn, isf or csls)");
}

std::string mode_name(RetrievalMode mode) {
  switch (mode) {
    case RetrievalMode::Nn: return "nn";
    case RetrievalMode::Inn: return "inn";
    case RetrievalMode::Isf: return "isf";
    case RetrievalMode::Csls: return "csls";
  }
  return "?";
}

double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) {
    throw Error("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                std::to_string(v.size()) + ")");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.dot(v) / (nu * nv);
}

double mean_topk(const Eigen::VectorXd& x, const EmbeddingTable& table, int k) {
  if (k < 1) throw Error("mean_topk: k must be >= 1");
  if (static_cast<std::size_t>(k) > table.size()) {
    throw Error("mean_topk: k = " + std::to_string(k) + " exceeds table size " +
                std::to_string(table.size()));
  }
  Eigen::VectorXd sims(static_cast<Eigen::Index>(table.size()));
  for (std::size_t i = 0; i < table.size(); ++i) {
    sims(static_cast<Eigen::Index>(i)) =
        cosine(x, table.vectors().row(static_cast<Eigen::Index>(i)).transpose());
  }
  return mean_top_values(sims, k);
}

std::vector<RankedCandidates> retrieve(const std::vector<std::string>& queries,
                                       const EmbeddingTable& src_mapped,
                                       const EmbeddingTable& tgt,
                                       const RetrievalConfig& config, int threads) {
  if (tgt.size() == 0) throw Error("retrieve: empty target table");
  if (src_mapped.size() == 0) throw Error("retrieve: empty source table");
  if (src_mapped.dim() != tgt.dim()) {
    throw Error("retrieve: source/target dimension mismatch");
  }
  if (config.batch_size < 1) throw Error("retrieve: batch_size must be >= 1");
  if (config.mode == RetrievalMode::Csls) {
    if (config.k < 1 || static_cast<std::size_t>(config.k) > tgt.size() ||
        static_cast<std::size_t>(config.k) > src_mapped.size()) {
      throw Error("retrieve: CSLS k = " + std::to_string(config.k) +
                  " must lie in [1, vocabulary size]");
    }
  }
  if (config.mode == RetrievalMode::Isf && !(config.beta > 0)) {
    throw Error("retrieve: isf beta must be > 0");
  }

  const RowMatrixXd sn = normalized_rows(src_mapped.vectors());
  const RowMatrixXd tn = normalized_rows(tgt.vectors());
  const auto n_tgt = static_cast<std::size_t>(tgt.size());

  // Per-session precomputation over the whole target vocabulary.
  Eigen::VectorXd r_src;     // csls: mean top-k similarity of each target into the source side
  Eigen::VectorXd logdenom;  // isf: log sum_x' exp(beta cos(x', y)) per target
  if (config.mode == RetrievalMode::Csls) {
    r_src.resize(static_cast<Eigen::Index>(n_tgt));
    parallel_for(n_tgt, threads, [&](std::size_t y) {
      const Eigen::VectorXd sims = sn * tn.row(static_cast<Eigen::Index>(y)).transpose();
      r_src(static_cast<Eigen::Index>(y)) = mean_top_values(sims, config.k);
    });
  } else if (config.mode == RetrievalMode::Isf) {
    logdenom.resize(static_cast<Eigen::Index>(n_tgt));
    parallel_for(n_tgt, threads, [&](std::size_t y) {
      const Eigen::VectorXd sims =
          config.beta * (sn * tn.row(static_cast<Eigen::Index>(y)).transpose());
      const double m = sims.maxCoeff();
      logdenom(static_cast<Eigen::Index>(y)) = m + std::log((sims.array() - m).exp().sum());
    });
  }

  std::vector<RankedCandidates> results(queries.size());
  std::vector<std::ptrdiff_t> query_row(queries.size(), -1);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    results[q].query = queries[q];
    if (auto row = src_mapped.row_of(queries[q])) {
      query_row[q] = static_cast<std::ptrdiff_t>(*row);
    } else {
      results[q].oov = true;
    }
  }

  auto emit = [&](std::size_t q, const Eigen::VectorXd& scores, const Eigen::VectorXd* tie_cos) {
    auto order = ranked_indices(scores, tie_cos, config.top_n);
    auto& out = results[q].candidates;
    out.reserve(order.size());
    for (std::size_t y : order) {
      out.emplace_back(tgt.word(y), scores(static_cast<Eigen::Index>(y)));
    }
  };

  for (std::size_t start = 0; start < queries.size(); start += config.batch_size) {
    const std::size_t stop = std::min(queries.size(), start + config.batch_size);

    if (config.mode == RetrievalMode::Inn) {
      // Rank of the query among all sources, per target. One pass over the
      // targets serves every query in the batch.
      std::vector<std::size_t> active;
      for (std::size_t q = start; q < stop; ++q) {
        if (query_row[q] >= 0) active.push_back(q);
      }
      RowMatrixXd rank_score(static_cast<Eigen::Index>(active.size()),
                             static_cast<Eigen::Index>(n_tgt));
      RowMatrixXd tie_cos(static_cast<Eigen::Index>(active.size()),
                          static_cast<Eigen::Index>(n_tgt));
      parallel_for(n_tgt, threads, [&](std::size_t y) {
        const Eigen::VectorXd sims = sn * tn.row(static_cast<Eigen::Index>(y)).transpose();
        std::vector<double> sorted(sims.data(), sims.data() + sims.size());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t a = 0; a < active.size(); ++a) {
          const double c = sims(static_cast<Eigen::Index>(query_row[active[a]]));
          const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), c);
          rank_score(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(y)) =
              -static_cast<double>(above);
          tie_cos(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(y)) = c;
        }
      });
      parallel_for(active.size(), threads, [&](std::size_t a) {
        const Eigen::VectorXd scores = rank_score.row(static_cast<Eigen::Index>(a)).transpose();
        const Eigen::VectorXd cos_row = tie_cos.row(static_cast<Eigen::Index>(a)).transpose();
        emit(active[a], scores, &cos_row);
      });
      continue;
    }

    parallel_for(stop - start, threads, [&](std::size_t off) {
      const std::size_t q = start + off;
      if (query_row[q] < 0) return;
      const Eigen::VectorXd sims =
          tn * sn.row(static_cast<Eigen::Index>(query_row[q])).transpose();
      switch (config.mode) {
        case RetrievalMode::Nn: {
          emit(q, sims, nullptr);
          break;
        }
        case RetrievalMode::Csls: {
          const double r_tgt = mean_top_values(sims, config.k);
          const Eigen::VectorXd scores =
              2.0 * sims - Eigen::VectorXd::Constant(sims.size(), r_tgt) - r_src;
          emit(q, scores, nullptr);
          break;
        }
        case RetrievalMode::Isf: {
          const Eigen::VectorXd scores =
              ((config.beta * sims) - logdenom).array().exp().matrix();
          emit(q, scores, nullptr);
          break;
        }
        case RetrievalMode::Inn:
          break;  // handled above
      }
    });
  }
  return results;
}

void write_predictions(std::ostream& os, const std::vector<RankedCandidates>& results) {
  char buf[64];
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.6g", r.candidates[i].second);
      os << r.query << '\t' << (i + 1) << '\t' << r.candidates[i].first << '\t' << buf << '\n';
    }
  }
}

}  // namespace lexmap
