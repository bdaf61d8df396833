#include "lexmap/sgns.hpp"

#include <atomic>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "lexmap/common.hpp"

namespace lexmap {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Walker alias method over counts^power; construction is deterministic
// because buckets are filled in index order.
class AliasSampler {
public:
  AliasSampler(const std::vector<std::uint64_t>& counts, double power) {
    const std::size_t n = counts.size();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> weight(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      weight[i] = std::pow(static_cast<double>(counts[i]), power);
      total += weight[i];
    }
    std::vector<std::size_t> small, large;
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weight[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      std::size_t s = small.back();
      small.pop_back();
      std::size_t l = large.back();
      large.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (std::size_t s : small) prob_[s] = 1.0;
    for (std::size_t l : large) prob_[l] = 1.0;
  }

  std::size_t draw(Rng& rng) const {
    const std::size_t i = rand_below(rng, prob_.size());
    return rand_unit(rng) < prob_[i] ? i : alias_[i];
  }

private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

struct IdCorpus {
  std::vector<std::vector<std::int32_t>> sentences;
  std::uint64_t total_tokens = 0;  // after OOV filtering
};

IdCorpus to_ids(const std::vector<std::vector<std::string>>& sentences,
                const Vocabulary& vocab) {
  std::unordered_map<std::string, std::int32_t> id;
  id.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.entries.size(); ++i) {
    id.emplace(vocab.entries[i].word, static_cast<std::int32_t>(i));
  }
  IdCorpus corpus;
  corpus.sentences.reserve(sentences.size());
  for (const auto& sent : sentences) {
    std::vector<std::int32_t> ids;
    ids.reserve(sent.size());
    for (const auto& tok : sent) {
      auto it = id.find(tok);
      if (it != id.end()) ids.push_back(it->second);
    }
    corpus.total_tokens += ids.size();
    if (!ids.empty()) corpus.sentences.push_back(std::move(ids));
  }
  return corpus;
}

class Trainer {
public:
  Trainer(const IdCorpus& corpus, const Vocabulary& vocab, const SgnsConfig& cfg)
      : corpus_(corpus),
        cfg_(cfg),
        vocab_size_(vocab.size()),
        dim_(cfg.dimension),
        sampler_(counts_of(vocab), cfg.unigram_power),
        keep_prob_(keep_probs(vocab, cfg, corpus.total_tokens)) {
    Rng init_rng(cfg.seed);
    input_.resize(static_cast<Eigen::Index>(vocab_size_), dim_);
    output_ = RowMatrixXd::Zero(static_cast<Eigen::Index>(vocab_size_), dim_);
    for (Eigen::Index i = 0; i < input_.rows(); ++i) {
      for (Eigen::Index j = 0; j < dim_; ++j) {
        input_(i, j) = (rand_unit(init_rng) - 0.5) / static_cast<double>(dim_);
      }
    }
    planned_ = corpus.total_tokens * static_cast<std::uint64_t>(cfg.epochs);
  }

  RowMatrixXd run() {
    const int threads = std::max(1, cfg_.threads);
    if (threads == 1) {
      Rng rng(cfg_.seed ^ 0x9e3779b97f4a7c15ULL);
      for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
        for (const auto& sent : corpus_.sentences) train_sentence(sent, rng);
      }
    } else {
      for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
        std::vector<std::thread> pool;
        const std::size_t n = corpus_.sentences.size();
        const std::size_t shards = std::min<std::size_t>(threads, std::max<std::size_t>(n, 1));
        for (std::size_t s = 0; s < shards; ++s) {
          pool.emplace_back([this, s, shards, n, epoch] {
            Rng rng(cfg_.seed + 0x9e3779b97f4a7c15ULL * (s + 1) +
                    0x517cc1b727220a95ULL * static_cast<std::uint64_t>(epoch + 1));
            const std::size_t lo = n * s / shards;
            const std::size_t hi = n * (s + 1) / shards;
            for (std::size_t i = lo; i < hi; ++i) train_sentence(corpus_.sentences[i], rng);
          });
        }
        for (auto& t : pool) t.join();
      }
    }
    return std::move(input_);
  }

private:
  static std::vector<std::uint64_t> counts_of(const Vocabulary& vocab) {
    std::vector<std::uint64_t> c;
    c.reserve(vocab.size());
    for (const auto& e : vocab.entries) c.push_back(e.count);
    return c;
  }

  static std::vector<double> keep_probs(const Vocabulary& vocab, const SgnsConfig& cfg,
                                        std::uint64_t total) {
    std::vector<double> keep;
    if (cfg.subsample <= 0.0 || total == 0) return keep;
    keep.reserve(vocab.size());
    for (const auto& e : vocab.entries) {
      const double f = static_cast<double>(e.count) / static_cast<double>(total);
      const double ratio = cfg.subsample / f;
      keep.push_back(std::min(1.0, std::sqrt(ratio) + ratio));
    }
    return keep;
  }

  double current_lr() const {
    const double progress =
        planned_ == 0 ? 1.0
                      : static_cast<double>(processed_.load(std::memory_order_relaxed)) /
                            static_cast<double>(planned_);
    const double p = std::min(1.0, progress);
    return cfg_.learning_rate + (cfg_.min_learning_rate - cfg_.learning_rate) * p;
  }

  void train_sentence(const std::vector<std::int32_t>& full_sent, Rng& rng) {
    const double lr = current_lr();
    // Subsampled tokens are removed before windowing, so surviving words
    // effectively see a wider context.
    std::vector<std::int32_t> kept;
    if (!keep_prob_.empty()) {
      kept.reserve(full_sent.size());
      for (std::int32_t id : full_sent) {
        if (rand_unit(rng) <= keep_prob_[static_cast<std::size_t>(id)]) kept.push_back(id);
      }
    }
    const std::vector<std::int32_t>& sent = keep_prob_.empty() ? full_sent : kept;
    const int n = static_cast<int>(sent.size());
    Eigen::VectorXd accum(dim_);
    for (int t = 0; t < n; ++t) {
      const int half = cfg_.dynamic_window
                           ? cfg_.window - static_cast<int>(rand_below(rng, cfg_.window))
                           : cfg_.window;
      const std::int32_t center = sent[t];
      auto u = input_.row(center);
      for (int j = std::max(0, t - half); j <= std::min(n - 1, t + half); ++j) {
        if (j == t) continue;
        const std::int32_t context = sent[j];
        accum.setZero();
        {
          auto v = output_.row(context);
          const double g = 1.0 - sigmoid(u.dot(v));
          accum += g * v.transpose();
          v += (lr * g) * u;
        }
        for (int k = 0; k < cfg_.negatives; ++k) {
          const auto neg = static_cast<std::int32_t>(sampler_.draw(rng));
          if (neg == context) continue;
          auto nv = output_.row(neg);
          const double g = -sigmoid(u.dot(nv));
          accum += g * nv.transpose();
          nv += (lr * g) * u;
        }
        u += lr * accum.transpose();
      }
    }
    processed_.fetch_add(full_sent.size(), std::memory_order_relaxed);
  }

  const IdCorpus& corpus_;
  const SgnsConfig& cfg_;
  std::size_t vocab_size_;
  Eigen::Index dim_;
  AliasSampler sampler_;
  std::vector<double> keep_prob_;
  RowMatrixXd input_;
  RowMatrixXd output_;
  std::uint64_t planned_ = 0;
  std::atomic<std::uint64_t> processed_{0};
};

}  // namespace

void SgnsConfig::validate() const {
  if (dimension < 1) throw Error("sgns: dimension must be >= 1");
  if (window < 1) throw Error("sgns: window must be >= 1");
  if (epochs < 1) throw Error("sgns: epochs must be >= 1");
  if (negatives < 1) throw Error("sgns: negatives must be >= 1");
  if (min_count < 1) throw Error("sgns: min_count must be >= 1");
  if (!(learning_rate > 0)) throw Error("sgns: learning_rate must be > 0");
  if (!(min_learning_rate > 0) || min_learning_rate > learning_rate) {
    throw Error("sgns: min_learning_rate must be in (0, learning_rate]");
  }
  if (threads < 1) throw Error("sgns: threads must be >= 1");
}

SgnsGradient sgns_gradient(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                           const std::vector<Eigen::VectorXd>& negatives) {
  if (center.size() != context.size()) {
    throw Error("sgns_gradient: center/context dimension mismatch");
  }
  for (const auto& n : negatives) {
    if (n.size() != center.size()) {
      throw Error("sgns_gradient: negative vector dimension mismatch");
    }
  }
  SgnsGradient g;
  const double gpos = 1.0 - sigmoid(center.dot(context));
  g.context = gpos * center;
  g.center = gpos * context;
  g.negatives.reserve(negatives.size());
  for (const auto& n : negatives) {
    const double gneg = -sigmoid(center.dot(n));
    g.negatives.push_back(gneg * center);
    g.center += gneg * n;
  }
  return g;
}

EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& sentences,
                          const SgnsConfig& config) {
  config.validate();
  Vocabulary vocab = build_vocab(sentences, config.min_count);
  return train_sgns(sentences, config, vocab);
}

EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& sentences,
                          const SgnsConfig& config, const Vocabulary& vocab) {
  config.validate();
  if (vocab.empty()) throw Error("sgns: empty vocabulary");

  IdCorpus corpus = to_ids(sentences, vocab);
  if (corpus.total_tokens == 0) throw Error("sgns: empty vocabulary");

  Trainer trainer(corpus, vocab, config);
  RowMatrixXd vectors = trainer.run();
  return EmbeddingTable(vocab.words(), std::move(vectors));
}

}  // namespace lexmap
