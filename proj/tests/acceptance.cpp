// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Run via ctest or directly:
//   acceptance --cli <path-to-lexmap> --data <mini-corpus-dir> --work <scratch-dir>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "lexmap/common.hpp"
#include "lexmap/dictionary.hpp"
#include "lexmap/digest.hpp"
#include "lexmap/embedding.hpp"
#include "lexmap/evaluation.hpp"
#include "lexmap/mapping.hpp"
#include "lexmap/retrieval.hpp"
#include "lexmap/sgns.hpp"

using namespace lexmap;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
};

double gauss(Rng& rng) {
  // Box-Muller keeps the draw sequence portable across standard libraries.
  const double u1 = std::max(rand_unit(rng), 1e-300);
  const double u2 = rand_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

RowMatrixXd gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  RowMatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  }
  return m;
}

Eigen::MatrixXd random_orthogonal(Rng& rng, Eigen::Index d) {
  const Eigen::MatrixXd a = gaussian_matrix(rng, d, d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  }
  return q;
}

EmbeddingTable named_table(const RowMatrixXd& m, const std::string& prefix) {
  std::vector<std::string> words;
  for (Eigen::Index i = 0; i < m.rows(); ++i) words.push_back(prefix + std::to_string(i));
  return EmbeddingTable(std::move(words), m);
}

// ---------------------------------------------------------------------------
// 1. Split arithmetic reproduces the published 70/30 table rows exactly.
Check criterion_split_arithmetic() {
  Check c;
  const std::vector<std::array<std::size_t, 3>> rows{
      {6096, 4267, 1829}, {8329, 5830, 2499}, {3984, 2789, 1195}, {8460, 5922, 2538}};
  for (const auto& [total, want_train, want_test] : rows) {
    BilingualDictionary d;
    for (std::size_t i = 0; i < total; ++i) d.add("s" + std::to_string(i), "t" + std::to_string(i));
    const auto [train, test] = split_dictionary(d, SplitSpec{0.7, 20260810});
    c.expect(train.size() == want_train && test.size() == want_test,
             std::to_string(total) + " -> " + std::to_string(train.size()) + "/" +
                 std::to_string(test.size()) + ", expected " + std::to_string(want_train) + "/" +
                 std::to_string(want_test));
  }
  return c;
}

// ---------------------------------------------------------------------------
// 2. Orthogonality and dot-product preservation over 100 random fits.
Check criterion_orthogonality() {
  Check c;
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rand_below(rng, 63));  // <= 64
    const Eigen::Index n =
        d + static_cast<Eigen::Index>(rand_below(rng, static_cast<std::size_t>(500 - d)));
    AlignedMatrices am;
    am.X = gaussian_matrix(rng, n, d);
    am.Z = gaussian_matrix(rng, n, d);
    const MappingModel model = fit_orthogonal(am);
    const double resid =
        (model.W.transpose() * model.W - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
    c.expect(resid <= 1e-6, "orthogonality residual " + std::to_string(resid));

    const Eigen::VectorXd x = gaussian_matrix(rng, 1, d).row(0).transpose();
    const Eigen::VectorXd y = gaussian_matrix(rng, 1, d).row(0).transpose();
    const double before = x.dot(y);
    const double after = (x.transpose() * model.W).dot(y.transpose() * model.W);
    c.expect(std::abs(after - before) <= 1e-6 * std::max(1.0, std::abs(before)),
             "dot-product drift " + std::to_string(std::abs(after - before)));
  }
  return c;
}

// Shared harness for criteria 3 and 4: plant Z = XQ + sigma * noise, split an
// identity dictionary 70/30, fit on train, and score P@1 on test.
struct SyntheticRun {
  double p_at_1_nn = 0.0;
  double p_at_1_csls = 0.0;
  Eigen::MatrixXd W;
  Eigen::MatrixXd Q;
};

SyntheticRun synthetic_recovery(Rng& rng, Eigen::Index n, Eigen::Index d, double sigma,
                                bool clustered) {
  RowMatrixXd x(n, d);
  if (clustered) {
    // Clustered geometry: near neighbors are genuinely close, so noise can
    // flip ranks and neighborhood density varies (hub-like structure).
    const Eigen::Index n_clusters = 40;
    const RowMatrixXd centers = gaussian_matrix(rng, n_clusters, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto cidx = static_cast<Eigen::Index>(rand_below(rng, n_clusters));
      for (Eigen::Index j = 0; j < d; ++j) x(i, j) = centers(cidx, j) + 0.25 * gauss(rng);
    }
  } else {
    x = gaussian_matrix(rng, n, d);
  }
  const Eigen::MatrixXd q = random_orthogonal(rng, d);
  RowMatrixXd z = x * q;
  if (sigma > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale = sigma * z.row(i).norm() / std::sqrt(static_cast<double>(d));
      for (Eigen::Index j = 0; j < d; ++j) z(i, j) += scale * gauss(rng);
    }
  }

  const EmbeddingTable src = named_table(x, "w");
  const EmbeddingTable tgt = named_table(z, "w");
  BilingualDictionary dict;
  for (Eigen::Index i = 0; i < n; ++i) {
    dict.add("w" + std::to_string(i), "w" + std::to_string(i));
  }
  const auto [train, test] = split_dictionary(dict, SplitSpec{0.7, rng()});

  const AlignedMatrices am = align(train, src, tgt, true);
  const MappingModel model = fit_orthogonal(am);
  const EmbeddingTable mapped = apply_mapping(model, src);

  std::vector<std::string> queries;
  for (const auto& [s, t] : test.pairs()) queries.push_back(s);

  SyntheticRun run;
  run.W = model.W;
  run.Q = q;
  const auto score = [&](RetrievalMode mode) {
    RetrievalConfig rc;
    rc.mode = mode;
    rc.k = 10;
    rc.top_n = 1;
    const auto results = retrieve(queries, mapped, tgt, rc);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (!results[i].oov && results[i].candidates.at(0).first == queries[i]) ++hits;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(queries.size());
  };
  run.p_at_1_nn = score(RetrievalMode::Nn);
  run.p_at_1_csls = score(RetrievalMode::Csls);
  return run;
}

// ---------------------------------------------------------------------------
// 3. Exact recovery of a planted rotation: full accuracy, W equals Q.
Check criterion_exact_recovery() {
  Check c;
  Rng rng(3);
  const SyntheticRun run = synthetic_recovery(rng, 500, 32, 0.0, false);
  const double w_err = (run.W - run.Q).cwiseAbs().maxCoeff();
  c.expect(w_err <= 1e-6, "W deviates from the planted rotation by " + std::to_string(w_err));
  c.expect(run.p_at_1_nn == 100.0, "nn P@1 = " + std::to_string(run.p_at_1_nn));
  c.expect(run.p_at_1_csls == 100.0, "csls P@1 = " + std::to_string(run.p_at_1_csls));
  return c;
}

// ---------------------------------------------------------------------------
// 4. Noise robustness: accuracy strictly decreases with noise, and CSLS keeps
//    within half a point of nn (it is expected to help under hubness).
Check criterion_noise_robustness() {
  Check c;
  const std::vector<double> sigmas{0.1, 0.3, 0.7};
  std::vector<double> mean_nn, mean_csls;
  std::ostringstream summary;
  for (double sigma : sigmas) {
    double nn_sum = 0.0, csls_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng rng(1000 * seed + static_cast<std::uint64_t>(sigma * 100));
      const SyntheticRun run = synthetic_recovery(rng, 500, 32, sigma, true);
      nn_sum += run.p_at_1_nn;
      csls_sum += run.p_at_1_csls;
    }
    mean_nn.push_back(nn_sum / 10.0);
    mean_csls.push_back(csls_sum / 10.0);
    summary << " sigma=" << sigma << ": nn=" << mean_nn.back()
            << " csls=" << mean_csls.back();
  }
  for (std::size_t i = 1; i < sigmas.size(); ++i) {
    c.expect(mean_nn[i] < mean_nn[i - 1],
             "nn mean P@1 not strictly decreasing:" + summary.str());
  }
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    c.expect(mean_csls[i] >= mean_nn[i] - 0.5,
             "csls trails nn by more than 0.5 points:" + summary.str());
  }
  if (c.ok) c.detail = summary.str();
  return c;
}

// ---------------------------------------------------------------------------
// 5. Retrieval oracle equivalence on small vocabularies, all four modes.
struct BruteOracle {
  const EmbeddingTable& src;
  const EmbeddingTable& tgt;

  double cos(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return u.dot(v) / (nu * nv);
  }
  Eigen::VectorXd srow(std::size_t i) const {
    return src.vectors().row(static_cast<Eigen::Index>(i)).transpose();
  }
  Eigen::VectorXd trow(std::size_t i) const {
    return tgt.vectors().row(static_cast<Eigen::Index>(i)).transpose();
  }
  double mean_top(std::vector<double> v, int k) const {
    std::sort(v.begin(), v.end(), std::greater<>());
    return std::accumulate(v.begin(), v.begin() + k, 0.0) / k;
  }

  std::vector<std::string> rank(std::size_t qrow, const RetrievalConfig& cfg) const {
    const Eigen::VectorXd x = srow(qrow);
    const std::size_t nt = tgt.size(), ns = src.size();
    std::vector<double> score(nt), tie(nt, 0.0);
    for (std::size_t y = 0; y < nt; ++y) {
      const Eigen::VectorXd ty = trow(y);
      switch (cfg.mode) {
        case RetrievalMode::Nn:
          score[y] = cos(x, ty);
          break;
        case RetrievalMode::Csls: {
          std::vector<double> to_t(nt), to_s(ns);
          for (std::size_t yy = 0; yy < nt; ++yy) to_t[yy] = cos(x, trow(yy));
          for (std::size_t s = 0; s < ns; ++s) to_s[s] = cos(srow(s), ty);
          score[y] = 2.0 * cos(x, ty) - mean_top(to_t, cfg.k) - mean_top(to_s, cfg.k);
          break;
        }
        case RetrievalMode::Isf: {
          double den = 0.0;
          for (std::size_t s = 0; s < ns; ++s) den += std::exp(cfg.beta * cos(srow(s), ty));
          score[y] = std::exp(cfg.beta * cos(x, ty)) / den;
          break;
        }
        case RetrievalMode::Inn: {
          const double cx = cos(x, ty);
          int above = 0;
          for (std::size_t s = 0; s < ns; ++s) {
            if (cos(srow(s), ty) > cx) ++above;
          }
          score[y] = -above;
          tie[y] = cx;
          break;
        }
      }
    }
    std::vector<std::size_t> idx(nt);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (score[a] != score[b]) return score[a] > score[b];
      if (cfg.mode == RetrievalMode::Inn && tie[a] != tie[b]) return tie[a] > tie[b];
      return a < b;
    });
    std::vector<std::string> out;
    for (std::size_t y : idx) out.push_back(tgt.word(y));
    return out;
  }
};

Check criterion_retrieval_oracle() {
  Check c;
  Rng rng(5);
  for (int trial = 0; trial < 50 && c.ok; ++trial) {
    const std::size_t ns = 2 + rand_below(rng, 40);
    const std::size_t nt = 2 + rand_below(rng, 49);  // <= 50
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rand_below(rng, 10));
    const EmbeddingTable src =
        named_table(gaussian_matrix(rng, static_cast<Eigen::Index>(ns), d), "s");
    const EmbeddingTable tgt =
        named_table(gaussian_matrix(rng, static_cast<Eigen::Index>(nt), d), "t");
    const BruteOracle oracle{src, tgt};
    for (RetrievalMode mode :
         {RetrievalMode::Nn, RetrievalMode::Inn, RetrievalMode::Isf, RetrievalMode::Csls}) {
      RetrievalConfig cfg;
      cfg.mode = mode;
      cfg.k = 1 + static_cast<int>(rand_below(rng, std::min(ns, nt)));
      cfg.beta = 1.0 + 50.0 * rand_unit(rng);
      cfg.top_n = 0;
      const auto got = retrieve(src.words(), src, tgt, cfg);
      for (std::size_t q = 0; q < ns; ++q) {
        std::vector<std::string> got_words;
        for (const auto& [w, s] : got[q].candidates) got_words.push_back(w);
        if (got_words != oracle.rank(q, cfg)) {
          c.expect(false, "trial " + std::to_string(trial) + " mode " + mode_name(mode) +
                              " query " + std::to_string(q) + " ranking differs from oracle");
          break;
        }
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 6. Coverage/accuracy equals a naive set-based recomputation.
Check criterion_eval_oracle() {
  Check c;
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> sw, tw;
    for (std::size_t i = 0; i < 3 + rand_below(rng, 12); ++i) sw.push_back("s" + std::to_string(i));
    for (std::size_t i = 0; i < 3 + rand_below(rng, 12); ++i) tw.push_back("t" + std::to_string(i));
    const EmbeddingTable src =
        named_table(gaussian_matrix(rng, static_cast<Eigen::Index>(sw.size()), 3), "s");
    const EmbeddingTable tgt =
        named_table(gaussian_matrix(rng, static_cast<Eigen::Index>(tw.size()), 3), "t");

    BilingualDictionary test;
    for (std::size_t i = 0; i < 4 + rand_below(rng, 14); ++i) {
      test.add("s" + std::to_string(rand_below(rng, sw.size() + 3)),
               "t" + std::to_string(rand_below(rng, tw.size() + 3)));
    }

    const CoverageResult cov = coverage(test, src, tgt);
    std::vector<Prediction> top1;
    std::map<std::string, std::string> picks;
    for (const auto& q : cov.covered) {
      const std::string pick = "t" + std::to_string(rand_below(rng, tw.size()));
      top1.push_back({q, pick, 0.0, false});
      picks[q] = pick;
    }
    const AccuracyResult acc = accuracy(test, cov, top1);

    // Naive recomputation straight from the pair list.
    std::set<std::string> sources, covered;
    for (const auto& [s, t] : test.pairs()) sources.insert(s);
    for (const auto& [s, t] : test.pairs()) {
      if (src.contains(s) && tgt.contains(t)) covered.insert(s);
    }
    std::size_t correct = 0;
    for (const auto& [q, pick] : picks) {
      for (const auto& [s, t] : test.pairs()) {
        if (s == q && t == pick) {
          ++correct;
          break;
        }
      }
    }
    const double want_cov = 100.0 * static_cast<double>(covered.size()) /
                            static_cast<double>(sources.size());
    c.expect(covered == std::set<std::string>(cov.covered.begin(), cov.covered.end()),
             "covered sets differ on trial " + std::to_string(trial));
    c.expect(cov.coverage_pct == want_cov, "coverage percentage differs");
    c.expect(acc.n_correct == correct, "correct counts differ");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 7. SGNS analytic gradient vs central finite differences.
Check criterion_gradient_check() {
  Check c;
  const int d = 10;
  const double h = 1e-5;
  Rng rng(7);
  auto objective = [](const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                      const std::vector<Eigen::VectorXd>& negs) {
    auto ls = [](double x) { return -std::log1p(std::exp(-x)); };
    double j = ls(u.dot(v));
    for (const auto& n : negs) j += ls(-u.dot(n));
    return j;
  };
  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), 1e-8);
  };
  auto draw = [&] {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) {
      const double mag = 0.1 + 0.9 * rand_unit(rng);
      v(i) = rand_unit(rng) < 0.5 ? -mag : mag;
    }
    return v;
  };

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd u = draw(), v = draw();
    std::vector<Eigen::VectorXd> negs;
    for (std::size_t k = 0; k < 1 + rand_below(rng, 5); ++k) negs.push_back(draw());
    const SgnsGradient g = sgns_gradient(u, v, negs);
    for (int i = 0; i < d; ++i) {
      auto up = u, dn = u;
      up(i) += h;
      dn(i) -= h;
      worst = std::max(worst, rel(g.center(i),
                                  (objective(up, v, negs) - objective(dn, v, negs)) / (2 * h)));
      auto vp = v, vn = v;
      vp(i) += h;
      vn(i) -= h;
      worst = std::max(worst, rel(g.context(i),
                                  (objective(u, vp, negs) - objective(u, vn, negs)) / (2 * h)));
      for (std::size_t k = 0; k < negs.size(); ++k) {
        auto np = negs, nn = negs;
        np[k](i) += h;
        nn[k](i) -= h;
        worst = std::max(worst, rel(g.negatives[k](i), (objective(u, v, np) -
                                                        objective(u, v, nn)) /
                                                           (2 * h)));
      }
    }
  }
  c.expect(worst <= 1e-4, "max relative error " + std::to_string(worst));
  if (c.ok) c.detail = "max relative error " + std::to_string(worst);
  return c;
}

// ---------------------------------------------------------------------------
// 8. End-to-end CLI run on the bundled mini corpus: all stages complete, the
//    second run is fully cached, and fresh directories agree byte for byte.
struct EndToEndOptions {
  fs::path cli;
  fs::path data;
  fs::path work;
};

std::map<std::string, std::string> artifact_digests(const fs::path& work) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(work)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name == "manifest.json" || name == ".lock") continue;
    out[name] = sha256_file(entry.path());
  }
  return out;
}

fs::path write_run_config(const EndToEndOptions& opt, const std::string& tag) {
  std::ifstream is(opt.data / "config.json");
  if (!is) throw Error("bundled config not found under " + opt.data.string());
  nlohmann::json cfg = nlohmann::json::parse(is);
  cfg["paths"]["source_corpus"] = (opt.data / cfg["paths"]["source_corpus"].get<std::string>())
                                      .lexically_normal()
                                      .string();
  cfg["paths"]["target_corpus"] = (opt.data / cfg["paths"]["target_corpus"].get<std::string>())
                                      .lexically_normal()
                                      .string();
  cfg["backend"]["table"] =
      (opt.data / cfg["backend"]["table"].get<std::string>()).lexically_normal().string();
  cfg["paths"]["work_dir"] = (opt.work / tag / "work").string();
  const fs::path path = opt.work / (tag + ".config.json");
  std::ofstream os(path);
  os << cfg.dump(2);
  return path;
}

int run_cli(const fs::path& cli, const fs::path& config) {
  const std::string cmd =
      "'" + cli.string() + "' run-all --quiet --config '" + config.string() + "'";
  return std::system(cmd.c_str());
}

// Report values pinned from the first generated run of the bundled corpus;
// the pipeline is bit-reproducible with threads=1 and the bundled seeds.
constexpr double kPinnedCoveragePct = 100.0;
constexpr double kPinnedNnAccuracy = 93.33333333333333;   // 28/30
constexpr double kPinnedCslsAccuracy = 93.33333333333333; // 28/30

Check criterion_end_to_end(const EndToEndOptions& opt) {
  Check c;
  fs::remove_all(opt.work);
  fs::create_directories(opt.work);
  const auto t0 = std::chrono::steady_clock::now();

  const fs::path cfg_a = write_run_config(opt, "a");
  c.expect(run_cli(opt.cli, cfg_a) == 0, "first run failed");
  if (!c.ok) return c;

  const fs::path work_a = opt.work / "a" / "work";
  c.expect(fs::exists(work_a / "report.json"), "report.json missing");
  const auto digests_first = artifact_digests(work_a);
  const std::string manifest_first = sha256_file(work_a / "manifest.json");

  c.expect(run_cli(opt.cli, cfg_a) == 0, "second run failed");
  c.expect(artifact_digests(work_a) == digests_first, "second run rewrote artifacts");
  c.expect(sha256_file(work_a / "manifest.json") == manifest_first,
           "second run touched the manifest (not fully cached)");

  const fs::path cfg_b = write_run_config(opt, "b");
  c.expect(run_cli(opt.cli, cfg_b) == 0, "fresh-directory run failed");
  c.expect(artifact_digests(opt.work / "b" / "work") == digests_first,
           "fresh-directory artifacts differ");

  std::ifstream is(work_a / "report.json");
  const nlohmann::json report = nlohmann::json::parse(is);
  c.expect(report.at("modes").size() >= 2, "report lacks retrieval modes");
  if (kPinnedCoveragePct >= 0.0) {
    c.expect(std::abs(report.at("coverage_pct").get<double>() - kPinnedCoveragePct) <= 1e-9,
             "coverage drifted from the pinned value");
    c.expect(std::abs(report.at("modes")[0].at("accuracy_pct").get<double>() -
                      kPinnedNnAccuracy) <= 1e-9,
             "nn accuracy drifted from the pinned value");
    c.expect(std::abs(report.at("modes")[1].at("accuracy_pct").get<double>() -
                      kPinnedCslsAccuracy) <= 1e-9,
             "csls accuracy drifted from the pinned value");
  }

  const auto elapsed =
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0);
  c.expect(elapsed.count() < 120, "exceeded the 2 minute budget");
  if (c.ok) {
    std::ostringstream os;
    os << "coverage " << report.at("coverage_pct") << "%, accuracies";
    for (const auto& m : report.at("modes")) {
      os << " " << m.at("mode").get<std::string>() << "=" << m.at("accuracy_pct");
    }
    os << ", " << elapsed.count() << "s for three runs";
    c.detail = os.str();
  }
  return c;
}

// ---------------------------------------------------------------------------
// 9. word2vec text format round-trip plus malformed-file diagnostics.
Check criterion_format_roundtrip() {
  Check c;
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rand_below(rng, 60);
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rand_below(rng, 24));
    RowMatrixXd m(static_cast<Eigen::Index>(n), d);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < d; ++j) m(i, j) = 2.0 * rand_unit(rng) - 1.0;
    }
    const EmbeddingTable t = named_table(m, "w");
    std::stringstream ss;
    save_embeddings(t, ss);
    const EmbeddingTable back = load_embeddings(ss);
    c.expect(back.words() == t.words(), "word list changed in round-trip");
    const double err = (back.vectors() - t.vectors()).cwiseAbs().maxCoeff();
    c.expect(err <= 1e-6, "round-trip error " + std::to_string(err));
  }

  const auto expect_parse_error = [&c](const std::string& body, const std::string& label) {
    std::istringstream is(body);
    try {
      load_embeddings(is);
      c.expect(false, label + ": malformed input was accepted");
    } catch (const ParseError&) {
    } catch (const Error&) {
    }
  };
  expect_parse_error("3 2\na 1 0\nb 0 1\n", "missing row");
  expect_parse_error("1 2\na 1 0\nb 0 1\n", "extra row");
  expect_parse_error("2 two\na 1 0\n", "bad header");
  expect_parse_error("1 2\na 1 zebra\n", "non-numeric field");
  expect_parse_error("1 2\na 1\n", "short row");
  expect_parse_error("", "empty file");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  EndToEndOptions e2e;
  e2e.cli = "tools/lexmap";
  e2e.data = "../data/mini";
  e2e.work = "acceptance_work";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") e2e.cli = argv[i + 1];
    else if (flag == "--data") e2e.data = argv[i + 1];
    else if (flag == "--work") e2e.work = argv[i + 1];
  }
  e2e.cli = fs::absolute(e2e.cli);
  e2e.data = fs::absolute(e2e.data);
  e2e.work = fs::absolute(e2e.work);

  struct Criterion {
    std::string label;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 split arithmetic matches the published 70/30 rows", criterion_split_arithmetic},
      {"2 orthogonality and dot-product preservation (100 fits)", criterion_orthogonality},
      {"3 exact recovery of a planted rotation (nn and csls at 100%)",
       criterion_exact_recovery},
      {"4 noise robustness and the csls/nn margin", criterion_noise_robustness},
      {"5 retrieval modes match the brute-force oracle (50 trials)",
       criterion_retrieval_oracle},
      {"6 coverage/accuracy match a naive recomputation (20 dictionaries)",
       criterion_eval_oracle},
      {"7 sgns gradient matches central finite differences", criterion_gradient_check},
      {"8 end-to-end run-all on the bundled corpus, cached and reproducible",
       [&] { return criterion_end_to_end(e2e); }},
      {"9 word2vec text format round-trip and malformed-file errors",
       criterion_format_roundtrip},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check result;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      result = criterion.run();
    } catch (const std::exception& ex) {
      result.ok = false;
      result.detail = std::string("exception: ") + ex.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::cout << (result.ok ? "[PASS] " : "[FAIL] ") << "criterion " << criterion.label << " ("
              << ms << " ms)";
    if (!result.detail.empty()) std::cout << " -- " << result.detail;
    std::cout << '\n';
    if (!result.ok) ++failures;
  }
  return failures;
}
