#include "lexmap/mapping.hpp"

#include <Eigen/SVD>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lexmap/common.hpp"

namespace lexmap {

namespace {

void normalize_rows(RowMatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > 0.0) m.row(i) /= norm;
  }
}

}  // namespace

AlignedMatrices align(const BilingualDictionary& dict, const EmbeddingTable& src,
                      const EmbeddingTable& tgt, bool normalize) {
  if (src.dim() != tgt.dim()) {
    throw Error("align: source dimension " + std::to_string(src.dim()) +
                " != target dimension " + std::to_string(tgt.dim()));
  }

  std::vector<std::pair<std::size_t, std::size_t>> rows;
  AlignedMatrices am;
  for (const auto& [s, t] : dict.pairs()) {
    const auto si = src.row_of(s);
    const auto ti = tgt.row_of(t);
    if (si && ti) {
      rows.emplace_back(*si, *ti);
      am.used_pairs.emplace_back(s, t);
    } else {
      ++am.dropped;
    }
  }
  if (rows.empty()) throw Error("align: empty alignment, every pair is out of vocabulary");

  const auto n = static_cast<Eigen::Index>(rows.size());
  am.X.resize(n, src.dim());
  am.Z.resize(n, tgt.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    am.X.row(i) = src.vectors().row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].first));
    am.Z.row(i) = tgt.vectors().row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].second));
  }
  if (normalize) {
    normalize_rows(am.X);
    normalize_rows(am.Z);
  }
  return am;
}

MappingModel fit_orthogonal(const AlignedMatrices& am) {
  if (am.X.rows() == 0) throw Error("fit_orthogonal: no aligned rows");
  if (am.X.rows() != am.Z.rows() || am.X.cols() != am.Z.cols()) {
    throw Error("fit_orthogonal: X and Z shapes differ");
  }
  if (!am.X.allFinite() || !am.Z.allFinite()) {
    throw Error("fit_orthogonal: non-finite input");
  }

  const Eigen::MatrixXd m = am.X.transpose() * am.Z;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);

  MappingModel model;
  model.W = svd.matrixU() * svd.matrixV().transpose();
  const auto& sv = svd.singularValues();
  const double tol = static_cast<double>(m.rows()) * sv(0) *
                     std::numeric_limits<double>::epsilon();
  model.rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++model.rank;
  }
  if (model.rank < m.rows()) {
    std::cerr << "warning: cross-covariance is rank deficient (rank " << model.rank << " of "
              << m.rows() << "); the map is not unique\n";
  }
  return model;
}

EmbeddingTable apply_mapping(const MappingModel& model, const EmbeddingTable& table) {
  if (table.dim() != model.dim()) {
    throw Error("apply_mapping: table dimension " + std::to_string(table.dim()) +
                " != model dimension " + std::to_string(model.dim()));
  }
  RowMatrixXd rows = table.vectors();
  if (model.normalized) normalize_rows(rows);
  RowMatrixXd mapped = rows * model.W;
  return EmbeddingTable(table.words(), std::move(mapped));
}

void MappingModel::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open for writing: " + path.string());
  nlohmann::json header{{"format", "lexmap-mapping"},
                        {"version", 1},
                        {"dim", W.rows()},
                        {"normalized", normalized},
                        {"rank", rank}};
  os << header.dump() << '\n';
  os << W.rows() << ' ' << W.cols() << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      // %.17g round-trips doubles exactly, keeping orthogonality intact.
      std::snprintf(buf, sizeof(buf), "%.17g", W(i, j));
      os << (j ? " " : "") << buf;
    }
    os << '\n';
  }
  if (!os) throw Error("write failed: " + path.string());
}

MappingModel MappingModel::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw ParseError(path.string() + ": empty file", 0);

  MappingModel model;
  Eigen::Index dim = 0;
  try {
    auto header = nlohmann::json::parse(line);
    if (header.at("format") != "lexmap-mapping") {
      throw ParseError(path.string() + ":1: not a mapping file", 1);
    }
    if (header.at("version") != 1) {
      throw ParseError(path.string() + ":1: unsupported mapping format version", 1);
    }
    dim = header.at("dim").get<Eigen::Index>();
    model.normalized = header.at("normalized").get<bool>();
    model.rank = header.value("rank", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ":1: bad header: " + e.what(), 1);
  }

  if (!std::getline(is, line)) throw ParseError(path.string() + ":2: missing shape line", 2);
  Eigen::Index rows = 0, cols = 0;
  {
    std::istringstream shape(line);
    if (!(shape >> rows >> cols) || rows != dim || cols != dim) {
      throw ParseError(path.string() + ":2: shape line disagrees with header", 2);
    }
  }

  model.W.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) {
      throw ParseError(path.string() + ": end-of-file at matrix row " + std::to_string(i), 0);
    }
    std::istringstream row(line);
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(row >> model.W(i, j))) {
        throw ParseError(path.string() + ":" + std::to_string(3 + i) + ": bad matrix row",
                         static_cast<std::size_t>(3 + i));
      }
    }
  }
  return model;
}

}  // namespace lexmap
