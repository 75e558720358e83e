#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Core>

#include "objhc/dataset.hpp"

namespace objhc {

enum class MeasureKind { CosSim, L2Squared, Rbf };

enum class Orientation { Similarity, Distance };

struct Measure {
  MeasureKind kind = MeasureKind::CosSim;
  double gamma = 1.0;       // rbf only
  int rbf_features = 1024;  // rbf only

  Orientation orientation() const {
    return kind == MeasureKind::L2Squared ? Orientation::Distance : Orientation::Similarity;
  }

  static Measure cos_sim() { return {MeasureKind::CosSim}; }
  static Measure l2_squared() { return {MeasureKind::L2Squared}; }
  static Measure rbf(double gamma, int features = 1024) {
    return {MeasureKind::Rbf, gamma, features};
  }
};

std::string to_string(MeasureKind kind);
std::string to_string(Orientation orientation);
// Accepts the CLI spellings: cossim, l2sq, rbf.
MeasureKind parse_measure_kind(const std::string& name);

// Closed-form value of the measure. rbf is evaluated exactly here.
double pairwise(const Measure& measure, std::span<const double> x, std::span<const double> y);

inline std::span<const double> row_span(const RowMatrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

// Row-wise kernel-defining features with weight(i, j) = <phi_i, psi_j>.
struct FeatureMaps {
  RowMatrix phi;
  RowMatrix psi;
  Orientation orientation = Orientation::Similarity;
  bool exact = true;
  // phi and psi hold the same values; lets callers skip the symmetric term.
  bool same = false;

  std::size_t size() const { return static_cast<std::size_t>(phi.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(phi.cols()); }

  double weight(Eigen::Index i, Eigen::Index j) const { return phi.row(i).dot(psi.row(j)); }

  // Restriction to a subset of points, rows in the given order.
  FeatureMaps slice(std::span<const int> rows) const;

  // W x computed as phi (psi^T x), never forming W.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  // Dense n x n weight matrix (diagonal included).
  Eigen::MatrixXd materialize() const;

  // Wraps an explicit symmetric weight matrix as phi = W, psi = I. Used for
  // arbitrary (non-embedding) instances; costs O(n^2) per product.
  static FeatureMaps from_matrix(const Eigen::MatrixXd& weights, Orientation orientation);
};

FeatureMaps build_feature_maps(const EmbeddingSet& data, const Measure& measure,
                               std::uint64_t seed);

}  // namespace objhc
