#include "objhc/measures.hpp"

#include <cmath>
#include <numbers>

#include "objhc/error.hpp"
#include "objhc/random.hpp"

namespace objhc {

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::CosSim: return "cossim";
    case MeasureKind::L2Squared: return "l2sq";
    case MeasureKind::Rbf: return "rbf";
  }
  return "?";
}

std::string to_string(Orientation orientation) {
  return orientation == Orientation::Similarity ? "similarity" : "distance";
}

MeasureKind parse_measure_kind(const std::string& name) {
  if (name == "cossim" || name == "cos-sim") return MeasureKind::CosSim;
  if (name == "l2sq" || name == "l2-squared") return MeasureKind::L2Squared;
  if (name == "rbf") return MeasureKind::Rbf;
  fail(ErrorKind::InvalidParam, "unknown measure '" + name + "'");
}

double pairwise(const Measure& measure, std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::DimensionMismatch,
          "vectors of length " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  const Eigen::Map<const Eigen::VectorXd> a(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Map<const Eigen::VectorXd> b(y.data(), static_cast<Eigen::Index>(y.size()));
  switch (measure.kind) {
    case MeasureKind::CosSim: {
      const double na = a.norm();
      const double nb = b.norm();
      require(na > 0.0 && nb > 0.0, ErrorKind::ZeroVector, "cos-sim of a zero vector");
      return a.dot(b) / (2.0 * na * nb) + 0.5;
    }
    case MeasureKind::L2Squared:
      return (a - b).squaredNorm();
    case MeasureKind::Rbf:
      require(measure.gamma > 0.0, ErrorKind::InvalidParam, "rbf gamma must be > 0");
      return std::exp(-measure.gamma * (a - b).squaredNorm());
  }
  return 0.0;
}

FeatureMaps FeatureMaps::slice(std::span<const int> rows) const {
  FeatureMaps out;
  out.orientation = orientation;
  out.exact = exact;
  out.same = same;
  out.phi.resize(static_cast<Eigen::Index>(rows.size()), phi.cols());
  out.psi.resize(static_cast<Eigen::Index>(rows.size()), psi.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.phi.row(r) = phi.row(rows[r]);
    out.psi.row(r) = psi.row(rows[r]);
  }
  return out;
}

Eigen::VectorXd FeatureMaps::apply(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd t = psi.transpose() * x;
  return phi * t;
}

Eigen::MatrixXd FeatureMaps::materialize() const { return phi * psi.transpose(); }

FeatureMaps FeatureMaps::from_matrix(const Eigen::MatrixXd& weights, Orientation orientation) {
  require(weights.rows() == weights.cols(), ErrorKind::DimensionMismatch,
          "weight matrix must be square");
  FeatureMaps maps;
  maps.phi = weights;
  maps.psi = RowMatrix::Identity(weights.rows(), weights.cols());
  maps.orientation = orientation;
  maps.exact = true;
  maps.same = false;
  return maps;
}

FeatureMaps build_feature_maps(const EmbeddingSet& data, const Measure& measure,
                               std::uint64_t seed) {
  data.validate();
  const Eigen::Index n = data.points.rows();
  const Eigen::Index d = data.points.cols();
  FeatureMaps maps;
  maps.orientation = measure.orientation();

  switch (measure.kind) {
    case MeasureKind::CosSim: {
      maps.phi.resize(n, d + 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = data.points.row(i).norm();
        require(norm > 0.0, ErrorKind::ZeroVector, "row " + std::to_string(i) + " is zero");
        const double scale = 1.0 / (std::numbers::sqrt2 * norm);
        maps.phi.row(i).head(d) = data.points.row(i) * scale;
        maps.phi(i, d) = norm * scale;
      }
      maps.psi = maps.phi;
      maps.same = true;
      break;
    }
    case MeasureKind::L2Squared: {
      maps.phi.resize(n, d + 2);
      maps.psi.resize(n, d + 2);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sq = data.points.row(i).squaredNorm();
        maps.phi(i, 0) = sq;
        maps.phi(i, 1) = 1.0;
        maps.phi.row(i).tail(d) = data.points.row(i);
        maps.psi(i, 0) = 1.0;
        maps.psi(i, 1) = sq;
        maps.psi.row(i).tail(d) = -2.0 * data.points.row(i);
      }
      break;
    }
    case MeasureKind::Rbf: {
      require(measure.rbf_features >= 1, ErrorKind::InvalidParam, "rbf_features must be >= 1");
      require(measure.gamma > 0.0, ErrorKind::InvalidParam, "rbf gamma must be > 0");
      const Eigen::Index k = measure.rbf_features;
      Rng rng(seed);
      // Frequencies ~ N(0, 2 gamma I), phases ~ U[0, 2 pi).
      RowMatrix freq(k, d);
      Eigen::VectorXd phase(k);
      const double sd = std::sqrt(2.0 * measure.gamma);
      for (Eigen::Index f = 0; f < k; ++f) {
        for (Eigen::Index j = 0; j < d; ++j) freq(f, j) = sd * rng.normal();
        phase(f) = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
      maps.phi = data.points * freq.transpose();
      const double amp = std::sqrt(2.0 / static_cast<double>(k));
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index f = 0; f < k; ++f) maps.phi(i, f) = amp * std::cos(maps.phi(i, f) + phase(f));
      }
      maps.psi = maps.phi;
      maps.same = true;
      maps.exact = false;
      break;
    }
  }
  return maps;
}

}  // namespace objhc
