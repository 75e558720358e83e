#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace objhc {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// n points in R^d, optionally with ground-truth classes.
struct EmbeddingSet {
  RowMatrix points;
  // Dense class codes 0..K-1, in first-appearance order of label_names.
  std::optional<std::vector<int>> labels;
  std::vector<std::string> label_names;
  std::optional<std::vector<std::string>> ids;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }
  bool has_labels() const { return labels.has_value(); }

  // Throws FormatError/EmptyDataset when an invariant is broken.
  void validate() const;

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b);
};

enum class DataFormat { Csv, F32Binary };

DataFormat parse_data_format(const std::string& name);

struct CsvOptions {
  bool header = false;
  // Column holding the class label; removed from the coordinates.
  std::optional<int> label_column;
};

EmbeddingSet load_dataset(const std::filesystem::path& path, DataFormat format,
                          const CsvOptions& csv = {});
EmbeddingSet parse_csv(const std::string& text, const CsvOptions& csv = {});

// CSV output puts the label (when present) in column 0 without a header, so
// it reads back with label_column = 0.
void save_dataset(const EmbeddingSet& data, const std::filesystem::path& path, DataFormat format);
std::string to_csv(const EmbeddingSet& data);

// Isotropic unit-variance Gaussian clusters whose centers lie on the sphere
// of radius `separation`. Labels are cluster indices.
EmbeddingSet gen_mixture(int num_clusters, int points_per_cluster, int dim, double separation,
                         std::uint64_t seed);

// Re-encodes arbitrary label strings to dense codes in first-appearance order.
void encode_labels(EmbeddingSet& data, const std::vector<std::string>& raw);

}  // namespace objhc
