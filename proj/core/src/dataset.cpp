#include "objhc/dataset.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "objhc/error.hpp"
#include "objhc/random.hpp"

namespace objhc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    fail(ErrorKind::Format, "non-numeric cell '" + std::string(cell) + "' at row " +
                                std::to_string(row + 1) + ", column " + std::to_string(col + 1));
  }
  if (!std::isfinite(value)) {
    fail(ErrorKind::Format, "non-finite value at row " + std::to_string(row + 1) + ", column " +
                                std::to_string(col + 1));
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "cannot read " + path.string());
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

std::filesystem::path sidecar_path(const std::filesystem::path& payload) {
  auto p = payload;
  p += ".json";
  return p;
}

EmbeddingSet load_f32(const std::filesystem::path& path) {
  const auto meta_path = sidecar_path(path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(meta_path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, meta_path.string() + ": " + e.what());
  }
  if (!meta.contains("n") || !meta.contains("d") || !meta["n"].is_number_integer() ||
      !meta["d"].is_number_integer()) {
    fail(ErrorKind::Format, meta_path.string() + ": sidecar needs integer 'n' and 'd'");
  }
  const auto n = meta["n"].get<std::int64_t>();
  const auto d = meta["d"].get<std::int64_t>();
  if (n == 0) fail(ErrorKind::EmptyDataset, path.string());
  if (n < 0 || d < 1) fail(ErrorKind::Format, meta_path.string() + ": bad shape");

  const std::string payload = read_file(path);
  const auto expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(d) * 4;
  if (payload.size() != expected) {
    fail(ErrorKind::Format, path.string() + ": payload has " + std::to_string(payload.size()) +
                                " bytes, expected " + std::to_string(expected));
  }
  EmbeddingSet data;
  data.points.resize(n, d);
  for (std::int64_t i = 0; i < n * d; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, payload.data() + 4 * i, 4);
    if constexpr (std::endian::native == std::endian::big) {
      bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) | (bits >> 24);
    }
    const float f = std::bit_cast<float>(bits);
    if (!std::isfinite(f)) fail(ErrorKind::Format, path.string() + ": non-finite value");
    data.points(i / d, i % d) = f;
  }
  if (meta.contains("labels") && !meta["labels"].is_null()) {
    auto label_path = std::filesystem::path(meta["labels"].get<std::string>());
    if (label_path.is_relative()) label_path = meta_path.parent_path() / label_path;
    std::istringstream lines(read_file(label_path));
    std::vector<std::string> raw;
    for (std::string line; std::getline(lines, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      raw.push_back(line);
    }
    if (static_cast<std::int64_t>(raw.size()) != n) {
      fail(ErrorKind::Format, label_path.string() + ": label count differs from n");
    }
    encode_labels(data, raw);
  }
  return data;
}

void save_f32(const EmbeddingSet& data, const std::filesystem::path& path) {
  std::string payload(data.size() * data.dim() * 4, '\0');
  std::size_t at = 0;
  for (Eigen::Index i = 0; i < data.points.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.points.cols(); ++j) {
      auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(data.points(i, j)));
      if constexpr (std::endian::native == std::endian::big) {
        bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) | (bits >> 24);
      }
      std::memcpy(payload.data() + at, &bits, 4);
      at += 4;
    }
  }
  write_file(path, payload);

  nlohmann::json meta = {{"n", data.size()}, {"d", data.dim()}, {"labels", nullptr}};
  if (data.labels) {
    auto label_path = path;
    label_path += ".labels";
    std::string text;
    for (int code : *data.labels) {
      text += data.label_names.empty() ? std::to_string(code) : data.label_names[code];
      text += '\n';
    }
    write_file(label_path, text);
    meta["labels"] = label_path.filename().string();
  }
  write_file(sidecar_path(path), meta.dump(2) + "\n");
}

}  // namespace

void EmbeddingSet::validate() const {
  if (points.rows() == 0) fail(ErrorKind::EmptyDataset, "no points");
  if (points.cols() == 0) fail(ErrorKind::Format, "zero-dimensional points");
  if (!points.allFinite()) fail(ErrorKind::Format, "non-finite coordinate");
  if (labels && labels->size() != size()) fail(ErrorKind::Format, "label count differs from n");
  if (ids && ids->size() != size()) fail(ErrorKind::Format, "id count differs from n");
}

bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
  if (a.points.rows() != b.points.rows() || a.points.cols() != b.points.cols()) return false;
  if (std::memcmp(a.points.data(), b.points.data(), sizeof(double) * a.points.size()) != 0) {
    return false;
  }
  return a.labels == b.labels && a.ids == b.ids;
}

DataFormat parse_data_format(const std::string& name) {
  if (name == "csv") return DataFormat::Csv;
  if (name == "f32" || name == "f32-binary" || name == "bin") return DataFormat::F32Binary;
  fail(ErrorKind::InvalidParam, "unknown data format '" + name + "'");
}

void encode_labels(EmbeddingSet& data, const std::vector<std::string>& raw) {
  std::unordered_map<std::string, int> codes;
  std::vector<int> labels;
  labels.reserve(raw.size());
  data.label_names.clear();
  for (const auto& name : raw) {
    auto [it, inserted] = codes.try_emplace(name, static_cast<int>(data.label_names.size()));
    if (inserted) data.label_names.push_back(name);
    labels.push_back(it->second);
  }
  data.labels = std::move(labels);
}

EmbeddingSet parse_csv(const std::string& text, const CsvOptions& csv) {
  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t cols = 0;
  std::size_t rows = 0;
  bool skipped_header = !csv.header;

  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    start = end + 1;
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    auto cells = split_cells(line);
    if (csv.label_column) {
      const int lc = *csv.label_column;
      if (lc < 0 || static_cast<std::size_t>(lc) >= cells.size()) {
        fail(ErrorKind::Format, "label column " + std::to_string(lc) + " missing at row " +
                                    std::to_string(rows + 1));
      }
      raw_labels.emplace_back(cells[lc]);
      cells.erase(cells.begin() + lc);
    }
    if (rows == 0) {
      cols = cells.size();
    } else if (cells.size() != cols) {
      fail(ErrorKind::Format, "ragged row " + std::to_string(rows + 1) + ": " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(cols));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) values.push_back(parse_cell(cells[c], rows, c));
    ++rows;
    if (end == text.size()) break;
  }
  if (rows == 0) fail(ErrorKind::EmptyDataset, "CSV has no data rows");
  if (cols == 0) fail(ErrorKind::Format, "CSV rows have no coordinates");

  EmbeddingSet data;
  data.points = Eigen::Map<RowMatrix>(values.data(), static_cast<Eigen::Index>(rows),
                                      static_cast<Eigen::Index>(cols));
  if (csv.label_column) encode_labels(data, raw_labels);
  return data;
}

EmbeddingSet load_dataset(const std::filesystem::path& path, DataFormat format,
                          const CsvOptions& csv) {
  if (!std::filesystem::exists(path)) fail(ErrorKind::Io, "no such file " + path.string());
  EmbeddingSet data =
      format == DataFormat::Csv ? parse_csv(read_file(path), csv) : load_f32(path);
  data.validate();
  return data;
}

std::string to_csv(const EmbeddingSet& data) {
  std::string out;
  for (Eigen::Index i = 0; i < data.points.rows(); ++i) {
    if (data.labels) {
      const int code = (*data.labels)[i];
      out += data.label_names.empty() ? std::to_string(code) : data.label_names[code];
      out += ',';
    }
    for (Eigen::Index j = 0; j < data.points.cols(); ++j) {
      if (j) out += ',';
      append_double(out, data.points(i, j));
    }
    out += '\n';
  }
  return out;
}

void save_dataset(const EmbeddingSet& data, const std::filesystem::path& path, DataFormat format) {
  data.validate();
  if (format == DataFormat::Csv) {
    write_file(path, to_csv(data));
  } else {
    save_f32(data, path);
  }
}

EmbeddingSet gen_mixture(int num_clusters, int points_per_cluster, int dim, double separation,
                         std::uint64_t seed) {
  require(num_clusters >= 1, ErrorKind::InvalidParam, "num_clusters must be >= 1");
  require(points_per_cluster >= 1, ErrorKind::InvalidParam, "points_per_cluster must be >= 1");
  require(dim >= 1, ErrorKind::InvalidParam, "dim must be >= 1");
  require(separation >= 0.0 && std::isfinite(separation), ErrorKind::InvalidParam,
          "separation must be finite and >= 0");

  Rng rng(seed);
  RowMatrix centers(num_clusters, dim);
  for (int c = 0; c < num_clusters; ++c) {
    double norm = 0.0;
    do {
      for (int j = 0; j < dim; ++j) centers(c, j) = rng.normal();
      norm = centers.row(c).norm();
    } while (norm == 0.0);
    centers.row(c) *= separation / norm;
  }

  EmbeddingSet data;
  const int n = num_clusters * points_per_cluster;
  data.points.resize(n, dim);
  std::vector<std::string> raw;
  raw.reserve(n);
  for (int c = 0; c < num_clusters; ++c) {
    for (int p = 0; p < points_per_cluster; ++p) {
      const int i = c * points_per_cluster + p;
      for (int j = 0; j < dim; ++j) data.points(i, j) = centers(c, j) + rng.normal();
      raw.push_back(std::to_string(c));
    }
  }
  encode_labels(data, raw);
  return data;
}

}  // namespace objhc
