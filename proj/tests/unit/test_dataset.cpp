#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "objhc/dataset.hpp"
#include "objhc/error.hpp"
#include "objhc/measures.hpp"

namespace objhc {
namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("objhc_test_" + name);
}

TEST(Csv, ParsesPlainRows) {
  const auto e = parse_csv("1,2\n3,4\n5,6");
  EXPECT_EQ(e.size(), 3u);
  EXPECT_EQ(e.dim(), 2u);
  EXPECT_DOUBLE_EQ(e.points(2, 1), 6.0);
  EXPECT_FALSE(e.has_labels());
}

TEST(Csv, LabelColumnIsDictionaryEncoded) {
  const auto e = parse_csv("a,1,2\nb,3,4", {.header = false, .label_column = 0});
  EXPECT_EQ(e.size(), 2u);
  EXPECT_EQ(e.dim(), 2u);
  ASSERT_TRUE(e.has_labels());
  EXPECT_EQ(*e.labels, (std::vector<int>{0, 1}));
  EXPECT_EQ(e.label_names, (std::vector<std::string>{"a", "b"}));
}

TEST(Csv, LabelsFirstAppearanceOrder) {
  const auto e = parse_csv("1,z\n2,y\n3,z\n4,x", {.label_column = 1});
  EXPECT_EQ(*e.labels, (std::vector<int>{0, 1, 0, 2}));
}

TEST(Csv, HeaderSkipped) {
  const auto e = parse_csv("x,y\n1,2\n", {.header = true});
  EXPECT_EQ(e.size(), 1u);
}

TEST(Csv, RejectsBadInput) {
  EXPECT_EQ(kind_of([] { parse_csv("1,nan\n2,3"); }), ErrorKind::Format);
  EXPECT_EQ(kind_of([] { parse_csv("1,inf\n2,3"); }), ErrorKind::Format);
  EXPECT_EQ(kind_of([] { parse_csv("1,2\n3"); }), ErrorKind::Format);
  EXPECT_EQ(kind_of([] { parse_csv("1,abc"); }), ErrorKind::Format);
  EXPECT_EQ(kind_of([] { parse_csv(""); }), ErrorKind::EmptyDataset);
  EXPECT_EQ(kind_of([] { parse_csv("x,y\n", {.header = true}); }), ErrorKind::EmptyDataset);
}

TEST(Load, MissingFileIsIoError) {
  EXPECT_EQ(kind_of([] { load_dataset("/nonexistent/x.csv", DataFormat::Csv); }),
            ErrorKind::Io);
}

TEST(GenMixture, SingleClusterAroundOrigin) {
  const auto e = gen_mixture(1, 5, 2, 0.0, 3);
  EXPECT_EQ(e.size(), 5u);
  EXPECT_EQ(e.dim(), 2u);
  for (int l : *e.labels) EXPECT_EQ(l, 0);
}

TEST(GenMixture, SeededDeterminism) {
  EXPECT_TRUE(gen_mixture(4, 25, 16, 10.0, 7) == gen_mixture(4, 25, 16, 10.0, 7));
  EXPECT_FALSE(gen_mixture(4, 25, 16, 10.0, 7) == gen_mixture(4, 25, 16, 10.0, 8));
}

TEST(GenMixture, RejectsBadParams) {
  EXPECT_EQ(kind_of([] { gen_mixture(0, 5, 2, 1.0, 0); }), ErrorKind::InvalidParam);
  EXPECT_EQ(kind_of([] { gen_mixture(2, 0, 2, 1.0, 0); }), ErrorKind::InvalidParam);
  EXPECT_EQ(kind_of([] { gen_mixture(2, 5, 0, 1.0, 0); }), ErrorKind::InvalidParam);
  EXPECT_EQ(kind_of([] { gen_mixture(2, 5, 2, -1.0, 0); }), ErrorKind::InvalidParam);
}

TEST(GenMixture, WithinClassMoreSimilar) {
  const auto e = gen_mixture(2, 50, 8, 20.0, 1);
  const auto m = Measure::cos_sim();
  double within = 0, cross = 0;
  int nw = 0, nc = 0;
  for (Eigen::Index i = 0; i < e.points.rows(); ++i)
    for (Eigen::Index j = i + 1; j < e.points.rows(); ++j) {
      const double s = pairwise(m, row_span(e.points, i), row_span(e.points, j));
      if ((*e.labels)[i] == (*e.labels)[j]) {
        within += s;
        ++nw;
      } else {
        cross += s;
        ++nc;
      }
    }
  EXPECT_GT(within / nw, cross / nc);
}

TEST(GenMixture, CentersOnSphere) {
  const auto e = gen_mixture(3, 400, 4, 50.0, 11);
  for (int c = 0; c < 3; ++c) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(4);
    for (int i = 0; i < 400; ++i) mean += e.points.row(c * 400 + i);
    mean /= 400.0;
    EXPECT_NEAR(mean.norm(), 50.0, 0.5);
  }
}

class RoundTrip : public ::testing::TestWithParam<DataFormat> {};

TEST_P(RoundTrip, BitExact) {
  auto e = gen_mixture(3, 7, 5, 2.5, 42);
  // The binary payload is f32, so the input must be representable there.
  if (GetParam() == DataFormat::F32Binary) e.points = e.points.cast<float>().cast<double>();
  const auto path = temp_path(GetParam() == DataFormat::Csv ? "rt.csv" : "rt.f32");
  save_dataset(e, path, GetParam());
  EXPECT_TRUE(load_dataset(path, GetParam(), {.label_column = 0}) == e);
}

TEST_P(RoundTrip, WithoutLabels) {
  auto e = gen_mixture(2, 4, 3, 1.0, 5);
  e.labels.reset();
  e.label_names.clear();
  e.points = e.points.cast<float>().cast<double>();
  const auto path = temp_path(GetParam() == DataFormat::Csv ? "nl.csv" : "nl.f32");
  save_dataset(e, path, GetParam());
  EXPECT_TRUE(load_dataset(path, GetParam()) == e);
}

INSTANTIATE_TEST_SUITE_P(Formats, RoundTrip,
                         ::testing::Values(DataFormat::Csv, DataFormat::F32Binary));

TEST(F32, SidecarDimensionsChecked) {
  const auto path = temp_path("bad.f32");
  {
    std::ofstream out(path, std::ios::binary);
    const float v[3] = {1, 2, 3};
    out.write(reinterpret_cast<const char*>(v), sizeof v);
  }
  {
    std::ofstream side(path.string() + ".json");
    side << R"({"n": 2, "d": 2})";
  }
  EXPECT_EQ(kind_of([&] { load_dataset(path, DataFormat::F32Binary); }), ErrorKind::Format);
}

}  // namespace
}  // namespace objhc
