#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "svmp/io.hpp"
#include "tempdir.hpp"

using namespace svmp;

namespace {

Matrix float_representable(std::mt19937_64& rng, Index r, Index c) {
  Matrix m = svmp_test::gaussian(rng, r, c);
  return m.unaryExpr([](double v) { return static_cast<double>(static_cast<float>(v)); });
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

void write_raw(const std::filesystem::path& p, const std::vector<char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST(Io, HeaderLayout) {
  Matrix m(1, 2);
  m << 1.0, -2.0;
  const std::vector<char> bytes = io::encode_matrix(m);
  ASSERT_EQ(bytes.size(), 24U);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SVMP");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[12], 2);
  // 1.0f is 0x3F800000, stored little-endian.
  EXPECT_EQ(static_cast<unsigned char>(bytes[19]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(bytes[18]), 0x80);
}

TEST(Io, BagRoundTripIsBitExact) {
  svmp_test::TempDir dir;
  std::mt19937_64 rng(1);
  const FeatureBag bag{float_representable(rng, 50, 128), "clip"};
  io::write_bag(bag, dir / "clip.svmp");
  const FeatureBag back = io::read_bag(dir / "clip.svmp");
  EXPECT_EQ(back.features, bag.features);
  EXPECT_EQ(back.sequence_id, "clip");
  io::write_bag(back, dir / "again.svmp");
  EXPECT_EQ(io::read_text(dir / "clip.svmp"), io::read_text(dir / "again.svmp"));
}

TEST(Io, TruncatedPayload) {
  svmp_test::TempDir dir;
  std::vector<char> bytes = io::encode_matrix(Matrix::Ones(3, 4));
  bytes.resize(bytes.size() - 5);
  write_raw(dir / "t.svmp", bytes);
  try {
    io::read_bag(dir / "t.svmp");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTruncated);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("truncated payload"), std::string::npos);
    EXPECT_NE(msg.find("expected 48 bytes, got 43"), std::string::npos);
  }
}

TEST(Io, BadMagicVersionAndNan) {
  std::vector<char> bytes = io::encode_matrix(Matrix::Ones(2, 2));
  std::vector<char> bad = bytes;
  bad[0] = 'X';
  EXPECT_EQ(kind_of([&] { io::decode_matrix(bad); }), ErrorKind::kBadMagic);
  bad = bytes;
  bad[4] = 2;
  EXPECT_EQ(kind_of([&] { io::decode_matrix(bad); }), ErrorKind::kBadVersion);
  bad = bytes;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bad.data() + 16 + 3 * 4, &nan, 4);
  try {
    io::decode_matrix(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNanEntry);
    EXPECT_NE(std::string(e.what()).find("byte offset 28 (row 1, column 1)"), std::string::npos);
  }
  bad = bytes;
  bad.push_back(0);
  EXPECT_EQ(kind_of([&] { io::decode_matrix(bad); }), ErrorKind::kParse);
}

TEST(Io, CsvFallback) {
  svmp_test::TempDir dir;
  io::write_text("1.5,2.0\n3.0,4.0", dir / "b.csv");
  const FeatureBag bag = io::read_bag(dir / "b.csv");
  ASSERT_EQ(bag.size(), 2);
  ASSERT_EQ(bag.dim(), 2);
  EXPECT_EQ(bag.features(0, 0), 1.5);
  EXPECT_EQ(bag.features(1, 1), 4.0);
  io::write_text("1,2\n3\n", dir / "ragged.csv");
  EXPECT_EQ(kind_of([&] { io::read_bag(dir / "ragged.csv"); }), ErrorKind::kParse);
  io::write_text("1,x\n", dir / "junk.csv");
  try {
    io::read_bag(dir / "junk.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":1:"), std::string::npos);
  }
  std::mt19937_64 rng(2);
  const FeatureBag r{svmp_test::gaussian(rng, 3, 3), "r"};
  io::write_bag(r, dir / "r.csv");
  EXPECT_EQ(io::read_bag(dir / "r.csv").features, r.features);
}

TEST(Io, ManifestOrderAndDuplicates) {
  svmp_test::TempDir dir;
  std::filesystem::create_directories(dir / "bags");
  io::write_bag(FeatureBag{Matrix::Ones(2, 2), "a"}, dir / "bags/a.svmp");
  io::write_bag(FeatureBag{Matrix::Zero(3, 2), "b"}, dir / "bags/b.svmp");
  io::write_text("bags/b.svmp,4\nbags/a.svmp,2\n\nbags/b.svmp,4\n", dir / "m.txt");
  const auto entries = io::read_manifest(dir / "m.txt");
  ASSERT_EQ(entries.size(), 3U);
  EXPECT_EQ(entries[0].path.filename(), "b.svmp");
  EXPECT_EQ(entries[1].label, 2);
  EXPECT_EQ(entries[2].line, 4);
  const auto data = io::load_manifest(dir / "m.txt");
  EXPECT_EQ(data.labels, (std::vector<int>{2, 1, 2}));
  EXPECT_EQ(data.class_names, (std::vector<std::string>{"2", "4"}));
  EXPECT_EQ(data.bags[2].size(), 3);
}

TEST(Io, ManifestErrorsNameTheLine) {
  svmp_test::TempDir dir;
  io::write_bag(FeatureBag{Matrix::Ones(2, 2), "a"}, dir / "a.svmp");
  io::write_text("a.svmp,1\nmissing.svmp,2\n", dir / "m.txt");
  try {
    io::read_manifest(dir / "m.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("m.txt:2"), std::string::npos);
  }
  io::write_text("a.svmp,one\n", dir / "n.txt");
  EXPECT_EQ(kind_of([&] { io::read_manifest(dir / "n.txt"); }), ErrorKind::kParse);
}

TEST(Io, DescriptorRoundTrip) {
  svmp_test::TempDir dir;
  std::mt19937_64 rng(3);
  pipeline::LabeledDescriptorSet set;
  set.descriptors = float_representable(rng, 5, 7);
  set.labels = {1, 2, 2, 3, 1};
  set.class_names = {"0", "5", "9"};
  set.sequence_ids = {"a", "b,c", "d", "e", "f"};
  io::write_descriptors(set, dir / "d.svmp");
  const auto back = io::read_descriptors(dir / "d.svmp");
  EXPECT_EQ(back.descriptors, set.descriptors);
  EXPECT_EQ(back.labels, set.labels);
  EXPECT_EQ(back.class_names, set.class_names);
  EXPECT_EQ(back.sequence_ids, set.sequence_ids);
}

TEST(Io, ModelRoundTripIsExact) {
  svmp_test::TempDir dir;
  std::mt19937_64 rng(4);
  pipeline::MulticlassModel model;
  model.weights = svmp_test::gaussian(rng, 3, 6);
  model.biases = svmp_test::gaussian(rng, 3, 1).col(0);
  model.class_names = {"1", "2", "3"};
  io::write_model(model, dir / "m.model");
  const auto back = io::read_model(dir / "m.model");
  EXPECT_EQ(back.weights, model.weights);
  EXPECT_EQ(back.biases, model.biases);
  EXPECT_EQ(back.class_names, model.class_names);
  io::write_text("svmp-model 1\nclasses 1\ndim 2\nclass a 0x1p+0 0x1p+0\n", dir / "short.model");
  EXPECT_EQ(kind_of([&] { io::read_model(dir / "short.model"); }), ErrorKind::kTruncated);
}
