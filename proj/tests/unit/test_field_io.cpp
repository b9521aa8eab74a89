#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <random>
#include <sstream>

#include "mfgplan/error.hpp"
#include "mfgplan/field_io.hpp"
#include "test_support.hpp"

using namespace mfgplan;

namespace {

std::string error_of(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    read_field(in);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(FieldIo, HeaderAndPayloadBytes) {
  const TorusGrid g = TorusGrid::make_1d(2, 2, 1.0);
  ScalarField f(g);
  f(0, 0) = 1.0;
  f(2, 1) = -2.5;
  std::ostringstream out;
  write_field(out, f, "m");
  const std::string bytes = out.str();
  const std::string header = "mfgfield version=1 dim=1 nx=2 ny=1 nt=2 T=1 stagger=nodes components=1 name=m byte_order=little\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  ASSERT_EQ(bytes.size(), header.size() + 6 * 8);
  // 1.0 = 0x3FF0000000000000, little-endian.
  const unsigned char one[8] = {0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
  EXPECT_EQ(std::memcmp(bytes.data() + header.size(), one, 8), 0);
  const unsigned char minus_2_5[8] = {0, 0, 0, 0, 0, 0, 0x04, 0xC0};
  EXPECT_EQ(std::memcmp(bytes.data() + header.size() + 5 * 8, minus_2_5, 8), 0);
}

TEST(FieldIo, RoundTripIsBitExact) {
  std::mt19937_64 rng(51);
  const TorusGrid g = TorusGrid::make_2d(5, 3, 4, 0.7);
  ScalarField s(g);
  mfgplan::testing::fill_random(s, rng, -1e300, 1e300);
  s(1, 2) = -0.0;
  s(2, 3) = std::numeric_limits<double>::denorm_min();
  VectorField w(g, TimeLayout::intervals);
  mfgplan::testing::fill_random(w, rng);

  std::stringstream buf;
  write_field(buf, s, "density");
  const FieldData back = read_field(buf);
  ASSERT_EQ(back.components.size(), 1u);
  EXPECT_EQ(back.header.name, "density");
  EXPECT_EQ(back.header.grid(), g);
  EXPECT_EQ(back.header.horizon, 0.7);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.components[0].values()[i]), std::bit_cast<std::uint64_t>(s.values()[i]));
  }

  std::stringstream vbuf;
  write_field(vbuf, w, "w");
  const FieldData vback = read_field(vbuf);
  ASSERT_EQ(vback.components.size(), 2u);
  EXPECT_EQ(vback.header.stagger, TimeLayout::intervals);
  for (int a = 0; a < 2; ++a) {
    for (std::size_t i = 0; i < w[a].size(); ++i) EXPECT_EQ(vback.components[a].values()[i], w[a].values()[i]);
  }
}

TEST(FieldIo, TruncatedPayloadNamesByteCounts) {
  const TorusGrid g = TorusGrid::make_1d(4, 2, 1.0);
  std::ostringstream out;
  write_field(out, ScalarField(g), "m");
  const std::string bytes = out.str();
  const std::string msg = error_of(bytes.substr(0, bytes.size() - 8));
  EXPECT_NE(msg.find("96"), std::string::npos) << msg;
  EXPECT_NE(msg.find("88"), std::string::npos) << msg;
}

TEST(FieldIo, HeaderPayloadInconsistency) {
  std::ostringstream out;
  write_field(out, ScalarField(TorusGrid::make_1d(4, 16, 1.0)), "m");
  std::string bytes = out.str();
  bytes.replace(bytes.find("nt=16"), 5, "nt=32");
  EXPECT_FALSE(error_of(bytes).empty());
}

TEST(FieldIo, UnknownByteOrderAndMalformedHeader) {
  std::ostringstream out;
  write_field(out, ScalarField(TorusGrid::make_1d(4, 2, 1.0)), "m");
  std::string bytes = out.str();
  std::string big = bytes;
  big.replace(big.find("byte_order=little"), 17, "byte_order=big");
  EXPECT_NE(error_of(big).find("byte order"), std::string::npos) << error_of(big);
  EXPECT_FALSE(error_of("not a field\n").empty());
  EXPECT_FALSE(error_of("").empty());
  std::string bad_nx = bytes;
  bad_nx.replace(bad_nx.find("nx=4"), 4, "nx=x");
  EXPECT_FALSE(error_of(bad_nx).empty());
}

TEST(FieldIo, FileRoundTripAndTypedReaders) {
  const TorusGrid g = TorusGrid::make_1d(8, 4, 1.0);
  ScalarField s(g, TimeLayout::nodes, 0.25);
  VectorField w(g, TimeLayout::intervals, 0.5);
  const std::string dir = ::testing::TempDir();
  write_field(dir + "/s.field", s, "s");
  write_field(dir + "/w.field", w, "w");
  EXPECT_EQ(read_scalar_field(dir + "/s.field").values()[3], 0.25);
  EXPECT_EQ(read_vector_field(dir + "/w.field")[0].values()[3], 0.5);
  EXPECT_THROW(read_field(dir + "/missing.field"), Error);
}
