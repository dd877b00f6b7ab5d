// Copyright 2026 The kfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kfuse/visible_matrix.h"

#include <gtest/gtest.h>

#include <random>

namespace kfuse {
namespace {

DenseMatrix RandomSymmetric(std::mt19937_64 &rng, size_t n) {
  DenseMatrix m(n);
  for (size_t i = 0; i < n; ++i) {
    m(i, i) = 1;
    for (size_t j = i + 1; j < n; ++j) {
      uint8_t v = rng() & 1;
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

TEST(PackedSize, Arithmetic) {
  EXPECT_EQ(PackedSize(1), 1u);
  EXPECT_EQ(PackedSize(16), 136u);
  EXPECT_EQ(PackedSize(128), 8256u);
  EXPECT_EQ(PackedSize(256), 32896u);
}

TEST(PackedIndex, RowMajorUpperTriangle) {
  const size_t n = 5;
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j) EXPECT_EQ(PackedIndex(n, i, j), k++);
  }
  EXPECT_EQ(k, PackedSize(n));
}

TEST(Pack, SmallestCase) {
  DenseMatrix m(1, 1);
  PackedVisibleMatrix p = Pack(m);
  EXPECT_EQ(p.bytes(), std::vector<uint8_t>{1});
  EXPECT_EQ(Unpack(p), m);
}

TEST(Pack, SeededRoundTrip) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    DenseMatrix m = RandomSymmetric(rng, 16);
    PackedVisibleMatrix p = Pack(m);
    ASSERT_EQ(p.bytes().size(), 136u);
    DenseMatrix back = Unpack(p);
    for (size_t i = 0; i < 16; ++i) {
      for (size_t j = 0; j < 16; ++j) ASSERT_EQ(back(i, j), m(i, j));
    }
  }
}

TEST(Pack, AsymmetricNamesFirstOffendingEntry) {
  DenseMatrix m(3, 1);
  m(1, 2) = 0;
  m(0, 2) = 0;  // first in row-major order
  try {
    Pack(m);
    FAIL();
  } catch (const std::invalid_argument &e) {
    EXPECT_NE(std::string(e.what()).find("(0, 2)"), std::string::npos) << e.what();
  }
}

TEST(Pack, RejectsNonBinaryAndZeroDiagonal) {
  DenseMatrix m(2, 1);
  m(0, 1) = m(1, 0) = 2;
  EXPECT_THROW(Pack(m), std::invalid_argument);
  DenseMatrix d(2, 1);
  d(1, 1) = 0;
  EXPECT_THROW(Pack(d), std::invalid_argument);
}

TEST(PackedVisibleMatrix, FromBytesValidates) {
  EXPECT_THROW(PackedVisibleMatrix::FromBytes(2, {1, 1}), std::invalid_argument);
  EXPECT_THROW(PackedVisibleMatrix::FromBytes(2, {1, 3, 1}), std::invalid_argument);
  EXPECT_NO_THROW(PackedVisibleMatrix::FromBytes(2, {1, 0, 1}));
  PackedVisibleMatrix empty(0);
  EXPECT_TRUE(empty.bytes().empty());
}

TEST(PackedVisibleMatrix, MemoryReductionAtLeastFour) {
  for (size_t n = 1; n <= 512; ++n) {
    EXPECT_LE(PackedSize(n), n * n);
    EXPECT_GE(double(DenseFloatBytes(n)) / double(PackedSize(n)), 4.0) << n;
  }
}

}  // namespace
}  // namespace kfuse
