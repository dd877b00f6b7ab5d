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

#ifndef KFUSE_VISIBLE_MATRIX_H_
#define KFUSE_VISIBLE_MATRIX_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace kfuse {

// Number of entries in the upper triangle of an n x n matrix, diagonal
// included.
constexpr size_t PackedSize(size_t n) { return n * (n + 1) / 2; }

// Offset of (row, col), row <= col, in row-major upper-triangular storage.
constexpr size_t PackedIndex(size_t n, size_t row, size_t col) {
  return row * n - row * (row - 1) / 2 + (col - row);
}

// Bytes a dense matrix of 4-byte elements occupies.
constexpr size_t DenseFloatBytes(size_t n) { return 4 * n * n; }

// Row-major dense binary matrix, one byte per entry.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(size_t n, uint8_t fill = 0) : n_(n), data_(n * n, fill) {}

  size_t n() const { return n_; }
  uint8_t operator()(size_t i, size_t j) const { return data_[i * n_ + j]; }
  uint8_t &operator()(size_t i, size_t j) { return data_[i * n_ + j]; }
  const std::vector<uint8_t> &data() const { return data_; }

  bool operator==(const DenseMatrix &other) const = default;

 private:
  size_t n_ = 0;
  std::vector<uint8_t> data_;
};

// Symmetric binary visibility matrix stored as its upper triangle, one byte
// per entry: n(n+1)/2 bytes instead of n^2 elements.
class PackedVisibleMatrix {
 public:
  PackedVisibleMatrix() = default;

  // All-invisible except for the diagonal.
  explicit PackedVisibleMatrix(size_t n);

  // Adopts raw packed bytes. Throws std::invalid_argument if the length is
  // not n(n+1)/2, an entry is not 0/1, or a diagonal entry is 0.
  static PackedVisibleMatrix FromBytes(size_t n, std::vector<uint8_t> bytes);

  size_t n() const { return n_; }
  const std::vector<uint8_t> &bytes() const { return bytes_; }

  bool Visible(size_t i, size_t j) const {
    return bytes_[i <= j ? PackedIndex(n_, i, j) : PackedIndex(n_, j, i)] != 0;
  }
  void Set(size_t i, size_t j, bool visible) {
    bytes_[i <= j ? PackedIndex(n_, i, j) : PackedIndex(n_, j, i)] =
        visible ? 1 : 0;
  }

  bool operator==(const PackedVisibleMatrix &other) const = default;

 private:
  size_t n_ = 0;
  std::vector<uint8_t> bytes_;
};

// Packs a symmetric binary matrix with unit diagonal. Throws
// std::invalid_argument naming the first offending (i, j) in row-major
// order for asymmetric, non-binary, or zero-diagonal input.
PackedVisibleMatrix Pack(const DenseMatrix &dense);

DenseMatrix Unpack(const PackedVisibleMatrix &packed);

}  // namespace kfuse

#endif  // KFUSE_VISIBLE_MATRIX_H_
