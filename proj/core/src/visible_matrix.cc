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

#include <string>

namespace kfuse {
namespace {

std::string At(size_t i, size_t j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

PackedVisibleMatrix::PackedVisibleMatrix(size_t n)
    : n_(n), bytes_(PackedSize(n), 0) {
  for (size_t i = 0; i < n; ++i) bytes_[PackedIndex(n, i, i)] = 1;
}

PackedVisibleMatrix PackedVisibleMatrix::FromBytes(size_t n,
                                                   std::vector<uint8_t> bytes) {
  if (bytes.size() != PackedSize(n)) {
    throw std::invalid_argument(
        "packed visible matrix for n=" + std::to_string(n) + " needs " +
        std::to_string(PackedSize(n)) + " bytes, got " +
        std::to_string(bytes.size()));
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j) {
      uint8_t v = bytes[PackedIndex(n, i, j)];
      if (v > 1) throw std::invalid_argument("non-binary entry at " + At(i, j));
      if (i == j && v != 1) {
        throw std::invalid_argument("invisible diagonal entry at " + At(i, j));
      }
    }
  }
  PackedVisibleMatrix m;
  m.n_ = n;
  m.bytes_ = std::move(bytes);
  return m;
}

PackedVisibleMatrix Pack(const DenseMatrix &dense) {
  const size_t n = dense.n();
  std::vector<uint8_t> bytes(PackedSize(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j) {
      uint8_t upper = dense(i, j);
      if (upper > 1 || dense(j, i) > 1) {
        throw std::invalid_argument("pack: non-binary entry at " + At(i, j));
      }
      if (upper != dense(j, i)) {
        throw std::invalid_argument("pack: matrix is not symmetric at " +
                                    At(i, j));
      }
      if (i == j && upper != 1) {
        throw std::invalid_argument("pack: diagonal entry is 0 at " + At(i, j));
      }
      bytes[PackedIndex(n, i, j)] = upper;
    }
  }
  return PackedVisibleMatrix::FromBytes(n, std::move(bytes));
}

DenseMatrix Unpack(const PackedVisibleMatrix &packed) {
  const size_t n = packed.n();
  DenseMatrix dense(n);
  const std::vector<uint8_t> &bytes = packed.bytes();
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j, ++k) {
      dense(i, j) = bytes[k];
      dense(j, i) = bytes[k];
    }
  }
  return dense;
}

}  // namespace kfuse
