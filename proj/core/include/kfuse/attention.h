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

#ifndef KFUSE_ATTENTION_H_
#define KFUSE_ATTENTION_H_

#include <cstdint>
#include <vector>

#include "kfuse/sentence_tree.h"
#include "kfuse/visible_matrix.h"

namespace kfuse {

// Row-stochastic n x n attention weights.
struct AttentionMap {
  size_t n = 0;
  std::vector<double> weights;

  double operator()(size_t i, size_t j) const { return weights[i * n + j]; }
};

// Standard sinusoidal encoding of a (soft) position.
std::vector<double> SinusoidalEncoding(int64_t position, size_t dim);

// Single-head, single-layer masked self-attention. Token vectors are the
// hash embedding of the surface plus the sinusoidal encoding of the soft
// position; query/key projections are drawn from a seeded generator.
// Invisible pairs get -inf before the row softmax and therefore weight 0.
// Throws std::invalid_argument if visible.n() != seq.size() or dim == 0.
AttentionMap MaskedAttention(const FlattenedSequence &seq,
                             const PackedVisibleMatrix &visible, size_t dim,
                             uint64_t seed);

}  // namespace kfuse

#endif  // KFUSE_ATTENTION_H_
