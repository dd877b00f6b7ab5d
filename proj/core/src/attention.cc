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

#include "kfuse/attention.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "kfuse/embedding.h"

namespace kfuse {
namespace {

// Standard normal draws from mt19937_64 via Box-Muller. The engine's output
// sequence is fixed by the standard, unlike std::normal_distribution.
class GaussianSource {
 public:
  explicit GaussianSource(uint64_t seed) : engine_(seed) {}

  double Next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = Uniform();
    double u2 = Uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  // Uniform in (0, 1].
  double Uniform() { return (double(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::vector<double> RandomProjection(GaussianSource &gauss, size_t dim) {
  std::vector<double> w(dim * dim);
  const double scale = 1.0 / std::sqrt(double(dim));
  for (double &x : w) x = gauss.Next() * scale;
  return w;
}

std::vector<double> Project(const std::vector<double> &w,
                            const std::vector<double> &x) {
  const size_t dim = x.size();
  std::vector<double> y(dim, 0.0);
  for (size_t r = 0; r < dim; ++r) {
    double acc = 0.0;
    for (size_t c = 0; c < dim; ++c) acc += w[r * dim + c] * x[c];
    y[r] = acc;
  }
  return y;
}

}  // namespace

std::vector<double> SinusoidalEncoding(int64_t position, size_t dim) {
  std::vector<double> pe(dim);
  for (size_t i = 0; i < dim; ++i) {
    double exponent = double(2 * (i / 2)) / double(dim);
    double angle = double(position) / std::pow(10000.0, exponent);
    pe[i] = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
  }
  return pe;
}

AttentionMap MaskedAttention(const FlattenedSequence &seq,
                             const PackedVisibleMatrix &visible, size_t dim,
                             uint64_t seed) {
  const size_t n = seq.size();
  if (visible.n() != n) {
    throw std::invalid_argument("masked_attention: visible matrix is " +
                                std::to_string(visible.n()) +
                                "x" + std::to_string(visible.n()) +
                                " but the sequence has " + std::to_string(n) +
                                " tokens");
  }
  if (dim == 0) throw std::invalid_argument("masked_attention: dim must be > 0");

  GaussianSource gauss(seed);
  std::vector<double> wq = RandomProjection(gauss, dim);
  std::vector<double> wk = RandomProjection(gauss, dim);

  HashEmbedder embedder(dim);
  std::vector<std::vector<double>> queries(n), keys(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> x = embedder.EmbedOne(seq.tokens[i]).values;
    std::vector<double> pe = SinusoidalEncoding(seq.soft_positions[i], dim);
    for (size_t d = 0; d < dim; ++d) x[d] += pe[d];
    queries[i] = Project(wq, x);
    keys[i] = Project(wk, x);
  }

  AttentionMap map;
  map.n = n;
  map.weights.assign(n * n, 0.0);
  const double scale = 1.0 / std::sqrt(double(dim));
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> scores(n);
  for (size_t i = 0; i < n; ++i) {
    double row_max = neg_inf;
    for (size_t j = 0; j < n; ++j) {
      if (!visible.Visible(i, j)) {
        scores[j] = neg_inf;
        continue;
      }
      double dot = 0.0;
      for (size_t d = 0; d < dim; ++d) dot += queries[i][d] * keys[j][d];
      scores[j] = dot * scale;
      row_max = std::max(row_max, scores[j]);
    }
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) {
      double e = std::exp(scores[j] - row_max);  // exp(-inf) == 0
      map.weights[i * n + j] = e;
      sum += e;
    }
    for (size_t j = 0; j < n; ++j) map.weights[i * n + j] /= sum;
  }
  return map;
}

}  // namespace kfuse
