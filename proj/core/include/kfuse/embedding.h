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

#ifndef KFUSE_EMBEDDING_H_
#define KFUSE_EMBEDDING_H_

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kfuse {

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmbeddingVector {
  std::vector<double> values;

  size_t dim() const { return values.size(); }
  double Norm() const;
  bool operator==(const EmbeddingVector &other) const = default;
};

// Cosine similarity; 0 when either vector has zero norm. Throws
// std::invalid_argument naming both dimensions on mismatch.
double Cosine(const EmbeddingVector &a, const EmbeddingVector &b);

// Scales to unit L2 norm in place. Zero vectors are left unchanged.
void L2Normalize(EmbeddingVector &v);

// Produces one embedding per input text, in order. Implementations are
// read-only after construction and safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<EmbeddingVector> Embed(
      std::span<const std::string> texts) const = 0;
  virtual std::string Describe() const = 0;
};

// Feature-hashing embedder over word unigrams and bigrams of the normalized
// text. Each feature's FNV-1a 64-bit hash picks the index (hash mod dim)
// and the sign (bit 63 set means -1). Output depends only on (text, dim).
class HashEmbedder final : public EmbeddingProvider {
 public:
  explicit HashEmbedder(size_t dim = 64, bool normalize = true);

  std::vector<EmbeddingVector> Embed(
      std::span<const std::string> texts) const override;
  EmbeddingVector EmbedOne(const std::string &text) const;
  std::string Describe() const override;

  size_t dim() const { return dim_; }

 private:
  size_t dim_;
  bool normalize_;
};

// Client for an HTTP embedding service.
//   request:  POST {"texts": [string, ...]}
//   response: {"embeddings": [[number, ...], ...]}
// Texts are sent in batches; errors carry the endpoint and batch index.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  struct Options {
    std::string endpoint;  // http://host[:port]/path
    bool normalize = true;
    size_t batch_size = 64;
    std::chrono::milliseconds timeout{30000};
  };

  explicit RemoteEmbedder(Options options);

  std::vector<EmbeddingVector> Embed(
      std::span<const std::string> texts) const override;
  std::string Describe() const override;

 private:
  std::vector<EmbeddingVector> EmbedBatch(std::span<const std::string> texts,
                                          size_t batch_index) const;

  Options options_;
  std::string scheme_host_port_;
  std::string path_;
};

enum class ProviderKind { kHash, kRemote };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kHash;
  size_t dim = 64;
  std::optional<std::string> endpoint;
  bool normalize = true;
  std::chrono::milliseconds timeout{30000};
};

// Throws std::invalid_argument when a remote provider has no endpoint or
// the hash dimension is zero.
std::unique_ptr<EmbeddingProvider> MakeProvider(const ProviderConfig &config);

}  // namespace kfuse

#endif  // KFUSE_EMBEDDING_H_
