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

#include "kfuse/embedding.h"

#include <cmath>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "kfuse/text.h"

namespace kfuse {

double EmbeddingVector::Norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

double Cosine(const EmbeddingVector &a, const EmbeddingVector &b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("cosine: dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

void L2Normalize(EmbeddingVector &v) {
  double norm = v.Norm();
  if (norm == 0.0) return;
  for (double &x : v.values) x /= norm;
}

HashEmbedder::HashEmbedder(size_t dim, bool normalize)
    : dim_(dim), normalize_(normalize) {
  if (dim_ == 0) throw std::invalid_argument("hash embedder dim must be > 0");
}

EmbeddingVector HashEmbedder::EmbedOne(const std::string &text) const {
  EmbeddingVector out;
  out.values.assign(dim_, 0.0);
  std::string normalized = Normalize(text);
  std::vector<std::string> words;
  std::istringstream stream(normalized);
  for (std::string w; stream >> w;) words.push_back(std::move(w));

  auto accumulate = [&](std::string_view feature) {
    uint64_t h = Fnv1a64(feature);
    double sign = (h >> 63) != 0 ? -1.0 : 1.0;
    out.values[h % dim_] += sign;
  };
  for (size_t i = 0; i < words.size(); ++i) {
    accumulate(words[i]);
    if (i + 1 < words.size()) accumulate(words[i] + " " + words[i + 1]);
  }
  if (normalize_) L2Normalize(out);
  return out;
}

std::vector<EmbeddingVector> HashEmbedder::Embed(
    std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string &text : texts) out.push_back(EmbedOne(text));
  return out;
}

std::string HashEmbedder::Describe() const {
  return "hash(dim=" + std::to_string(dim_) +
         ", normalize=" + (normalize_ ? "true" : "false") + ")";
}

RemoteEmbedder::RemoteEmbedder(Options options) : options_(std::move(options)) {
  const std::string &url = options_.endpoint;
  if (url.empty()) throw std::invalid_argument("remote embedder needs an endpoint");
  const std::string prefix = "http://";
  if (url.compare(0, prefix.size(), prefix) != 0) {
    throw std::invalid_argument("unsupported endpoint '" + url +
                                "' (expected http://host[:port]/path)");
  }
  size_t slash = url.find('/', prefix.size());
  if (slash == std::string::npos) {
    scheme_host_port_ = url;
    path_ = "/";
  } else {
    scheme_host_port_ = url.substr(0, slash);
    path_ = url.substr(slash);
  }
  if (scheme_host_port_.size() == prefix.size()) {
    throw std::invalid_argument("endpoint '" + url + "' has no host");
  }
  if (options_.batch_size == 0) options_.batch_size = 1;
}

std::string RemoteEmbedder::Describe() const {
  return "remote(" + options_.endpoint + ")";
}

std::vector<EmbeddingVector> RemoteEmbedder::Embed(
    std::span<const std::string> texts) const {
  if (texts.empty()) {
    throw EmbeddingError("remote embedder " + options_.endpoint +
                         ": empty batch");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  size_t batch_index = 0;
  for (size_t begin = 0; begin < texts.size();
       begin += options_.batch_size, ++batch_index) {
    size_t count = std::min(options_.batch_size, texts.size() - begin);
    auto batch = EmbedBatch(texts.subspan(begin, count), batch_index);
    if (!out.empty() && !batch.empty() && batch[0].dim() != out[0].dim()) {
      throw EmbeddingError("remote embedder " + options_.endpoint +
                           " batch " + std::to_string(batch_index) +
                           ": dimension changed between batches");
    }
    for (auto &v : batch) out.push_back(std::move(v));
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEmbedder::EmbedBatch(
    std::span<const std::string> texts, size_t batch_index) const {
  auto fail = [&](const std::string &what) {
    return EmbeddingError("remote embedder " + options_.endpoint + " batch " +
                          std::to_string(batch_index) + ": " + what);
  };

  nlohmann::json request;
  request["texts"] = std::vector<std::string>(texts.begin(), texts.end());

  httplib::Client client(scheme_host_port_);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  auto result = client.Post(path_, request.dump(), "application/json");
  if (!result) throw fail("request failed: " + httplib::to_string(result.error()));
  if (result->status < 200 || result->status >= 300) {
    throw fail("HTTP status " + std::to_string(result->status));
  }

  nlohmann::json response;
  try {
    response = nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::exception &e) {
    throw fail(std::string("malformed response: ") + e.what());
  }
  auto rows = response.find("embeddings");
  if (!response.is_object() || rows == response.end() || !rows->is_array()) {
    throw fail("response has no 'embeddings' array");
  }
  if (rows->size() != texts.size()) {
    throw fail("expected " + std::to_string(texts.size()) + " rows, got " +
               std::to_string(rows->size()));
  }
  std::vector<EmbeddingVector> out;
  out.reserve(rows->size());
  for (const auto &row : *rows) {
    if (!row.is_array() || row.empty()) throw fail("malformed embedding row");
    EmbeddingVector v;
    v.values.reserve(row.size());
    for (const auto &x : row) {
      if (!x.is_number()) throw fail("non-numeric embedding value");
      v.values.push_back(x.get<double>());
    }
    if (!out.empty() && v.dim() != out.front().dim()) {
      throw fail("rows have different dimensions");
    }
    if (options_.normalize) L2Normalize(v);
    out.push_back(std::move(v));
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> MakeProvider(const ProviderConfig &config) {
  switch (config.kind) {
    case ProviderKind::kHash:
      return std::make_unique<HashEmbedder>(config.dim, config.normalize);
    case ProviderKind::kRemote: {
      if (!config.endpoint || config.endpoint->empty()) {
        throw std::invalid_argument("remote provider requires an endpoint");
      }
      RemoteEmbedder::Options options;
      options.endpoint = *config.endpoint;
      options.normalize = config.normalize;
      options.timeout = config.timeout;
      return std::make_unique<RemoteEmbedder>(std::move(options));
    }
  }
  throw std::invalid_argument("unknown provider kind");
}

}  // namespace kfuse
