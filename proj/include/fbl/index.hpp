// Copyright 2026 The fbl Authors
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
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fbl/embed.hpp"

namespace fbl {

/// Per-document embedding matrices keyed by doc id, in insertion order.
class DocMatrices {
 public:
  void add(std::string doc_id, EmbeddingMatrix m);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  /// Row width shared by all documents; 0 while empty.
  std::size_t dim() const { return dim_; }
  std::size_t total_rows() const;

  const std::string& id(std::size_t i) const { return ids_[i]; }
  const EmbeddingMatrix& matrix(std::size_t i) const { return mats_[i]; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<std::size_t> find(std::string_view doc_id) const;

  bool operator==(const DocMatrices& o) const { return ids_ == o.ids_ && mats_ == o.mats_; }

 private:
  std::vector<std::string> ids_;
  std::vector<EmbeddingMatrix> mats_;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::size_t dim_ = 0;
};

struct KMeansResult {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<float> centroids;       // k x dim, row-major
  std::vector<std::uint32_t> assign;  // nearest centroid per point
  /// Mean squared distance to the assigned centroid after each assignment
  /// step; entry 0 is the initial assignment.
  std::vector<double> distortion;
  std::size_t iterations = 0;
};

/// Lloyd's algorithm from k-means++ seeding. Empty clusters are re-seeded
/// with the point farthest from its centroid. Stops after max_iters or when
/// no assignment changes.
KMeansResult kmeans(std::span<const float> points, std::size_t dim, std::size_t k,
                    std::uint64_t seed, std::size_t max_iters = 25);

/// Index of the nearest centroid (squared L2, lowest index on ties).
std::uint32_t nearest_centroid(std::span<const float> x, std::span<const float> centroids,
                               std::size_t k);

struct IvfPqParams {
  std::uint32_t partitions = 320;
  std::uint32_t subspaces = 16;
  std::uint32_t codewords = 256;
  std::uint64_t seed = 42;
  std::size_t max_train_rows = 256 * 1024;
  std::size_t kmeans_iters = 25;
};

struct SearchHit {
  std::uint64_t embedding_id = 0;
  float score = 0.0f;

  bool operator==(const SearchHit&) const = default;
};

struct RegistryEntry {
  std::uint32_t doc_index = 0;
  std::uint32_t token_position = 0;

  bool operator==(const RegistryEntry&) const = default;
};

/// Inverted file over coarse k-means partitions with product-quantized
/// residuals. Scores are approximate inner products:
///   <q, c_p> + sum_m <q_m, codebook_m[code_m]>.
/// Immutable once built; search is safe from any number of threads.
class IvfPqIndex {
 public:
  IvfPqIndex() = default;

  /// Throws kInsufficientData if there are fewer live rows than partitions.
  static IvfPqIndex build(const DocMatrices& docs, const IvfPqParams& params);

  std::uint32_t partitions() const { return p_; }
  std::uint32_t subspaces() const { return m_; }
  std::uint32_t codewords() const { return k_; }
  std::uint32_t dim() const { return d_; }
  std::uint64_t size() const { return registry_.size(); }

  const std::vector<float>& coarse_centroids() const { return centroids_; }
  const std::vector<float>& codebooks() const { return codebooks_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const RegistryEntry& registry(std::uint64_t embedding_id) const { return registry_.at(embedding_id); }
  std::size_t list_size(std::uint32_t partition) const { return list_ids_[partition].size(); }
  std::uint32_t partition_of(std::uint64_t embedding_id) const;

  /// Coarse centroid plus decoded residual.
  std::vector<float> reconstruct(std::uint64_t embedding_id) const;

  /// The `nprobe` partitions nearest to q, nearest first.
  std::vector<std::uint32_t> probe_order(std::span<const float> q, std::size_t nprobe) const;

  /// Top-k by descending approximate score, ties by embedding id.
  std::vector<SearchHit> search(std::span<const float> q, std::size_t nprobe,
                                std::size_t topk) const;

  /// Unique doc ids reached by fetching ceil(n_prime / rows) embeddings per
  /// live query row, ordered by first appearance in descending score.
  std::vector<std::string> candidate_docs(const EmbeddingMatrix& query, std::size_t n_prime,
                                          std::size_t nprobe) const;

  void write(std::ostream& out) const;
  static IvfPqIndex read(std::istream& in, const std::string& name);
  void save(const std::filesystem::path& path) const;
  static IvfPqIndex load(const std::filesystem::path& path);

  bool operator==(const IvfPqIndex&) const = default;

 private:
  void rebuild_locator();

  std::uint32_t p_ = 0;
  std::uint32_t m_ = 0;
  std::uint32_t k_ = 0;
  std::uint32_t d_ = 0;
  std::vector<float> centroids_;   // p x d
  std::vector<float> codebooks_;   // m x k x (d / m)
  std::vector<std::vector<std::uint64_t>> list_ids_;
  std::vector<std::vector<std::uint8_t>> list_codes_;  // m bytes per entry
  std::vector<RegistryEntry> registry_;                // by embedding id
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> partition_of_;            // derived, by embedding id
};

}  // namespace fbl
