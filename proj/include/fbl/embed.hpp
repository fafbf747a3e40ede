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
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "fbl/corpus.hpp"
#include "fbl/encode.hpp"

namespace fbl {

/// Row-major float matrix of token embeddings for one document or query.
/// Rows are unit-norm except rows whose projection vanished; those are
/// stored as zeros, flagged dead, and ignored by MaxSim.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim)
      : rows_(rows), dim_(dim), data_(rows * dim, 0.0f) {}
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return rows_ == 0; }

  std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<float> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  const float* data() const { return data_.data(); }
  float* data() { return data_.data(); }
  const std::vector<float>& values() const { return data_; }

  bool is_query() const { return is_query_; }
  void set_query(bool q) { is_query_ = q; }

  bool all_live() const { return dead_.empty(); }
  bool live(std::size_t i) const;
  std::size_t live_rows() const;
  void mark_dead(std::size_t i);

  /// Scales every non-zero row to unit length; zero rows become dead.
  void normalize_rows();

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
  std::vector<std::uint32_t> dead_;  // sorted
  bool is_query_ = false;
};

/// Maps token ids to d_in-dimensional vectors. Stands in for the frozen
/// transformer; implementations must be deterministic and thread-safe.
class TokenEmbedder {
 public:
  virtual ~TokenEmbedder() = default;
  virtual std::size_t dim() const = 0;
  /// Number of token ids served; ids are [0, vocab_limit()).
  virtual std::size_t vocab_limit() const = 0;
  virtual void embed(TokenId id, std::span<float> out) const = 0;
  /// Short description recorded in session manifests, e.g. "hash:42:768".
  virtual std::string spec() const = 0;
};

/// Seeded pseudo-random Gaussian direction per token id, unit length.
class ReferenceHashEmbedder final : public TokenEmbedder {
 public:
  ReferenceHashEmbedder(std::uint64_t seed, std::size_t dim,
                        std::size_t vocab_limit = std::size_t{1} << 31);
  std::size_t dim() const override { return dim_; }
  std::size_t vocab_limit() const override { return vocab_limit_; }
  void embed(TokenId id, std::span<float> out) const override;
  std::string spec() const override;

 private:
  std::uint64_t seed_;
  std::size_t dim_;
  std::size_t vocab_limit_;
};

/// Static table loaded from an FBLE file, row = token id.
class FileEmbedder final : public TokenEmbedder {
 public:
  explicit FileEmbedder(const std::filesystem::path& path);
  FileEmbedder(std::size_t rows, std::size_t dim, std::vector<float> table);
  std::size_t dim() const override { return dim_; }
  std::size_t vocab_limit() const override { return rows_; }
  void embed(TokenId id, std::span<float> out) const override;
  std::string spec() const override { return spec_; }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> table_;
  std::string spec_;
};

/// Parses `hash` / `hash:<seed>` / `file:<path>`.
std::unique_ptr<TokenEmbedder> make_embedder(const std::string& spec, std::uint64_t seed,
                                             std::size_t d_in);

/// y = x^T W with W stored d_in x d_out, row-major.
class LinearProjection {
 public:
  LinearProjection() = default;
  LinearProjection(std::size_t d_in, std::size_t d_out, std::vector<float> weights);

  static LinearProjection identity(std::size_t d);
  /// Uniform in [-1/sqrt(d_in), 1/sqrt(d_in)].
  static LinearProjection seeded(std::size_t d_in, std::size_t d_out, std::uint64_t seed);
  static LinearProjection from_eigen(const Eigen::MatrixXd& w);

  std::size_t d_in() const { return d_in_; }
  std::size_t d_out() const { return d_out_; }
  const std::vector<float>& weights() const { return w_; }
  Eigen::MatrixXd to_eigen() const;

  void apply(std::span<const float> x, std::span<float> y) const;

  bool operator==(const LinearProjection&) const = default;

 private:
  std::size_t d_in_ = 0;
  std::size_t d_out_ = 0;
  std::vector<float> w_;
};

/// Rows for the non-[PAD] prefix: normalize(W^T embedder(token)).
EmbeddingMatrix embed_sequence(const EncodedSequence& seq, const TokenEmbedder& embedder,
                               const LinearProjection& projection, bool is_query = false);

/// Projected, normalized vector for every token id; embedding through the
/// table gives the same rows as embed_sequence without recomputing the
/// projection per occurrence.
class TokenTable {
 public:
  TokenTable(const TokenEmbedder& embedder, const LinearProjection& projection,
             std::size_t vocab_size);
  EmbeddingMatrix embed(const EncodedSequence& seq, bool is_query = false) const;
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_ = 0;
  std::size_t size_ = 0;
  std::vector<float> rows_;
  std::vector<std::uint8_t> zero_;
};

/// max(0, margin - maxsim(q, pos) + maxsim(q, neg))
double triplet_loss(const EmbeddingMatrix& q, const EmbeddingMatrix& pos,
                    const EmbeddingMatrix& neg, double margin);

/// Pre-projection token vectors of one triplet, one row per token.
struct TripletInputs {
  Eigen::MatrixXd query;
  Eigen::MatrixXd positive;
  Eigen::MatrixXd negative;
};

/// Triplet loss computed in double precision through W (d_in x d_out).
double triplet_loss(const TripletInputs& t, const Eigen::MatrixXd& w, double margin);

/// Analytic d loss / d W, including the row-normalization Jacobian. Ties in
/// the max go to the lowest-index row.
Eigen::MatrixXd gradient_of_loss(const TripletInputs& t, const Eigen::MatrixXd& w,
                                 double margin);

struct TripletTrainConfig {
  double margin = 0.5;
  double learning_rate = 1e-3;
  std::size_t epochs = 4;
  std::size_t batch_size = 16;
  std::size_t d_out = 128;
  std::uint64_t seed = 42;
};

/// Encoded sequences referenced by triplets.
struct TrainingSet {
  std::unordered_map<std::string, EncodedSequence> queries;    // by bug id
  std::unordered_map<std::string, EncodedSequence> documents;  // by doc id
};

struct TrainResult {
  LinearProjection projection;
  /// Mean loss over all triplets before training and after each epoch.
  std::vector<double> epoch_loss;
  std::vector<double> batch_loss;
};

/// Mini-batch SGD on the mean triplet loss. Throws kInvalidArgument for an
/// empty triplet list, kNonFiniteLoss if the loss diverges.
TrainResult train_projection(std::span<const Triplet> triplets, const TrainingSet& data,
                             const TokenEmbedder& embedder, const TripletTrainConfig& cfg);

// FBLE: "FBLE", u32 version, u32 rows, u32 dim, rows*dim f32, little-endian.
struct FbleMatrix {
  std::uint32_t rows = 0;
  std::uint32_t dim = 0;
  std::vector<float> values;
};

void write_fble(std::ostream& out, const FbleMatrix& m);
FbleMatrix read_fble(std::istream& in, const std::string& name);
void save_fble(const std::filesystem::path& path, const FbleMatrix& m);
FbleMatrix load_fble(const std::filesystem::path& path);

void save_projection(const std::filesystem::path& path, const LinearProjection& p);
LinearProjection load_projection(const std::filesystem::path& path);

}  // namespace fbl
