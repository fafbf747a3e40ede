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
#include "fbl/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fbl/binary_io.hpp"
#include "fbl/error.hpp"
#include "fbl/retrieve.hpp"
#include "fbl/simd/kernels.hpp"

namespace fbl {

// ---------------------------------------------------------------------------
// EmbeddingMatrix

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
  if (data_.size() != rows * dim) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding matrix data size mismatch");
  }
}

bool EmbeddingMatrix::live(std::size_t i) const {
  return dead_.empty() || !std::binary_search(dead_.begin(), dead_.end(), static_cast<std::uint32_t>(i));
}

std::size_t EmbeddingMatrix::live_rows() const { return rows_ - dead_.size(); }

void EmbeddingMatrix::mark_dead(std::size_t i) {
  const auto v = static_cast<std::uint32_t>(i);
  auto it = std::lower_bound(dead_.begin(), dead_.end(), v);
  if (it == dead_.end() || *it != v) dead_.insert(it, v);
  std::fill_n(data_.begin() + static_cast<std::ptrdiff_t>(i * dim_), dim_, 0.0f);
}

void EmbeddingMatrix::normalize_rows() {
  for (std::size_t i = 0; i < rows_; ++i) {
    auto r = row(i);
    double sq = 0.0;
    for (float v : r) sq += static_cast<double>(v) * v;
    if (sq == 0.0 || !std::isfinite(sq)) {
      mark_dead(i);
      continue;
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (float& v : r) v = static_cast<float>(v * inv);
  }
}

// ---------------------------------------------------------------------------
// Embedders

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_id(TokenId id, std::size_t limit) {
  if (id < 0 || static_cast<std::size_t>(id) >= limit) {
    throw Error(ErrorCode::kInvalidArgument,
                "token id " + std::to_string(id) + " outside embedder range " + std::to_string(limit));
  }
}

}  // namespace

ReferenceHashEmbedder::ReferenceHashEmbedder(std::uint64_t seed, std::size_t dim,
                                             std::size_t vocab_limit)
    : seed_(seed), dim_(dim), vocab_limit_(vocab_limit) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "embedder dimension must be positive");
}

void ReferenceHashEmbedder::embed(TokenId id, std::span<float> out) const {
  check_id(id, vocab_limit_);
  if (out.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "embedder output size");
  std::mt19937_64 rng(splitmix64(seed_ ^ splitmix64(static_cast<std::uint64_t>(id))));
  std::normal_distribution<double> normal;
  double sq = 0.0;
  std::vector<double> v(dim_);
  for (double& x : v) {
    x = normal(rng);
    sq += x * x;
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = static_cast<float>(v[i] * inv);
}

std::string ReferenceHashEmbedder::spec() const {
  return "hash:" + std::to_string(seed_) + ":" + std::to_string(dim_);
}

FileEmbedder::FileEmbedder(std::size_t rows, std::size_t dim, std::vector<float> table)
    : rows_(rows), dim_(dim), table_(std::move(table)), spec_("file:inline") {
  if (table_.size() != rows * dim) throw Error(ErrorCode::kDimensionMismatch, "embedder table size");
}

FileEmbedder::FileEmbedder(const std::filesystem::path& path) {
  FbleMatrix m = load_fble(path);
  rows_ = m.rows;
  dim_ = m.dim;
  table_ = std::move(m.values);
  spec_ = "file:" + path.string();
}

void FileEmbedder::embed(TokenId id, std::span<float> out) const {
  check_id(id, rows_);
  if (out.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "embedder output size");
  std::copy_n(table_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(id) * dim_), dim_,
              out.begin());
}

std::unique_ptr<TokenEmbedder> make_embedder(const std::string& spec, std::uint64_t seed,
                                             std::size_t d_in) {
  if (spec == "hash") return std::make_unique<ReferenceHashEmbedder>(seed, d_in);
  if (spec.starts_with("hash:")) {
    const std::string rest = spec.substr(5);
    const std::size_t colon = rest.find(':');
    std::uint64_t s = 0;
    std::size_t d = d_in;
    try {
      std::size_t used = 0;
      const std::string seed_part = rest.substr(0, colon);
      s = std::stoull(seed_part, &used);
      if (used != seed_part.size()) throw std::invalid_argument(seed_part);
      if (colon != std::string::npos) {
        const std::string dim_part = rest.substr(colon + 1);
        d = std::stoull(dim_part, &used);
        if (used != dim_part.size() || d == 0) throw std::invalid_argument(dim_part);
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidArgument, "malformed embedder spec '" + spec + "'");
    }
    return std::make_unique<ReferenceHashEmbedder>(s, d);
  }
  if (spec.starts_with("file:")) return std::make_unique<FileEmbedder>(spec.substr(5));
  throw Error(ErrorCode::kInvalidArgument, "unknown embedder '" + spec + "'");
}

// ---------------------------------------------------------------------------
// LinearProjection

LinearProjection::LinearProjection(std::size_t d_in, std::size_t d_out, std::vector<float> weights)
    : d_in_(d_in), d_out_(d_out), w_(std::move(weights)) {
  if (w_.size() != d_in * d_out) throw Error(ErrorCode::kDimensionMismatch, "projection size");
  if (d_out > d_in) throw Error(ErrorCode::kInvalidArgument, "projection d_out exceeds d_in");
  for (float v : w_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite projection weight");
  }
}

LinearProjection LinearProjection::identity(std::size_t d) {
  std::vector<float> w(d * d, 0.0f);
  for (std::size_t i = 0; i < d; ++i) w[i * d + i] = 1.0f;
  return {d, d, std::move(w)};
}

LinearProjection LinearProjection::seeded(std::size_t d_in, std::size_t d_out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
  std::uniform_real_distribution<double> uni(-bound, bound);
  std::vector<float> w(d_in * d_out);
  for (float& v : w) v = static_cast<float>(uni(rng));
  return {d_in, d_out, std::move(w)};
}

LinearProjection LinearProjection::from_eigen(const Eigen::MatrixXd& w) {
  std::vector<float> out(static_cast<std::size_t>(w.size()));
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      out[static_cast<std::size_t>(i * w.cols() + j)] = static_cast<float>(w(i, j));
    }
  }
  return {static_cast<std::size_t>(w.rows()), static_cast<std::size_t>(w.cols()), std::move(out)};
}

Eigen::MatrixXd LinearProjection::to_eigen() const {
  Eigen::MatrixXd w(d_in_, d_out_);
  for (std::size_t i = 0; i < d_in_; ++i) {
    for (std::size_t j = 0; j < d_out_; ++j) w(i, j) = w_[i * d_out_ + j];
  }
  return w;
}

void LinearProjection::apply(std::span<const float> x, std::span<float> y) const {
  if (x.size() != d_in_ || y.size() != d_out_) {
    throw Error(ErrorCode::kDimensionMismatch, "projection apply size");
  }
  const auto& k = simd::kernels();
  std::fill(y.begin(), y.end(), 0.0f);
  for (std::size_t i = 0; i < d_in_; ++i) {
    if (x[i] != 0.0f) k.axpy(x[i], w_.data() + i * d_out_, y.data(), d_out_);
  }
}

EmbeddingMatrix embed_sequence(const EncodedSequence& seq, const TokenEmbedder& embedder,
                               const LinearProjection& projection, bool is_query) {
  if (embedder.dim() != projection.d_in()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedder dim " + std::to_string(embedder.dim()) + " != projection d_in " +
                    std::to_string(projection.d_in()));
  }
  EmbeddingMatrix m(seq.real_length, projection.d_out());
  m.set_query(is_query);
  std::vector<float> x(embedder.dim());
  for (std::size_t i = 0; i < seq.real_length; ++i) {
    embedder.embed(seq.ids[i], x);
    projection.apply(x, m.row(i));
  }
  m.normalize_rows();
  return m;
}

TokenTable::TokenTable(const TokenEmbedder& embedder, const LinearProjection& projection,
                       std::size_t vocab_size)
    : dim_(projection.d_out()), size_(vocab_size) {
  if (embedder.dim() != projection.d_in()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedder dim != projection d_in");
  }
  EmbeddingMatrix all(vocab_size, dim_);
  std::vector<float> x(embedder.dim());
  for (std::size_t t = 0; t < vocab_size; ++t) {
    embedder.embed(static_cast<TokenId>(t), x);
    projection.apply(x, all.row(t));
  }
  all.normalize_rows();
  zero_.assign(vocab_size, 0);
  for (std::size_t t = 0; t < vocab_size; ++t) zero_[t] = all.live(t) ? 0 : 1;
  rows_ = all.values();
}

EmbeddingMatrix TokenTable::embed(const EncodedSequence& seq, bool is_query) const {
  EmbeddingMatrix m(seq.real_length, dim_);
  m.set_query(is_query);
  for (std::size_t i = 0; i < seq.real_length; ++i) {
    check_id(seq.ids[i], size_);
    const auto t = static_cast<std::size_t>(seq.ids[i]);
    if (zero_[t]) {
      m.mark_dead(i);
      continue;
    }
    std::copy_n(rows_.begin() + static_cast<std::ptrdiff_t>(t * dim_), dim_, m.row(i).begin());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Triplet objective

double triplet_loss(const EmbeddingMatrix& q, const EmbeddingMatrix& pos,
                    const EmbeddingMatrix& neg, double margin) {
  if (q.dim() != pos.dim() || q.dim() != neg.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "triplet matrices differ in dimension");
  }
  return std::max(0.0, margin - maxsim(q, pos) + maxsim(q, neg));
}

namespace {

// Projected rows Y = normalize(X W); norm 0 marks a dead row.
struct Projected {
  Eigen::MatrixXd y;
  Eigen::VectorXd norm;
};

Projected project(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w) {
  Projected p;
  p.y = x * w;
  p.norm = p.y.rowwise().norm();
  for (Eigen::Index i = 0; i < p.y.rows(); ++i) {
    if (p.norm(i) > 0.0) {
      p.y.row(i) /= p.norm(i);
    } else {
      p.norm(i) = 0.0;
      p.y.row(i).setZero();
    }
  }
  return p;
}

// Sum over query rows of the best doc-row cosine; argmax[i] = -1 for dead
// query rows. Lowest index wins ties.
double late_score(const Projected& p, std::span<const Eigen::Index> q_rows,
                  std::span<const Eigen::Index> d_rows, std::vector<Eigen::Index>* argmax) {
  const bool live_doc = std::any_of(d_rows.begin(), d_rows.end(),
                                    [&](Eigen::Index j) { return p.norm(j) > 0.0; });
  if (!live_doc) return -std::numeric_limits<double>::infinity();
  double total = 0.0;
  if (argmax) argmax->assign(q_rows.size(), -1);
  for (std::size_t i = 0; i < q_rows.size(); ++i) {
    if (p.norm(q_rows[i]) == 0.0) continue;
    double best = -std::numeric_limits<double>::infinity();
    Eigen::Index best_j = -1;
    for (const Eigen::Index j : d_rows) {
      if (p.norm(j) == 0.0) continue;
      const double s = p.y.row(q_rows[i]).dot(p.y.row(j));
      if (s > best) {
        best = s;
        best_j = j;
      }
    }
    total += best;
    if (argmax) (*argmax)[i] = best_j;
  }
  return total;
}

// Adds coeff * d score / d Y into gy.
void score_backward(const Projected& p, std::span<const Eigen::Index> q_rows,
                    const std::vector<Eigen::Index>& argmax, double coeff, Eigen::MatrixXd& gy) {
  for (std::size_t i = 0; i < q_rows.size(); ++i) {
    const Eigen::Index j = argmax[i];
    if (j < 0) continue;
    gy.row(q_rows[i]) += coeff * p.y.row(j);
    gy.row(j) += coeff * p.y.row(q_rows[i]);
  }
}

// d/dU of normalize(U) applied row-wise, then chained through U = X W.
Eigen::MatrixXd backprop_to_w(const Projected& p, const Eigen::MatrixXd& x, Eigen::MatrixXd gy) {
  for (Eigen::Index i = 0; i < gy.rows(); ++i) {
    if (p.norm(i) == 0.0) {
      gy.row(i).setZero();
      continue;
    }
    const double radial = gy.row(i).dot(p.y.row(i));
    gy.row(i) = (gy.row(i) - radial * p.y.row(i)) / p.norm(i);
  }
  return x.transpose() * gy;
}

struct RowRanges {
  std::vector<Eigen::Index> q, pos, neg;
};

RowRanges stacked_ranges(const TripletInputs& t) {
  RowRanges r;
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < t.query.rows(); ++i) r.q.push_back(at++);
  for (Eigen::Index i = 0; i < t.positive.rows(); ++i) r.pos.push_back(at++);
  for (Eigen::Index i = 0; i < t.negative.rows(); ++i) r.neg.push_back(at++);
  return r;
}

Eigen::MatrixXd stack(const TripletInputs& t) {
  Eigen::MatrixXd x(t.query.rows() + t.positive.rows() + t.negative.rows(), t.query.cols());
  x << t.query, t.positive, t.negative;
  return x;
}

void check_inputs(const TripletInputs& t, const Eigen::MatrixXd& w) {
  if (t.query.cols() != w.rows() || t.positive.cols() != w.rows() ||
      t.negative.cols() != w.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "triplet inputs do not match projection d_in");
  }
}

}  // namespace

double triplet_loss(const TripletInputs& t, const Eigen::MatrixXd& w, double margin) {
  check_inputs(t, w);
  const Projected p = project(stack(t), w);
  const RowRanges r = stacked_ranges(t);
  const double sp = late_score(p, r.q, r.pos, nullptr);
  const double sn = late_score(p, r.q, r.neg, nullptr);
  return std::max(0.0, margin - sp + sn);
}

Eigen::MatrixXd gradient_of_loss(const TripletInputs& t, const Eigen::MatrixXd& w, double margin) {
  check_inputs(t, w);
  const Eigen::MatrixXd x = stack(t);
  const Projected p = project(x, w);
  const RowRanges r = stacked_ranges(t);
  std::vector<Eigen::Index> arg_pos, arg_neg;
  const double sp = late_score(p, r.q, r.pos, &arg_pos);
  const double sn = late_score(p, r.q, r.neg, &arg_neg);
  if (margin - sp + sn <= 0.0) return Eigen::MatrixXd::Zero(w.rows(), w.cols());
  Eigen::MatrixXd gy = Eigen::MatrixXd::Zero(x.rows(), w.cols());
  score_backward(p, r.q, arg_pos, -1.0, gy);
  score_backward(p, r.q, arg_neg, +1.0, gy);
  return backprop_to_w(p, x, std::move(gy));
}

// ---------------------------------------------------------------------------
// Training

namespace {

// Every token id used by the training set gets one row of X; sequences are
// stored as row indices into X so shared tokens are projected once.
struct TokenRows {
  Eigen::MatrixXd x;
  std::unordered_map<std::string, std::vector<Eigen::Index>> queries;
  std::unordered_map<std::string, std::vector<Eigen::Index>> documents;
};

TokenRows collect_rows(std::span<const Triplet> triplets, const TrainingSet& data,
                       const TokenEmbedder& embedder) {
  TokenRows out;
  std::unordered_map<TokenId, Eigen::Index> row_of;
  std::vector<TokenId> order;
  auto rows_for = [&](const EncodedSequence& seq) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < seq.real_length; ++i) {
      auto [it, inserted] = row_of.try_emplace(seq.ids[i], static_cast<Eigen::Index>(order.size()));
      if (inserted) order.push_back(seq.ids[i]);
      rows.push_back(it->second);
    }
    return rows;
  };
  auto need = [&](const auto& map, const std::string& key, const char* what) -> const EncodedSequence& {
    auto it = map.find(key);
    if (it == map.end()) {
      throw Error(ErrorCode::kInvalidArgument, std::string("training set lacks ") + what + " " + key);
    }
    return it->second;
  };
  for (const Triplet& t : triplets) {
    if (!out.queries.contains(t.bug_id)) {
      out.queries.emplace(t.bug_id, rows_for(need(data.queries, t.bug_id, "query")));
    }
    for (const std::string* doc : {&t.positive_doc, &t.negative_doc}) {
      if (!out.documents.contains(*doc)) {
        out.documents.emplace(*doc, rows_for(need(data.documents, *doc, "document")));
      }
    }
  }
  out.x.resize(static_cast<Eigen::Index>(order.size()), static_cast<Eigen::Index>(embedder.dim()));
  std::vector<float> buf(embedder.dim());
  for (std::size_t r = 0; r < order.size(); ++r) {
    embedder.embed(order[r], buf);
    for (std::size_t c = 0; c < buf.size(); ++c) {
      out.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = buf[c];
    }
  }
  return out;
}

double mean_loss(const TokenRows& rows, std::span<const Triplet> triplets,
                 const Eigen::MatrixXd& w, double margin) {
  const Projected p = project(rows.x, w);
  double sum = 0.0;
  for (const Triplet& t : triplets) {
    const auto& q = rows.queries.at(t.bug_id);
    const double sp = late_score(p, q, rows.documents.at(t.positive_doc), nullptr);
    const double sn = late_score(p, q, rows.documents.at(t.negative_doc), nullptr);
    sum += std::max(0.0, margin - sp + sn);
  }
  return sum / static_cast<double>(triplets.size());
}

}  // namespace

TrainResult train_projection(std::span<const Triplet> triplets, const TrainingSet& data,
                             const TokenEmbedder& embedder, const TripletTrainConfig& cfg) {
  if (triplets.empty()) throw Error(ErrorCode::kInvalidArgument, "no training triplets");
  if (!(cfg.margin > 0.0) || !(cfg.learning_rate > 0.0) || cfg.batch_size == 0 || cfg.d_out == 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid training configuration");
  }
  const TokenRows rows = collect_rows(triplets, data, embedder);
  Eigen::MatrixXd w = LinearProjection::seeded(embedder.dim(), cfg.d_out, cfg.seed).to_eigen();

  TrainResult result;
  result.epoch_loss.push_back(mean_loss(rows, triplets, w, cfg.margin));

  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed ^ 0x5DEECE66DULL);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const Projected p = project(rows.x, w);
      Eigen::MatrixXd gy = Eigen::MatrixXd::Zero(p.y.rows(), p.y.cols());
      double batch_sum = 0.0;
      std::vector<Eigen::Index> arg_pos, arg_neg;
      for (std::size_t b = start; b < end; ++b) {
        const Triplet& t = triplets[order[b]];
        const auto& q = rows.queries.at(t.bug_id);
        const double sp = late_score(p, q, rows.documents.at(t.positive_doc), &arg_pos);
        const double sn = late_score(p, q, rows.documents.at(t.negative_doc), &arg_neg);
        const double loss = std::max(0.0, cfg.margin - sp + sn);
        if (!std::isfinite(loss)) {
          std::ostringstream msg;
          msg << "loss " << loss << " at epoch " << epoch << " batch " << start / cfg.batch_size
              << " triplet (" << t.bug_id << ", " << t.positive_doc << ", " << t.negative_doc << ")";
          throw Error(ErrorCode::kNonFiniteLoss, msg.str());
        }
        batch_sum += loss;
        if (loss > 0.0) {
          score_backward(p, q, arg_pos, -1.0, gy);
          score_backward(p, q, arg_neg, +1.0, gy);
        }
      }
      const double n = static_cast<double>(end - start);
      result.batch_loss.push_back(batch_sum / n);
      const Eigen::MatrixXd grad = backprop_to_w(p, rows.x, std::move(gy)) / n;
      w -= cfg.learning_rate * grad;
      if (!w.allFinite()) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "projection diverged at epoch " + std::to_string(epoch));
      }
    }
    result.epoch_loss.push_back(mean_loss(rows, triplets, w, cfg.margin));
  }
  result.projection = LinearProjection::from_eigen(w);
  return result;
}

// ---------------------------------------------------------------------------
// FBLE files

void write_fble(std::ostream& out, const FbleMatrix& m) {
  io::Writer w(out);
  w.magic("FBLE");
  w.u32(1);
  w.u32(m.rows);
  w.u32(m.dim);
  w.f32s(m.values);
}

FbleMatrix read_fble(std::istream& in, const std::string& name) {
  io::Reader r(in, name);
  r.expect_magic("FBLE");
  const std::uint32_t version = r.u32();
  if (version != 1) r.fail("unsupported FBLE version " + std::to_string(version));
  FbleMatrix m;
  m.rows = r.u32();
  m.dim = r.u32();
  r.check_count(static_cast<std::uint64_t>(m.rows) * m.dim, std::uint64_t{1} << 34, "value");
  m.values.resize(static_cast<std::size_t>(m.rows) * m.dim);
  r.f32s(m.values);
  return m;
}

void save_fble(const std::filesystem::path& path, const FbleMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_fble(out, m);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

FbleMatrix load_fble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  FbleMatrix m = read_fble(in, path.string());
  io::Reader(in, path.string()).expect_end();
  return m;
}

void save_projection(const std::filesystem::path& path, const LinearProjection& p) {
  save_fble(path, {static_cast<std::uint32_t>(p.d_in()), static_cast<std::uint32_t>(p.d_out()),
                   p.weights()});
}

LinearProjection load_projection(const std::filesystem::path& path) {
  FbleMatrix m = load_fble(path);
  return {m.rows, m.dim, std::move(m.values)};
}

}  // namespace fbl
