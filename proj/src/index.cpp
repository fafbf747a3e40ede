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
#include "fbl/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_set>

#include "fbl/binary_io.hpp"
#include "fbl/error.hpp"
#include "fbl/simd/kernels.hpp"

namespace fbl {

// ---------------------------------------------------------------------------
// DocMatrices

void DocMatrices::add(std::string doc_id, EmbeddingMatrix m) {
  if (lookup_.contains(doc_id)) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate document " + doc_id);
  }
  if (!m.empty()) {
    if (dim_ == 0) dim_ = m.dim();
    if (m.dim() != dim_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "document " + doc_id + " has dim " + std::to_string(m.dim()) +
                      ", expected " + std::to_string(dim_));
    }
  }
  lookup_.emplace(doc_id, ids_.size());
  ids_.push_back(std::move(doc_id));
  mats_.push_back(std::move(m));
}

std::size_t DocMatrices::total_rows() const {
  std::size_t n = 0;
  for (const auto& m : mats_) n += m.live_rows();
  return n;
}

std::optional<std::size_t> DocMatrices::find(std::string_view doc_id) const {
  auto it = lookup_.find(std::string(doc_id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// k-means

namespace {

double exact_l2(const float* a, const float* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double t = static_cast<double>(a[i]) - b[i];
    s += t * t;
  }
  return s;
}

// Nearest-centroid search vectorized across centroids:
//   |x - c|^2 - |x|^2 = |c|^2 - 2 <x, c>
// with centroids stored transposed so each input coordinate is one axpy.
class Assigner {
 public:
  Assigner(std::span<const float> centroids, std::size_t k, std::size_t dim)
      : k_(k), dim_(dim), transposed_(k * dim), norms_(k), scratch_(k) {
    for (std::size_t c = 0; c < k; ++c) {
      double n = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const float v = centroids[c * dim + j];
        transposed_[j * k + c] = v;
        n += static_cast<double>(v) * v;
      }
      norms_[c] = static_cast<float>(n);
    }
  }

  std::uint32_t nearest(const float* x) {
    if (k_ == 1) return 0;
    const auto& kern = simd::kernels();
    std::copy(norms_.begin(), norms_.end(), scratch_.begin());
    for (std::size_t j = 0; j < dim_; ++j) {
      if (x[j] != 0.0f) kern.axpy(-2.0f * x[j], transposed_.data() + j * k_, scratch_.data(), k_);
    }
    return static_cast<std::uint32_t>(kern.argmin(scratch_.data(), k_));
  }

 private:
  std::size_t k_;
  std::size_t dim_;
  std::vector<float> transposed_;
  std::vector<float> norms_;
  std::vector<float> scratch_;
};

double mean_distortion(std::span<const float> points, std::size_t dim,
                       const std::vector<float>& centroids, const std::vector<std::uint32_t>& assign) {
  const std::size_t n = assign.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += exact_l2(points.data() + i * dim, centroids.data() + assign[i] * dim, dim);
  }
  return total / static_cast<double>(n);
}

std::vector<float> kmeanspp_init(std::span<const float> points, std::size_t n, std::size_t dim,
                                 std::size_t k, std::mt19937_64& rng) {
  std::vector<float> centroids(k * dim);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t next = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  std::size_t fallback = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::copy_n(points.begin() + static_cast<std::ptrdiff_t>(next * dim), dim,
                centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
    if (c + 1 == k) break;
    double total = 0.0;
    const float* cen = centroids.data() + c * dim;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], exact_l2(points.data() + i * dim, cen, dim));
      total += d2[i];
    }
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      next = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        r -= d2[i];
        if (r < 0.0 && d2[i] > 0.0) {
          next = i;
          break;
        }
      }
      if (d2[next] == 0.0) {
        // Rounding pushed past the end; take the last point with mass.
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            next = i;
            break;
          }
        }
      }
    } else {
      // Fewer distinct points than centroids: reuse points in order.
      next = fallback++ % n;
    }
  }
  return centroids;
}

}  // namespace

std::uint32_t nearest_centroid(std::span<const float> x, std::span<const float> centroids,
                               std::size_t k) {
  Assigner a(centroids, k, x.size());
  return a.nearest(x.data());
}

KMeansResult kmeans(std::span<const float> points, std::size_t dim, std::size_t k,
                    std::uint64_t seed, std::size_t max_iters) {
  if (dim == 0 || points.empty() || points.size() % dim != 0) {
    throw Error(ErrorCode::kInvalidArgument, "kmeans needs at least one point of positive dimension");
  }
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "kmeans needs k >= 1");
  const std::size_t n = points.size() / dim;

  KMeansResult res;
  res.k = k;
  res.dim = dim;

  if (k >= n) {
    // Distinct points first, then pad by cycling through them.
    std::vector<std::size_t> uniq;
    for (std::size_t i = 0; i < n; ++i) {
      const bool seen = std::any_of(uniq.begin(), uniq.end(), [&](std::size_t u) {
        return std::equal(points.begin() + static_cast<std::ptrdiff_t>(u * dim),
                          points.begin() + static_cast<std::ptrdiff_t>((u + 1) * dim),
                          points.begin() + static_cast<std::ptrdiff_t>(i * dim));
      });
      if (!seen) uniq.push_back(i);
    }
    res.centroids.resize(k * dim);
    for (std::size_t c = 0; c < k; ++c) {
      std::copy_n(points.begin() + static_cast<std::ptrdiff_t>(uniq[c % uniq.size()] * dim), dim,
                  res.centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
    }
    res.assign.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dist = exact_l2(points.data() + i * dim, res.centroids.data() + c * dim, dim);
        if (dist < best) {
          best = dist;
          res.assign[i] = static_cast<std::uint32_t>(c);
        }
      }
    }
    res.distortion.push_back(mean_distortion(points, dim, res.centroids, res.assign));
    return res;
  }

  std::mt19937_64 rng(seed);
  res.centroids = kmeanspp_init(points, n, dim, k, rng);
  res.assign.assign(n, 0);

  // Assignment step. A point only moves when the exact (double) distance
  // strictly improves, which keeps the distortion trace monotone.
  auto assign_step = [&](bool first) {
    Assigner a(res.centroids, k, dim);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const float* x = points.data() + i * dim;
      const std::uint32_t cand = a.nearest(x);
      if (first) {
        res.assign[i] = cand;
        continue;
      }
      const std::uint32_t cur = res.assign[i];
      if (cand == cur) continue;
      const double d_new = exact_l2(x, res.centroids.data() + cand * dim, dim);
      const double d_cur = exact_l2(x, res.centroids.data() + cur * dim, dim);
      if (d_new < d_cur) {
        res.assign[i] = cand;
        ++changed;
      }
    }
    return changed;
  };

  assign_step(true);
  res.distortion.push_back(mean_distortion(points, dim, res.centroids, res.assign));

  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  for (std::size_t it = 0; it < max_iters; ++it) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t c = res.assign[i];
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += points[i * dim + j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        res.centroids[c * dim + j] = static_cast<float>(sums[c * dim + j] / static_cast<double>(counts[c]));
      }
    }
    // Re-seed empty clusters with the points farthest from their centroids.
    std::vector<std::size_t> empty;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) empty.push_back(c);
    }
    if (!empty.empty()) {
      std::vector<std::pair<double, std::size_t>> far(n);
      for (std::size_t i = 0; i < n; ++i) {
        far[i] = {exact_l2(points.data() + i * dim, res.centroids.data() + res.assign[i] * dim, dim), i};
      }
      const std::size_t take = std::min(empty.size(), n);
      std::partial_sort(far.begin(), far.begin() + static_cast<std::ptrdiff_t>(take), far.end(),
                        [](const auto& a, const auto& b) {
                          return a.first > b.first || (a.first == b.first && a.second < b.second);
                        });
      for (std::size_t e = 0; e < take; ++e) {
        std::copy_n(points.begin() + static_cast<std::ptrdiff_t>(far[e].second * dim), dim,
                    res.centroids.begin() + static_cast<std::ptrdiff_t>(empty[e] * dim));
      }
    }
    const std::size_t changed = assign_step(false);
    res.distortion.push_back(mean_distortion(points, dim, res.centroids, res.assign));
    res.iterations = it + 1;
    if (changed == 0) break;
  }
  return res;
}

// ---------------------------------------------------------------------------
// IvfPqIndex

namespace {

bool hit_before(const SearchHit& a, const SearchHit& b) {
  return a.score > b.score || (a.score == b.score && a.embedding_id < b.embedding_id);
}

// Keeps the best `topk` hits seen so far; the heap top is the worst kept.
class TopHits {
 public:
  explicit TopHits(std::size_t topk) : topk_(topk) {}

  void offer(std::uint64_t id, float score) {
    if (topk_ == 0) return;
    const SearchHit h{id, score};
    if (heap_.size() < topk_) {
      heap_.push_back(h);
      std::push_heap(heap_.begin(), heap_.end(), hit_before);
    } else if (hit_before(h, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), hit_before);
      heap_.back() = h;
      std::push_heap(heap_.begin(), heap_.end(), hit_before);
    }
  }

  std::vector<SearchHit> take() {
    std::sort_heap(heap_.begin(), heap_.end(), hit_before);
    return std::move(heap_);
  }

 private:
  std::size_t topk_;
  std::vector<SearchHit> heap_;
};

}  // namespace

IvfPqIndex IvfPqIndex::build(const DocMatrices& docs, const IvfPqParams& params) {
  const std::size_t d = docs.dim();
  if (params.partitions == 0 || params.subspaces == 0) {
    throw Error(ErrorCode::kInvalidArgument, "partitions and subspaces must be >= 1");
  }
  if (params.codewords == 0 || params.codewords > 256) {
    throw Error(ErrorCode::kInvalidArgument, "codewords must be in [1, 256]");
  }
  const std::size_t total = docs.total_rows();
  if (total < params.partitions || d == 0) {
    throw Error(ErrorCode::kInsufficientData,
                std::to_string(total) + " embeddings for " + std::to_string(params.partitions) +
                    " partitions");
  }
  if (d % params.subspaces != 0) {
    throw Error(ErrorCode::kInvalidArgument, "subspaces must divide the embedding dimension");
  }

  IvfPqIndex idx;
  idx.p_ = params.partitions;
  idx.m_ = params.subspaces;
  idx.k_ = params.codewords;
  idx.d_ = static_cast<std::uint32_t>(d);
  idx.doc_ids_ = docs.ids();

  std::vector<float> rows;
  rows.reserve(total * d);
  idx.registry_.reserve(total);
  for (std::size_t di = 0; di < docs.size(); ++di) {
    const EmbeddingMatrix& m = docs.matrix(di);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (!m.live(r)) continue;
      const auto row = m.row(r);
      rows.insert(rows.end(), row.begin(), row.end());
      idx.registry_.push_back({static_cast<std::uint32_t>(di), static_cast<std::uint32_t>(r)});
    }
  }

  // Training sample.
  std::vector<float> train;
  if (total > params.max_train_rows) {
    std::vector<std::size_t> all(total);
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::size_t> pick;
    std::mt19937_64 rng(params.seed ^ 0xA5A5A5A5ULL);
    std::sample(all.begin(), all.end(), std::back_inserter(pick), params.max_train_rows, rng);
    train.reserve(pick.size() * d);
    for (std::size_t i : pick) {
      train.insert(train.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * d),
                   rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
    }
  } else {
    train = rows;
  }
  const std::size_t n_train = train.size() / d;

  KMeansResult coarse = kmeans(train, d, idx.p_, params.seed, params.kmeans_iters);
  idx.centroids_ = std::move(coarse.centroids);

  Assigner coarse_assigner(idx.centroids_, idx.p_, d);
  std::vector<float> residuals(train.size());
  for (std::size_t i = 0; i < n_train; ++i) {
    const std::uint32_t c = coarse_assigner.nearest(train.data() + i * d);
    for (std::size_t j = 0; j < d; ++j) {
      residuals[i * d + j] = train[i * d + j] - idx.centroids_[c * d + j];
    }
  }

  const std::size_t ds = d / idx.m_;
  idx.codebooks_.resize(static_cast<std::size_t>(idx.m_) * idx.k_ * ds);
  std::vector<float> sub(n_train * ds);
  for (std::uint32_t m = 0; m < idx.m_; ++m) {
    for (std::size_t i = 0; i < n_train; ++i) {
      std::copy_n(residuals.begin() + static_cast<std::ptrdiff_t>(i * d + m * ds), ds,
                  sub.begin() + static_cast<std::ptrdiff_t>(i * ds));
    }
    const KMeansResult cb = kmeans(sub, ds, idx.k_, params.seed + 1 + m, params.kmeans_iters);
    std::copy(cb.centroids.begin(), cb.centroids.end(),
              idx.codebooks_.begin() + static_cast<std::ptrdiff_t>(m * idx.k_ * ds));
  }

  std::vector<Assigner> sub_assigners;
  for (std::uint32_t m = 0; m < idx.m_; ++m) {
    sub_assigners.emplace_back(
        std::span<const float>(idx.codebooks_.data() + static_cast<std::size_t>(m) * idx.k_ * ds,
                               static_cast<std::size_t>(idx.k_) * ds),
        idx.k_, ds);
  }
  idx.list_ids_.assign(idx.p_, {});
  idx.list_codes_.assign(idx.p_, {});
  std::vector<std::uint8_t> code(idx.m_);
  std::vector<float> resid(d);
  for (std::size_t e = 0; e < total; ++e) {
    const float* x = rows.data() + e * d;
    const std::uint32_t p = coarse_assigner.nearest(x);
    for (std::size_t j = 0; j < d; ++j) resid[j] = x[j] - idx.centroids_[p * d + j];
    for (std::uint32_t m = 0; m < idx.m_; ++m) {
      code[m] = static_cast<std::uint8_t>(sub_assigners[m].nearest(resid.data() + m * ds));
    }
    idx.list_ids_[p].push_back(e);
    idx.list_codes_[p].insert(idx.list_codes_[p].end(), code.begin(), code.end());
  }
  idx.rebuild_locator();
  return idx;
}

void IvfPqIndex::rebuild_locator() {
  partition_of_.assign(registry_.size(), 0);
  for (std::uint32_t p = 0; p < list_ids_.size(); ++p) {
    for (std::uint64_t id : list_ids_[p]) partition_of_[id] = p;
  }
}

std::uint32_t IvfPqIndex::partition_of(std::uint64_t embedding_id) const {
  return partition_of_.at(embedding_id);
}

std::vector<float> IvfPqIndex::reconstruct(std::uint64_t embedding_id) const {
  const std::uint32_t p = partition_of(embedding_id);
  const auto& ids = list_ids_[p];
  const auto pos = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), embedding_id) - ids.begin());
  const std::uint8_t* code = list_codes_[p].data() + pos * m_;
  const std::size_t ds = d_ / m_;
  std::vector<float> out(centroids_.begin() + static_cast<std::ptrdiff_t>(p * d_),
                         centroids_.begin() + static_cast<std::ptrdiff_t>((p + 1) * d_));
  for (std::uint32_t m = 0; m < m_; ++m) {
    const float* cw = codebooks_.data() + (static_cast<std::size_t>(m) * k_ + code[m]) * ds;
    for (std::size_t j = 0; j < ds; ++j) out[m * ds + j] += cw[j];
  }
  return out;
}

std::vector<std::uint32_t> IvfPqIndex::probe_order(std::span<const float> q, std::size_t nprobe) const {
  const auto& kern = simd::kernels();
  std::vector<std::pair<float, std::uint32_t>> dist(p_);
  for (std::uint32_t p = 0; p < p_; ++p) {
    dist[p] = {kern.l2_sqr(q.data(), centroids_.data() + static_cast<std::size_t>(p) * d_, d_), p};
  }
  nprobe = std::min<std::size_t>(nprobe, p_);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(nprobe), dist.end());
  std::vector<std::uint32_t> out(nprobe);
  for (std::size_t i = 0; i < nprobe; ++i) out[i] = dist[i].second;
  return out;
}

std::vector<SearchHit> IvfPqIndex::search(std::span<const float> q, std::size_t nprobe,
                                          std::size_t topk) const {
  if (registry_.empty()) throw Error(ErrorCode::kEmptyIndex, "search on an empty index");
  if (q.size() != d_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query dim " + std::to_string(q.size()) + " != index dim " + std::to_string(d_));
  }
  if (nprobe < 1 || nprobe > p_) {
    throw Error(ErrorCode::kInvalidArgument, "nprobe must be in [1, " + std::to_string(p_) + "]");
  }
  const auto& kern = simd::kernels();
  const std::size_t ds = d_ / m_;

  // Inner product decomposes over subspaces, so one table serves every list.
  std::vector<float> table(static_cast<std::size_t>(m_) * k_);
  for (std::uint32_t m = 0; m < m_; ++m) {
    kern.dot_many(q.data() + m * ds, codebooks_.data() + static_cast<std::size_t>(m) * k_ * ds, k_,
                  ds, table.data() + static_cast<std::size_t>(m) * k_);
  }

  TopHits top(topk);
  std::vector<float> scores;
  for (const std::uint32_t p : probe_order(q, nprobe)) {
    const auto& ids = list_ids_[p];
    if (ids.empty()) continue;
    const float bias = kern.dot(q.data(), centroids_.data() + static_cast<std::size_t>(p) * d_, d_);
    scores.resize(ids.size());
    kern.adc_scan(table.data(), m_, k_, list_codes_[p].data(), ids.size(), bias, scores.data());
    for (std::size_t i = 0; i < ids.size(); ++i) top.offer(ids[i], scores[i]);
  }
  return top.take();
}

std::vector<std::string> IvfPqIndex::candidate_docs(const EmbeddingMatrix& query,
                                                    std::size_t n_prime, std::size_t nprobe) const {
  if (registry_.empty()) throw Error(ErrorCode::kEmptyIndex, "candidate search on an empty index");
  const std::size_t live = query.live_rows();
  if (live == 0) throw Error(ErrorCode::kInvalidArgument, "query matrix has no rows");
  const std::size_t per_row = n_prime / live + (n_prime % live != 0 ? 1 : 0);

  std::vector<SearchHit> all;
  for (std::size_t r = 0; r < query.rows(); ++r) {
    if (!query.live(r)) continue;
    auto hits = search(query.row(r), nprobe, per_row);
    all.insert(all.end(), hits.begin(), hits.end());
  }
  std::stable_sort(all.begin(), all.end(), hit_before);

  std::vector<std::string> out;
  std::vector<std::uint8_t> seen(doc_ids_.size(), 0);
  for (const SearchHit& h : all) {
    const std::uint32_t doc = registry_[h.embedding_id].doc_index;
    if (seen[doc]) continue;
    seen[doc] = 1;
    out.push_back(doc_ids_[doc]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// FBLI serialization

void IvfPqIndex::write(std::ostream& out) const {
  io::Writer w(out);
  w.magic("FBLI");
  w.u32(1);
  w.u32(p_);
  w.u32(m_);
  w.u32(k_);
  w.u32(d_);
  w.f32s(centroids_);
  w.f32s(codebooks_);
  for (std::uint32_t p = 0; p < p_; ++p) {
    const auto& ids = list_ids_[p];
    w.u64(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      w.u64(ids[i]);
      w.bytes({list_codes_[p].data() + i * m_, m_});
    }
  }
  w.u64(registry_.size());
  for (std::uint64_t e = 0; e < registry_.size(); ++e) {
    w.u64(e);
    w.u32(registry_[e].doc_index);
    w.u32(registry_[e].token_position);
  }
  w.u64(doc_ids_.size());
  for (const std::string& s : doc_ids_) w.str(s);
}

IvfPqIndex IvfPqIndex::read(std::istream& in, const std::string& name) {
  io::Reader r(in, name);
  r.expect_magic("FBLI");
  const std::uint32_t version = r.u32();
  if (version != 1) r.fail("unsupported FBLI version " + std::to_string(version));
  IvfPqIndex idx;
  idx.p_ = r.u32();
  idx.m_ = r.u32();
  idx.k_ = r.u32();
  idx.d_ = r.u32();
  if (idx.p_ == 0 || idx.m_ == 0 || idx.k_ == 0 || idx.k_ > 256 || idx.d_ == 0 ||
      idx.d_ % idx.m_ != 0 || idx.p_ > (1u << 24) || idx.d_ > (1u << 16)) {
    r.fail("invalid index header");
  }
  idx.centroids_.resize(static_cast<std::size_t>(idx.p_) * idx.d_);
  r.f32s(idx.centroids_);
  idx.codebooks_.resize(static_cast<std::size_t>(idx.k_) * idx.d_);
  r.f32s(idx.codebooks_);
  idx.list_ids_.assign(idx.p_, {});
  idx.list_codes_.assign(idx.p_, {});
  constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 36;
  std::uint64_t listed = 0;
  for (std::uint32_t p = 0; p < idx.p_; ++p) {
    const std::uint64_t n = r.u64();
    r.check_count(n, kMaxEntries, "list entry");
    listed += n;
    idx.list_ids_[p].resize(n);
    idx.list_codes_[p].resize(n * idx.m_);
    for (std::uint64_t i = 0; i < n; ++i) {
      idx.list_ids_[p][i] = r.u64();
      r.bytes({idx.list_codes_[p].data() + i * idx.m_, idx.m_});
    }
  }
  const std::uint64_t n_reg = r.u64();
  if (n_reg != listed) r.fail("registry size does not match inverted lists");
  idx.registry_.resize(n_reg);
  for (std::uint64_t e = 0; e < n_reg; ++e) {
    if (r.u64() != e) r.fail("registry entries out of order");
    idx.registry_[e].doc_index = r.u32();
    idx.registry_[e].token_position = r.u32();
  }
  const std::uint64_t n_docs = r.u64();
  r.check_count(n_docs, kMaxEntries, "document");
  idx.doc_ids_.resize(n_docs);
  for (auto& s : idx.doc_ids_) s = r.str();

  std::vector<std::uint8_t> seen(n_reg, 0);
  for (const auto& ids : idx.list_ids_) {
    for (std::uint64_t id : ids) {
      if (id >= n_reg || seen[id]) r.fail("inverted lists are not a partition of the registry");
      seen[id] = 1;
    }
  }
  for (const auto& e : idx.registry_) {
    if (e.doc_index >= n_docs) r.fail("registry references unknown document");
  }
  for (std::uint32_t p = 0; p < idx.p_; ++p) {
    for (std::uint8_t c : idx.list_codes_[p]) {
      if (c >= idx.k_) r.fail("code out of codebook range");
    }
  }
  idx.rebuild_locator();
  return idx;
}

void IvfPqIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write(out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

IvfPqIndex IvfPqIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  IvfPqIndex idx = read(in, path.string());
  io::Reader(in, path.string()).expect_end();
  return idx;
}

}  // namespace fbl
