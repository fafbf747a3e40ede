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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fbl/embed.hpp"
#include "fbl/error.hpp"
#include "fbl/retrieve.hpp"
#include "support/synthetic.hpp"

namespace fbl {
namespace {

namespace fs = std::filesystem;

EncodedSequence seq_of(std::vector<TokenId> real, std::size_t limit, TokenId pad) {
  EncodedSequence s;
  s.real_length = real.size();
  s.limit = limit;
  s.ids = std::move(real);
  s.ids.resize(limit, pad);
  return s;
}

double row_norm(std::span<const float> r) {
  double s = 0.0;
  for (float v : r) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

TEST(EmbedSequence, IdentityProjectionKeepsEmbedderVectors) {
  const ReferenceHashEmbedder e(3, 16);
  const auto seq = seq_of({5, 9, 2}, 6, 0);
  const EmbeddingMatrix m = embed_sequence(seq, e, LinearProjection::identity(16));
  ASSERT_EQ(m.rows(), 3u);
  std::vector<float> v(16);
  for (std::size_t i = 0; i < 3; ++i) {
    e.embed(seq.ids[i], v);
    for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(m.row(i)[j], v[j], 1e-6);
  }
}

TEST(EmbedSequence, RowsAreUnitNorm) {
  const ReferenceHashEmbedder e(1, 64);
  const auto proj = LinearProjection::seeded(64, 24, 9);
  std::vector<TokenId> ids;
  for (TokenId t = 0; t < 40; ++t) ids.push_back(t * 7 + 1);
  const EmbeddingMatrix m = embed_sequence(seq_of(ids, 48, 0), e, proj);
  for (std::size_t i = 0; i < m.rows(); ++i) EXPECT_NEAR(row_norm(m.row(i)), 1.0, 1e-6);
}

TEST(EmbedSequence, PadRowsDropped) {
  const ReferenceHashEmbedder e(1, 8);
  const EmbeddingMatrix m = embed_sequence(seq_of({1, 2, 3, 4, 5}, 8, 0), e, LinearProjection::identity(8));
  EXPECT_EQ(m.rows(), 5u);
}

TEST(EmbedSequence, DimensionMismatch) {
  const ReferenceHashEmbedder e(1, 8);
  try {
    embed_sequence(seq_of({1}, 4, 0), e, LinearProjection::identity(6));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(EmbedSequence, ZeroProjectionRowsAreDead) {
  const FileEmbedder e(3, 2, {1.0f, 0.0f, 0.0f, 0.0f, 0.0f, 1.0f});
  const EmbeddingMatrix m = embed_sequence(seq_of({0, 1, 2}, 3, 99), e, LinearProjection::identity(2));
  EXPECT_EQ(m.rows(), 3u);
  EXPECT_FALSE(m.live(1));
  EXPECT_EQ(m.live_rows(), 2u);
}

TEST(EmbedSequence, Deterministic) {
  const ReferenceHashEmbedder a(7, 32), b(7, 32);
  const auto p = LinearProjection::seeded(32, 8, 1);
  const auto s = seq_of({3, 1, 4, 1, 5}, 8, 0);
  EXPECT_EQ(embed_sequence(s, a, p), embed_sequence(s, b, p));
}

TEST(EmbedSequence, MaxSimInvariantToEmbedderScale) {
  std::mt19937_64 rng(4);
  const auto table = testing::random_unit_rows(rng, 20, 12);
  std::vector<float> scaled = table;
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] *= static_cast<float>(0.5 + (i / 12) % 3);
  const FileEmbedder a(20, 12, table), b(20, 12, scaled);
  const auto p = LinearProjection::seeded(12, 6, 2);
  const auto q = seq_of({1, 2, 3}, 3, 0), d = seq_of({4, 2, 9, 17}, 4, 0);
  EXPECT_NEAR(maxsim(embed_sequence(q, a, p), embed_sequence(d, a, p)),
              maxsim(embed_sequence(q, b, p), embed_sequence(d, b, p)), 1e-5);
}

TEST(TokenTable, MatchesEmbedSequence) {
  const ReferenceHashEmbedder e(5, 32);
  const auto p = LinearProjection::seeded(32, 16, 3);
  const TokenTable t(e, p, 100);
  const auto s = seq_of({0, 17, 99, 42}, 6, 0);
  const EmbeddingMatrix a = t.embed(s), b = embed_sequence(s, e, p);
  ASSERT_EQ(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(a.row(i)[j], b.row(i)[j], 1e-6);
  }
}

TEST(HashEmbedder, UnitVectorsStablePerId) {
  const ReferenceHashEmbedder e(11, 48);
  std::vector<float> a(48), b(48);
  e.embed(123, a);
  e.embed(123, b);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(row_norm(a), 1.0, 1e-6);
  e.embed(124, b);
  EXPECT_NE(a, b);
  EXPECT_EQ(e.spec(), "hash:11:48");
  EXPECT_EQ(make_embedder(e.spec(), 0, 0)->spec(), e.spec());
  EXPECT_THROW(make_embedder("hash:x", 0, 8), Error);
}

TEST(Projection, Validation) {
  EXPECT_THROW(LinearProjection(2, 3, std::vector<float>(6, 0.1f)), Error);  // d_out > d_in
  EXPECT_THROW(LinearProjection(2, 2, std::vector<float>(3, 0.1f)), Error);
  EXPECT_THROW(LinearProjection(1, 1, {NAN}), Error);
  const auto p = LinearProjection::seeded(50, 10, 4);
  const double bound = 1.0 / std::sqrt(50.0);
  for (float w : p.weights()) EXPECT_LE(std::fabs(w), bound);
  EXPECT_EQ(p, LinearProjection::seeded(50, 10, 4));
}

EmbeddingMatrix rows_of(std::vector<std::vector<float>> rows) {
  const std::size_t d = rows.front().size();
  std::vector<float> flat;
  for (auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return EmbeddingMatrix(rows.size(), d, std::move(flat));
}

TEST(TripletLoss, EqualScoresGiveMargin) {
  const auto q = rows_of({{1, 0}});
  const auto d = rows_of({{0.6f, 0.8f}});
  EXPECT_NEAR(triplet_loss(q, d, d, 0.5), 0.5, 1e-12);
}

TEST(TripletLoss, SatisfiedMarginIsZero) {
  const auto q = rows_of({{1, 0}});
  EXPECT_EQ(triplet_loss(q, rows_of({{1, 0}}), rows_of({{0, 1}}), 0.5), 0.0);
}

TEST(TripletLoss, HandValue) {
  const auto q = rows_of({{1, 0}});
  const auto pos = rows_of({{0.8f, 0.6f}});
  const auto neg = rows_of({{0.6f, 0.8f}});
  EXPECT_NEAR(triplet_loss(q, pos, neg, 0.5), 0.5 - 0.8 + 0.6, 1e-6);
}

TripletInputs random_inputs(std::mt19937_64& rng, std::size_t d_in, std::size_t rows) {
  std::normal_distribution<double> g(0.0, 1.0);
  auto m = [&](std::size_t r) {
    Eigen::MatrixXd x(r, d_in);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    return x;
  };
  return {m(rows), m(rows + 1), m(rows + 2)};
}

Eigen::MatrixXd random_w(std::mt19937_64& rng, std::size_t d_in, std::size_t d_out) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd w(d_in, d_out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = g(rng);
  return w;
}

Eigen::MatrixXd finite_difference(const TripletInputs& t, const Eigen::MatrixXd& w, double margin, double h) {
  Eigen::MatrixXd g(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    Eigen::MatrixXd wp = w, wm = w;
    wp.data()[i] += h;
    wm.data()[i] -= h;
    g.data()[i] = (triplet_loss(t, wp, margin) - triplet_loss(t, wm, margin)) / (2 * h);
  }
  return g;
}

TEST(Gradient, MatchesFiniteDifferences4x3) {
  std::mt19937_64 rng(17);
  for (int c = 0; c < 10; ++c) {
    const TripletInputs t = random_inputs(rng, 4, 3);
    const Eigen::MatrixXd w = random_w(rng, 4, 3);
    const double margin = 10.0;  // keeps the hinge active
    ASSERT_GT(triplet_loss(t, w, margin), 0.0);
    const Eigen::MatrixXd a = gradient_of_loss(t, w, margin);
    const Eigen::MatrixXd n = finite_difference(t, w, margin, 1e-5);
    EXPECT_LE((a - n).norm() / n.norm(), 1e-4) << "case " << c;
  }
}

TEST(Gradient, ZeroInFlatHingeRegion) {
  const Eigen::MatrixXd w = Eigen::MatrixXd::Identity(4, 3);
  const double margin = 1e-3;
  const TripletInputs easy{Eigen::MatrixXd::Identity(1, 4), Eigen::MatrixXd::Identity(1, 4),
                           Eigen::MatrixXd::Identity(2, 4).bottomRows(1)};
  ASSERT_EQ(triplet_loss(easy, w, margin), 0.0);
  EXPECT_EQ(gradient_of_loss(easy, w, margin).norm(), 0.0);
}

TEST(Gradient, OrthogonalToRadialScaling) {
  std::mt19937_64 rng(8);
  for (int c = 0; c < 10; ++c) {
    const TripletInputs t = random_inputs(rng, 2, 2);
    const Eigen::MatrixXd w = random_w(rng, 2, 2);
    const Eigen::MatrixXd g = gradient_of_loss(t, w, 10.0);
    EXPECT_NEAR((g.array() * w.array()).sum(), 0.0, 1e-9 * (1.0 + g.norm() * w.norm()));
    EXPECT_NEAR(triplet_loss(t, w * 3.7, 10.0), triplet_loss(t, w, 10.0), 1e-9);
  }
}

TEST(TripletLoss, BoundedByMarginPlusTwoPerQueryRow) {
  std::mt19937_64 rng(12);
  for (int c = 0; c < 50; ++c) {
    const TripletInputs t = random_inputs(rng, 6, 1 + c % 4);
    const double loss = triplet_loss(t, random_w(rng, 6, 3), 0.5);
    EXPECT_GE(loss, 0.0);
    EXPECT_LE(loss, 0.5 + 2.0 * static_cast<double>(t.query.rows()) + 1e-12);
  }
}

// Query token i matches the positive's token i; negatives use unrelated ids.
struct Separable {
  std::vector<Triplet> triplets;
  TrainingSet data;
};

Separable separable_set() {
  Separable s;
  for (int i = 0; i < 24; ++i) {
    const std::string b = "b" + std::to_string(i);
    const std::string pos = "p" + std::to_string(i) + ":*:*";
    const std::string neg = "n" + std::to_string(i) + ":*:*";
    s.data.queries[b] = seq_of({1, 10 + i, 200 + i}, 4, 0);
    s.data.documents[pos] = seq_of({1, 10 + i, 300 + i}, 4, 0);
    s.data.documents[neg] = seq_of({1, 100 + i, 400 + i}, 4, 0);
    s.triplets.push_back({b, pos, neg});
  }
  return s;
}

TEST(Train, EmptyTripletsRejected) {
  const ReferenceHashEmbedder e(1, 16);
  try {
    train_projection({}, TrainingSet{}, e, {});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Train, ZeroEpochsReturnsSeededInit) {
  const Separable s = separable_set();
  const ReferenceHashEmbedder e(1, 32);
  TripletTrainConfig cfg;
  cfg.epochs = 0;
  cfg.d_out = 8;
  cfg.seed = 5;
  const TrainResult r = train_projection(s.triplets, s.data, e, cfg);
  EXPECT_EQ(r.projection, LinearProjection::seeded(32, 8, 5));
  EXPECT_EQ(r.epoch_loss.size(), 1u);
}

TEST(Train, LossDecreasesOnSeparableSet) {
  const Separable s = separable_set();
  const ReferenceHashEmbedder e(1, 32);
  TripletTrainConfig cfg;
  cfg.d_out = 8;
  cfg.learning_rate = 0.5;
  cfg.epochs = 4;
  cfg.batch_size = 8;
  const TrainResult r = train_projection(s.triplets, s.data, e, cfg);
  ASSERT_EQ(r.epoch_loss.size(), 5u);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
  EXPECT_EQ(r.batch_loss.size(), 12u);
  EXPECT_EQ(train_projection(s.triplets, s.data, e, cfg).projection, r.projection);
}

TEST(Fble, RoundTripAndBadMagic) {
  const fs::path dir = fs::temp_directory_path() / "fbl_fble";
  fs::create_directories(dir);
  const auto p = LinearProjection::seeded(12, 4, 3);
  save_projection(dir / "w.fble", p);
  EXPECT_EQ(load_projection(dir / "w.fble"), p);

  {
    std::fstream f(dir / "w.fble", std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXX", 4);
  }
  try {
    load_projection(dir / "w.fble");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
    EXPECT_NE(std::string(e.what()).find("w.fble"), std::string::npos);
  }
  fs::remove_all(dir);
}

TEST(Fble, FileEmbedderReadsTable) {
  const fs::path path = fs::temp_directory_path() / "fbl_table.fble";
  save_fble(path, {3, 2, {1, 0, 0, 1, 0.6f, 0.8f}});
  const FileEmbedder e(path);
  EXPECT_EQ(e.vocab_limit(), 3u);
  EXPECT_EQ(e.dim(), 2u);
  std::vector<float> v(2);
  e.embed(2, v);
  EXPECT_FLOAT_EQ(v[1], 0.8f);
  fs::remove(path);
}

}  // namespace
}  // namespace fbl
