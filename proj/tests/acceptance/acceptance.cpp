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

// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fbl/corpus.hpp"
#include "fbl/embed.hpp"
#include "fbl/encode.hpp"
#include "fbl/eval.hpp"
#include "fbl/index.hpp"
#include "fbl/retrieve.hpp"
#include "fbl/simd/kernels.hpp"
#include "support/metric_fixtures.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace fbl;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1 ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  testing::TokenCorpusParams p;
  p.documents = 1000;
  p.max_rows = 64;
  p.dim = 32;
  p.queries = 50;
  p.seed = 101;
  const testing::TokenCorpus tc = testing::token_corpus(p);
  IvfPqParams ip;
  ip.partitions = 32;
  ip.subspaces = 8;
  ip.codewords = 64;
  const IvfPqIndex idx = IvfPqIndex::build(tc.docs, ip);
  std::size_t identical = 0;
  for (const auto& q : tc.queries) {
    const RankedResult exact = rank_exact(q, tc.docs);
    const RankedResult two = rank_two_stage(q, idx, tc.docs, kAllResults, ip.partitions, kAllResults);
    if (two.entries == exact.entries && !exact.entries.empty()) ++identical;
  }
  const double secs = seconds_since(t0);
  return {identical == tc.queries.size() && secs < 60.0,
          std::to_string(identical) + "/" + std::to_string(tc.queries.size()) + " rankings bit-identical, " +
              fmt("%.1f s", secs)};
}

// 2 ---------------------------------------------------------------------------

Outcome candidate_recall() {
  const auto t0 = Clock::now();
  testing::TokenCorpusParams p;
  p.documents = 10000;
  p.dim = 32;
  p.vocab = 30000;
  p.topic_share = 0.8;
  p.queries = 50;
  p.seed = 202;
  const testing::TokenCorpus tc = testing::token_corpus(p);
  IvfPqParams ip;
  ip.partitions = 64;
  ip.subspaces = 16;
  ip.codewords = 256;
  const IvfPqIndex idx = IvfPqIndex::build(tc.docs, ip);

  std::vector<RankedResult> exact;
  for (const auto& q : tc.queries) exact.push_back(rank_exact(q, tc.docs, 10));

  std::vector<double> recall;
  std::string curve;
  for (std::size_t nprobe = 1; nprobe <= 64; nprobe *= 2) {
    double sum = 0.0;
    for (std::size_t i = 0; i < tc.queries.size(); ++i) {
      sum += testing::recall_at(rank_two_stage(tc.queries[i], idx, tc.docs, 1000, nprobe, 10), exact[i], 10);
    }
    recall.push_back(sum / static_cast<double>(tc.queries.size()));
    curve += (curve.empty() ? "" : " ") + std::to_string(nprobe) + ":" + fmt("%.3f", recall.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < recall.size(); ++i) monotone &= recall[i] >= recall[i - 1];
  const double at8 = recall[3];
  const double secs = seconds_since(t0);
  return {at8 >= 0.90 && monotone && secs < 300.0,
          "recall@10 at nprobe=8 " + fmt("%.3f", at8) + (monotone ? ", monotone" : ", NOT monotone") + " [" +
              curve + "], " + fmt("%.1f s", secs)};
}

// 3 ---------------------------------------------------------------------------

Outcome metric_oracles() {
  std::size_t ok = 0, total = 0;
  for (const auto& f : testing::metric_fixtures()) {
    const MetricSet m = compute_metrics(f.runs, f.qrels);
    const double got[] = {m.mrr, m.map, m.p1, m.p3, m.p5};
    const double want[] = {f.expected.mrr, f.expected.map, f.expected.p1, f.expected.p3, f.expected.p5};
    for (int i = 0; i < 5; ++i) {
      ++total;
      if (std::fabs(got[i] - want[i]) <= 1e-9) ++ok;
    }
  }
  return {ok == total && total == 25, std::to_string(ok) + "/" + std::to_string(total) + " metric values within 1e-9"};
}

// 4 ---------------------------------------------------------------------------

Outcome gradient_check() {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> rows(1, 5);
  auto matrix = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return m;
  };
  double worst = 0.0;
  std::size_t passed = 0;
  for (int t = 0; t < 20; ++t) {
    const TripletInputs in{matrix(rows(rng), 8), matrix(rows(rng), 8), matrix(rows(rng), 8)};
    const Eigen::MatrixXd w = matrix(8, 4);
    // Margin above the largest attainable score gap keeps the hinge active.
    const double margin = 2.0 * static_cast<double>(in.query.rows()) + 1.0;
    const Eigen::MatrixXd analytic = gradient_of_loss(in, w, margin);
    Eigen::MatrixXd numeric(8, 4);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      Eigen::MatrixXd wp = w, wm = w;
      wp.data()[i] += h;
      wm.data()[i] -= h;
      numeric.data()[i] = (triplet_loss(in, wp, margin) - triplet_loss(in, wm, margin)) / (2.0 * h);
    }
    const double rel = (analytic - numeric).norm() / std::max(numeric.norm(), 1e-300);
    worst = std::max(worst, rel);
    if (rel <= 1e-4) ++passed;
  }
  return {passed == 20, std::to_string(passed) + "/20 cases, worst relative error " + fmt("%.2e", worst)};
}

// 5 ---------------------------------------------------------------------------

Outcome quantization_properties() {
  std::string detail;
  bool ok = true;

  for (std::uint64_t seed : {501u, 502u, 503u}) {
    std::mt19937_64 rng(seed);
    const auto pts = testing::random_unit_rows(rng, 2000, 16);
    const KMeansResult r = kmeans(pts, 16, 32, seed, 30);
    bool mono = r.distortion.size() >= 2;
    for (std::size_t i = 1; i < r.distortion.size(); ++i) mono &= r.distortion[i] <= r.distortion[i - 1];
    ok &= mono;
    detail += "kmeans seed " + std::to_string(seed) + (mono ? " non-increasing" : " INCREASED") + " (" +
              std::to_string(r.distortion.size()) + " steps); ";
  }

  auto mse = [](const IvfPqIndex& idx, const DocMatrices& docs) {
    double s = 0.0;
    for (std::uint64_t e = 0; e < idx.size(); ++e) {
      const RegistryEntry r = idx.registry(e);
      const auto x = docs.matrix(r.doc_index).row(r.token_position);
      const auto y = idx.reconstruct(e);
      for (std::size_t j = 0; j < x.size(); ++j) s += (static_cast<double>(x[j]) - y[j]) * (x[j] - y[j]);
    }
    return s / static_cast<double>(idx.size());
  };

  testing::TokenCorpusParams p;
  p.documents = 400;
  p.dim = 32;
  p.seed = 504;
  const DocMatrices docs = testing::token_corpus(p).docs;
  IvfPqParams ip;
  ip.partitions = 16;
  ip.subspaces = 8;
  ip.codewords = 16;
  const double e16 = mse(IvfPqIndex::build(docs, ip), docs);
  ip.codewords = 256;
  const double e256 = mse(IvfPqIndex::build(docs, ip), docs);
  ok &= e256 < e16;
  detail += "PQ MSE K=256 " + fmt("%.3e", e256) + " vs K=16 " + fmt("%.3e", e16) + "; ";

  std::mt19937_64 rng(505);
  const auto centers = testing::random_unit_rows(rng, 8, 16);
  DocMatrices aligned;
  std::uniform_int_distribution<int> pick(0, 7);
  for (int i = 0; i < 50; ++i) {
    std::vector<float> rows;
    for (int r = 0; r < 4; ++r) {
      const int c = pick(rng);
      rows.insert(rows.end(), centers.begin() + c * 16, centers.begin() + (c + 1) * 16);
    }
    aligned.add("a" + std::to_string(i) + ":*:*", EmbeddingMatrix(4, 16, std::move(rows)));
  }
  IvfPqParams ap;
  ap.partitions = 8;
  ap.subspaces = 4;
  ap.codewords = 4;
  const double ea = mse(IvfPqIndex::build(aligned, ap), aligned);
  ok &= ea < 1e-6;
  detail += "centroid-aligned error " + fmt("%.1e", ea);
  return {ok, detail};
}

// 6 ---------------------------------------------------------------------------

Outcome encoding_goldens() {
  const Vocabulary vocab = Vocabulary::load(std::string(FBL_TEST_DATA) + "/vocab.txt");
  Hunk h;
  h.lines = {{LineKind::kContext, "a"}, {LineKind::kAdded, "b"}, {LineKind::kAdded, "c"}, {LineKind::kRemoved, "d"}};
  const Document doc{"c:0:0", "c", Granularity::kHunk, h};
  auto tokens = [&](Strategy s) {
    const EncodedSequence e = encode_document(doc, s, vocab, 16);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < e.real_length; ++i) out.push_back(vocab.token(e.ids[i]));
    return out;
  };
  using V = std::vector<std::string>;
  std::size_t golden = 0;
  golden += tokens(Strategy::kD) == V{"[CLS]", "[D]", "a", "b", "c", "d", "[SEP]"};
  golden += tokens(Strategy::kArc) == V{"[CLS]", "[A]", "b", "c", "[R]", "d", "[C]", "a", "[SEP]"};
  golden += tokens(Strategy::kArcL) == V{"[CLS]", "[C]", "a", "[A]", "b", "c", "[R]", "d", "[SEP]"};

  std::mt19937_64 rng(606);
  const SpecialTokens& sp = vocab.specials();
  std::size_t matched = 0;
  for (int t = 0; t < 100; ++t) {
    const Hunk r = testing::random_hunk(rng, 1 + static_cast<std::size_t>(t % 15));
    const EncodedSequence e = encode_document({"r:0:0", "r", Granularity::kHunk, r}, Strategy::kArcL, vocab, 256);
    std::size_t markers = 0;
    for (std::size_t i = 0; i < e.real_length; ++i) {
      const TokenId x = e.ids[i];
      markers += x == sp.added || x == sp.removed || x == sp.context;
    }
    matched += markers == testing::kind_transitions(r);
  }
  return {golden == 3 && matched == 100,
          std::to_string(golden) + "/3 golden sequences, marker count matched on " + std::to_string(matched) +
              "/100 random hunks"};
}

// 7 ---------------------------------------------------------------------------

Outcome scaling_trend() {
  const std::size_t sizes[] = {20000, 50000, 100000, 200000};
  const std::size_t mean_rows = 32;
  testing::TokenCorpusParams p;
  p.dim = 128;
  p.min_rows = 8;
  p.max_rows = 56;
  p.queries = 20;
  p.query_rows = 32;
  p.vocab = 30000;
  p.topic_share = 0.8;
  p.seed = 707;

  std::vector<double> ratios;
  std::string detail;
  for (std::size_t n : sizes) {
    p.documents = n / mean_rows;
    const testing::TokenCorpus tc = testing::token_corpus(p);
    IvfPqParams ip;
    ip.partitions = 320;
    ip.subspaces = 16;
    ip.codewords = 256;
    ip.max_train_rows = 64 * 1024;
    const IvfPqIndex idx = IvfPqIndex::build(tc.docs, ip);

    double exact_s = 0.0, two_s = 0.0;
    for (const auto& q : tc.queries) {
      auto t0 = Clock::now();
      const RankedResult a = rank_exact(q, tc.docs, 1000);
      exact_s += seconds_since(t0);
      t0 = Clock::now();
      const RankedResult b = rank_two_stage(q, idx, tc.docs, 1000, 16, 1000);
      two_s += seconds_since(t0);
      if (a.entries.empty() || b.entries.empty()) return {false, "empty ranking"};
    }
    const double ratio = two_s / exact_s;
    ratios.push_back(ratio);
    detail += std::to_string(idx.size()) + " emb: exact " + fmt("%.1f ms", 1e3 * exact_s / 20) + ", two-stage " +
              fmt("%.1f ms", 1e3 * two_s / 20) + ", ratio " + fmt("%.3f", ratio) + "; ";
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < ratios.size(); ++i) decreasing &= ratios[i] < ratios[i - 1];
  detail += std::string("kernels ") + simd::kernels().name;
  return {ratios.back() <= 0.20 && decreasing, detail};
}

// 8 ---------------------------------------------------------------------------

struct PlantedRun {
  double mrr = 0.0;
  std::vector<double> epoch_loss;
};

constexpr double kPlantedLearningRate = 0.3;

Outcome planted_relevance() {
  testing::PlantedParams pp;
  const testing::PlantedCorpus pc = testing::planted_corpus(pp);
  const Corpus& c = pc.corpus;
  const ReferenceHashEmbedder embedder(42, 768);
  const std::vector<Document> docs = c.documents(Granularity::kHunk);
  const LengthLimits limits;

  TrainingSet data;
  for (const Document& d : docs) {
    data.documents[d.doc_id] = encode_document(d, Strategy::kArcL, pc.vocab, limits.hunk);
  }
  for (const BugReport& b : c.bugs) data.queries[b.bug_id] = encode_query(b, pc.vocab, limits.query);

  const LinkSplit split = split_train_test(c.links, c.bug_dates());
  const std::vector<Triplet> triplets = build_triplets(split.train, docs, 42);
  const Qrels test_qrels = make_qrels(split.test);

  auto evaluate = [&](const LinearProjection& proj) {
    const TokenTable table(embedder, proj, pc.vocab.size());
    DocMatrices mats;
    for (const Document& d : docs) mats.add(d.doc_id, table.embed(data.documents.at(d.doc_id)));
    IvfPqParams ip;
    ip.partitions = 64;
    ip.subspaces = 16;
    ip.codewords = 256;
    const IvfPqIndex idx = IvfPqIndex::build(mats, ip);
    RunSet runs;
    for (const auto& [bug, rel] : test_qrels) {
      const EmbeddingMatrix q = table.embed(data.queries.at(bug), true);
      RankedResult r = rank_two_stage(q, idx, mats, 1000, 16, kAllResults);
      r.bug_id = bug;
      runs.emplace(bug, aggregate_to_changeset(r));
    }
    return mrr(runs, test_qrels);
  };

  TripletTrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 16;
  cfg.d_out = 128;
  cfg.seed = 42;
  cfg.learning_rate = kPlantedLearningRate;
  const TrainResult trained = train_projection(triplets, data, embedder, cfg);
  const double untrained_mrr = evaluate(LinearProjection::seeded(768, cfg.d_out, cfg.seed));
  const double trained_mrr = evaluate(trained.projection);

  std::string losses;
  for (double l : trained.epoch_loss) losses += (losses.empty() ? "" : " ") + fmt("%.3f", l);
  return {trained_mrr >= 0.9 && trained_mrr > untrained_mrr,
          "test MRR trained " + fmt("%.3f", trained_mrr) + " vs untrained " + fmt("%.3f", untrained_mrr) + " over " +
              std::to_string(test_qrels.size()) + " bugs, " + std::to_string(triplets.size()) +
              " triplets, lr " + fmt("%g", cfg.learning_rate) + ", epoch loss [" + losses + "]"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"candidate recall", candidate_recall},
      {"metric oracles", metric_oracles},
      {"gradient check", gradient_check},
      {"quantization properties", quantization_properties},
      {"encoding goldens", encoding_goldens},
      {"scaling trend", scaling_trend},
      {"planted relevance", planted_relevance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("AC%zu %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
