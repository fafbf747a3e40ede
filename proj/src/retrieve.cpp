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
#include "fbl/retrieve.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include <json.hpp>

#include "fbl/corpus.hpp"
#include "fbl/error.hpp"
#include "fbl/index.hpp"
#include "fbl/simd/kernels.hpp"

namespace fbl {

double maxsim(const EmbeddingMatrix& q, const EmbeddingMatrix& d) {
  if (d.live_rows() == 0) return kUnscorable;
  if (q.dim() != d.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query dim " + std::to_string(q.dim()) + " != document dim " + std::to_string(d.dim()));
  }
  const auto& kern = simd::kernels();
  const std::size_t dim = d.dim();
  double total = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    if (!q.live(i)) continue;
    const float* qi = q.row(i).data();
    float best;
    if (d.all_live()) {
      best = kern.max_dot(qi, d.data(), d.rows(), dim);
    } else {
      best = -std::numeric_limits<float>::infinity();
      for (std::size_t j = 0; j < d.rows(); ++j) {
        if (d.live(j)) best = std::max(best, kern.dot(qi, d.row(j).data(), dim));
      }
    }
    total += best;
  }
  return total;
}

void sort_entries(std::vector<RankedEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    return a.score > b.score || (a.score == b.score && a.doc_id < b.doc_id);
  });
}

namespace {

void truncate(std::vector<RankedEntry>& entries, std::size_t k) {
  if (entries.size() > k) entries.resize(k);
}

}  // namespace

RankedResult rank_exact(const EmbeddingMatrix& query, const DocMatrices& docs, std::size_t k) {
  RankedResult res;
  res.mode = RankMode::kExact;
  res.entries.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const double s = maxsim(query, docs.matrix(i));
    if (s == kUnscorable) continue;
    res.entries.push_back({docs.id(i), changeset_of_doc_id(docs.id(i)), s});
  }
  sort_entries(res.entries);
  truncate(res.entries, k);
  return res;
}

RankedResult rank_two_stage(const EmbeddingMatrix& query, const IvfPqIndex& index,
                            const DocMatrices& docs, std::size_t n_prime, std::size_t nprobe,
                            std::size_t k) {
  RankedResult res;
  res.mode = RankMode::kTwoStage;
  for (const std::string& doc : index.candidate_docs(query, n_prime, nprobe)) {
    const auto pos = docs.find(doc);
    if (!pos) {
      throw Error(ErrorCode::kConfigMismatch, "index references document " + doc +
                                                  " missing from the document matrices");
    }
    const double s = maxsim(query, docs.matrix(*pos));
    if (s == kUnscorable) continue;
    res.entries.push_back({doc, changeset_of_doc_id(doc), s});
  }
  sort_entries(res.entries);
  truncate(res.entries, k);
  return res;
}

Aggregation parse_aggregation(std::string_view name) {
  if (name == "max") return Aggregation::kMax;
  if (name == "sum") return Aggregation::kSum;
  throw Error(ErrorCode::kInvalidArgument, "unknown aggregation '" + std::string(name) + "'");
}

RankedResult aggregate_to_changeset(const RankedResult& result, Aggregation agg) {
  std::map<std::string, double> by_cs;
  for (const RankedEntry& e : result.entries) {
    auto [it, inserted] = by_cs.try_emplace(e.changeset_id, e.score);
    if (inserted) continue;
    it->second = agg == Aggregation::kMax ? std::max(it->second, e.score) : it->second + e.score;
  }
  RankedResult out;
  out.bug_id = result.bug_id;
  out.mode = result.mode;
  for (auto& [cs, score] : by_cs) out.entries.push_back({cs, cs, score});
  sort_entries(out.entries);
  return out;
}

void write_run_jsonl(std::ostream& out, const RankedResult& result) {
  std::size_t rank = 1;
  for (const RankedEntry& e : result.entries) {
    nlohmann::json row = {{"bug_id", result.bug_id},
                          {"rank", rank++},
                          {"doc_id", e.doc_id},
                          {"changeset_id", e.changeset_id},
                          {"score", e.score}};
    out << row.dump() << '\n';
  }
}

void write_run_trec(std::ostream& out, const RankedResult& result, std::string_view tag) {
  std::size_t rank = 1;
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  for (const RankedEntry& e : result.entries) {
    out << result.bug_id << " Q0 " << e.doc_id << ' ' << rank++ << ' ' << e.score << ' ' << tag << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace fbl
