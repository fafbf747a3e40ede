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

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "fbl/embed.hpp"

namespace fbl {

class DocMatrices;
class IvfPqIndex;

/// Late-interaction relevance: for each query row the best inner product
/// over document rows, summed. Rows are unit-norm so this is the sum of
/// maximum cosine similarities. Dead rows are skipped on both sides; a
/// document without live rows scores -infinity.
double maxsim(const EmbeddingMatrix& q, const EmbeddingMatrix& d);

inline constexpr double kUnscorable = -std::numeric_limits<double>::infinity();

enum class RankMode { kExact, kTwoStage };

struct RankedEntry {
  std::string doc_id;
  std::string changeset_id;
  double score = 0.0;

  bool operator==(const RankedEntry&) const = default;
};

/// Scores non-increasing, ties by doc id ascending, doc ids unique.
struct RankedResult {
  std::string bug_id;
  std::vector<RankedEntry> entries;
  RankMode mode = RankMode::kExact;
};

void sort_entries(std::vector<RankedEntry>& entries);

inline constexpr std::size_t kAllResults = std::numeric_limits<std::size_t>::max();

/// Brute-force MaxSim against every document; unscorable documents are
/// left out.
RankedResult rank_exact(const EmbeddingMatrix& query, const DocMatrices& docs,
                        std::size_t k = kAllResults);

/// ANN candidate generation followed by exact MaxSim re-scoring of the
/// candidates only.
RankedResult rank_two_stage(const EmbeddingMatrix& query, const IvfPqIndex& index,
                            const DocMatrices& docs, std::size_t n_prime, std::size_t nprobe,
                            std::size_t k);

enum class Aggregation { kMax, kSum };

Aggregation parse_aggregation(std::string_view name);

/// Collapses hunk/file documents onto their changesets.
RankedResult aggregate_to_changeset(const RankedResult& result, Aggregation agg = Aggregation::kMax);

/// {"bug_id","rank","doc_id","changeset_id","score"} per line, rank from 1.
void write_run_jsonl(std::ostream& out, const RankedResult& result);

/// `bug_id Q0 doc_id rank score tag`
void write_run_trec(std::ostream& out, const RankedResult& result, std::string_view tag);

}  // namespace fbl
