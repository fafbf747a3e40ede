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
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fbl/corpus.hpp"
#include "fbl/retrieve.hpp"

namespace fbl {

using RelevantSet = std::set<std::string>;

/// bug id -> relevant changeset ids (never empty).
using Qrels = std::map<std::string, RelevantSet>;

/// bug id -> ranking, judged by each entry's changeset id.
using RunSet = std::map<std::string, RankedResult>;

Qrels make_qrels(std::span<const GoldLink> links);

/// 1 / rank of the first relevant entry; 0 when none was retrieved.
double reciprocal_rank(const RankedResult& result, const RelevantSet& relevant);

/// Precision at each relevant rank, summed and divided by |relevant|.
double average_precision(const RankedResult& result, const RelevantSet& relevant);

/// Short lists count as padded with non-relevant entries. k >= 1.
double precision_at_k(const RankedResult& result, const RelevantSet& relevant, std::size_t k);

/// Means over every bug in qrels; a bug without a run scores 0.
double mrr(const RunSet& runs, const Qrels& qrels);
double mean_average_precision(const RunSet& runs, const Qrels& qrels);
double mean_precision_at_k(const RunSet& runs, const Qrels& qrels, std::size_t k);

enum class BugCategory { kNotLocalized, kPartiallyLocalized, kFullyLocalized };

std::string_view category_name(BugCategory c);

/// "src/org/foo/Bar.java" -> "Bar".
std::string class_name_of_path(std::string_view path);

/// Simple class names of every file touched by the bug's gold changesets.
std::set<std::string> gold_class_names(const Corpus& corpus, std::string_view bug_id);

/// Counts gold names mentioned in summary+description as whole words,
/// including `Name.java` and `pkg.Name` spellings. Throws kEmptyGoldSet.
BugCategory categorize(const BugReport& report, const std::set<std::string>& gold_names);

bool mentions_class(std::string_view text, std::string_view name);

struct MetricSet {
  std::size_t bugs = 0;
  double mrr = 0.0;
  double map = 0.0;
  double p1 = 0.0;
  double p3 = 0.0;
  double p5 = 0.0;
};

MetricSet compute_metrics(const RunSet& runs, const Qrels& qrels);

nlohmann::json to_json(const MetricSet& m);

/// Overall metrics, plus per-category (NL, PL, FL, NL+PL) when a corpus is
/// supplied. Runs are collapsed to changesets by max before scoring.
nlohmann::json metrics_report(const RunSet& runs, const Qrels& qrels, const Corpus* corpus);

/// Reads a JSONL or TREC run file; the format is sniffed from the first
/// non-blank character. Entries are re-sorted by score.
RunSet read_run(const std::filesystem::path& path);

}  // namespace fbl
