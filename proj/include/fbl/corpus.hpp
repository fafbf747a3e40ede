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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace fbl {

enum class LineKind : std::uint8_t { kAdded, kRemoved, kContext };

struct DiffLine {
  LineKind kind = LineKind::kContext;
  std::string text;  // without the leading marker character

  bool operator==(const DiffLine&) const = default;
};

struct Hunk {
  std::uint32_t old_start = 0;
  std::uint32_t old_count = 0;
  std::uint32_t new_start = 0;
  std::uint32_t new_count = 0;
  std::vector<DiffLine> lines;

  bool operator==(const Hunk&) const = default;
};

struct FileDiff {
  std::string path;
  std::vector<Hunk> hunks;  // ascending old_start; empty for binary/rename-only

  bool operator==(const FileDiff&) const = default;
};

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

struct Changeset {
  std::string changeset_id;
  std::string log_message;
  std::vector<FileDiff> files;
  Timestamp committed_at = 0;

  bool operator==(const Changeset&) const = default;
};

enum class Granularity : std::uint8_t { kChangeset, kChangesetFile, kHunk };

std::string_view granularity_name(Granularity g);
Granularity parse_granularity(std::string_view name);

/// A retrievable unit. doc_id is `<changeset>:<file>:<hunk>` with `*` in
/// the positions coarser than the granularity.
struct Document {
  std::string doc_id;
  std::string origin_changeset;
  Granularity granularity = Granularity::kChangeset;
  std::variant<Changeset, FileDiff, Hunk> payload;
};

/// Visits the diff lines of a document payload in original order.
void for_each_line(const Document& doc,
                   const std::function<void(const DiffLine&)>& fn);

std::string make_doc_id(std::string_view changeset_id, Granularity g,
                        std::size_t file_idx, std::size_t hunk_idx);

/// Recovers the changeset id from a doc id produced by make_doc_id.
std::string changeset_of_doc_id(std::string_view doc_id);

struct BugReport {
  std::string bug_id;
  std::string summary;
  std::string description;
  Timestamp opened_at = 0;

  /// Text used as the retrieval query: summary then description.
  std::string query_text() const;
};

struct GoldLink {
  std::string bug_id;
  std::string changeset_id;

  bool operator==(const GoldLink&) const = default;
};

struct Triplet {
  std::string bug_id;
  std::string positive_doc;
  std::string negative_doc;

  bool operator==(const Triplet&) const = default;
};

/// Parses `git diff` output. Throws Error(kMalformedDiff) with a 1-based
/// line number for bad hunk headers or illegal payload lines.
Changeset parse_unified_diff(std::string_view raw, std::string changeset_id,
                             std::string log_message);

/// Inverse of parse_unified_diff for the fields it keeps.
std::string serialize_unified_diff(const Changeset& cs);

std::vector<Document> explode(const Changeset& cs, Granularity granularity);

/// One triplet per (bug, positive document); negatives drawn uniformly from
/// documents outside the bug's gold changesets.
std::vector<Triplet> build_triplets(std::span<const GoldLink> links,
                                    std::span<const Document> docs,
                                    std::uint64_t seed);

struct LinkSplit {
  std::vector<GoldLink> train;
  std::vector<GoldLink> test;
};

/// Orders links by bug opening date (ties by bug id, then changeset id)
/// and puts the first ceil(n/2) in train.
LinkSplit split_train_test(std::span<const GoldLink> links,
                           const std::unordered_map<std::string, Timestamp>& opened_at);

/// ISO-8601 (`2020-01-31T12:00:00Z`, offsets, date-only) or integer seconds.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

/// Changesets, bug reports and gold links with id lookups.
struct Corpus {
  std::vector<Changeset> changesets;
  std::vector<BugReport> bugs;
  std::vector<GoldLink> links;

  /// Checks id uniqueness and that every link resolves. Throws kFormat.
  void validate() const;

  const Changeset* find_changeset(std::string_view id) const;
  const BugReport* find_bug(std::string_view id) const;
  std::unordered_map<std::string, Timestamp> bug_dates() const;

  /// All documents of every changeset at the given granularity.
  std::vector<Document> documents(Granularity g) const;
};

// JSON-lines ingestion. Each reader throws kFormat naming file and line.
std::vector<Changeset> read_changesets_jsonl(const std::filesystem::path& path);
std::vector<BugReport> read_bugs_jsonl(const std::filesystem::path& path);
std::vector<GoldLink> read_links_jsonl(const std::filesystem::path& path);

void write_changesets_jsonl(const std::filesystem::path& path,
                            std::span<const Changeset> changesets);
void write_bugs_jsonl(const std::filesystem::path& path,
                      std::span<const BugReport> bugs);
void write_links_jsonl(const std::filesystem::path& path,
                       std::span<const GoldLink> links);

void write_changesets_jsonl(std::ostream& out, std::span<const Changeset> changesets);
void write_bugs_jsonl(std::ostream& out, std::span<const BugReport> bugs);
void write_links_jsonl(std::ostream& out, std::span<const GoldLink> links);

/// Reads `changesets.jsonl`, `bugs.jsonl` and `links.jsonl` from dir.
Corpus load_corpus(const std::filesystem::path& dir);
void save_corpus(const std::filesystem::path& dir, const Corpus& corpus);

}  // namespace fbl
