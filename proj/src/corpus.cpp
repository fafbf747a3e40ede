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
#include "fbl/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "fbl/error.hpp"

namespace fbl {
namespace {

using json = nlohmann::json;

std::vector<std::string_view> split_lines(std::string_view raw) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const std::size_t nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(raw.substr(pos));
      break;
    }
    lines.push_back(raw.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kMalformedDiff,
              "line " + std::to_string(line_no) + ": " + what);
}

bool parse_u32(std::string_view s, std::uint32_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// "a" or "a,b"
bool parse_range(std::string_view s, std::uint32_t& start, std::uint32_t& count) {
  const std::size_t comma = s.find(',');
  if (comma == std::string_view::npos) {
    count = 1;
    return parse_u32(s, start);
  }
  return parse_u32(s.substr(0, comma), start) &&
         parse_u32(s.substr(comma + 1), count);
}

// "@@ -a,b +c,d @@ optional section heading"
bool parse_hunk_header(std::string_view line, Hunk& h) {
  if (!line.starts_with("@@ -")) return false;
  const std::size_t close = line.find(" @@", 3);
  if (close == std::string_view::npos) return false;
  const std::string_view body = line.substr(4, close - 4);
  const std::size_t plus = body.find(" +");
  if (plus == std::string_view::npos) return false;
  return parse_range(body.substr(0, plus), h.old_start, h.old_count) &&
         parse_range(body.substr(plus + 2), h.new_start, h.new_count);
}

std::string strip_path_prefix(std::string_view p) {
  // "+++ b/src/x.c\t2020-01-01" -> "src/x.c"
  const std::size_t tab = p.find('\t');
  if (tab != std::string_view::npos) p = p.substr(0, tab);
  if (p.starts_with("a/") || p.starts_with("b/")) p.remove_prefix(2);
  return std::string(p);
}

std::string path_from_git_header(std::string_view line) {
  // diff --git a/x b/x
  const std::size_t b = line.rfind(" b/");
  if (b == std::string_view::npos) return {};
  return std::string(line.substr(b + 3));
}

bool has_change(const Hunk& h) {
  return std::any_of(h.lines.begin(), h.lines.end(), [](const DiffLine& l) {
    return l.kind != LineKind::kContext;
  });
}

void finish_file(FileDiff& file, std::size_t line_no) {
  if (file.path.empty()) malformed(line_no, "file diff without a path");
}

}  // namespace

std::string_view granularity_name(Granularity g) {
  switch (g) {
    case Granularity::kChangeset:
      return "changeset";
    case Granularity::kChangesetFile:
      return "file";
    case Granularity::kHunk:
      return "hunk";
  }
  return "?";
}

Granularity parse_granularity(std::string_view name) {
  if (name == "changeset" || name == "changesets") return Granularity::kChangeset;
  if (name == "file" || name == "files" || name == "changeset-file")
    return Granularity::kChangesetFile;
  if (name == "hunk" || name == "hunks") return Granularity::kHunk;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown granularity '" + std::string(name) + "'");
}

std::string BugReport::query_text() const {
  if (description.empty()) return summary;
  if (summary.empty()) return description;
  return summary + "\n" + description;
}

Changeset parse_unified_diff(std::string_view raw, std::string changeset_id,
                             std::string log_message) {
  Changeset cs;
  cs.changeset_id = std::move(changeset_id);
  cs.log_message = std::move(log_message);

  enum class State { kPreamble, kFileHeader, kHunkBody, kBetweenHunks };
  State state = State::kPreamble;
  std::uint32_t old_left = 0;
  std::uint32_t new_left = 0;

  const auto lines = split_lines(raw);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const std::size_t line_no = i + 1;

    if (state == State::kHunkBody) {
      Hunk& h = cs.files.back().hunks.back();
      const char c = line.empty() ? ' ' : line.front();
      const std::string text(line.empty() ? line : line.substr(1));
      if (c == ' ' && old_left > 0 && new_left > 0) {
        h.lines.push_back({LineKind::kContext, text});
        --old_left;
        --new_left;
      } else if (c == '-' && old_left > 0) {
        h.lines.push_back({LineKind::kRemoved, text});
        --old_left;
      } else if (c == '+' && new_left > 0) {
        h.lines.push_back({LineKind::kAdded, text});
        --new_left;
      } else if (c == '\\') {
        // "\ No newline at end of file"
      } else {
        malformed(line_no, "illegal payload line '" + std::string(line.substr(0, 40)) + "'");
      }
      if (old_left == 0 && new_left == 0) {
        if (!has_change(h)) malformed(line_no, "hunk without added or removed lines");
        state = State::kBetweenHunks;
      }
      continue;
    }

    if (line.starts_with("diff --git ")) {
      if (!cs.files.empty()) finish_file(cs.files.back(), line_no);
      cs.files.push_back(FileDiff{path_from_git_header(line), {}});
      state = State::kFileHeader;
      continue;
    }

    if (line.starts_with("@@")) {
      if (state == State::kPreamble) malformed(line_no, "hunk header before any file header");
      Hunk h;
      if (!parse_hunk_header(line, h)) malformed(line_no, "unparseable hunk header");
      FileDiff& file = cs.files.back();
      if (!file.hunks.empty() && h.old_start < file.hunks.back().old_start) {
        malformed(line_no, "hunks out of order");
      }
      old_left = h.old_count;
      new_left = h.new_count;
      file.hunks.push_back(std::move(h));
      if (old_left == 0 && new_left == 0) malformed(line_no, "empty hunk");
      state = State::kHunkBody;
      continue;
    }

    switch (state) {
      case State::kPreamble:
        // Plain unified diff without git headers.
        if (line.starts_with("--- ") && i + 1 < lines.size() &&
            lines[i + 1].starts_with("+++ ")) {
          cs.files.push_back(FileDiff{});
          state = State::kFileHeader;
          --i;
        }
        break;
      case State::kFileHeader: {
        FileDiff& file = cs.files.back();
        if (line.starts_with("+++ ")) {
          const std::string p = strip_path_prefix(line.substr(4));
          if (p != "/dev/null") file.path = p;
        } else if (line.starts_with("--- ")) {
          const std::string p = strip_path_prefix(line.substr(4));
          if (p != "/dev/null" && file.path.empty()) file.path = p;
        } else if (line.starts_with("rename to ")) {
          file.path = std::string(line.substr(10));
        }
        // index/mode/similarity/Binary lines carry no payload.
        break;
      }
      case State::kBetweenHunks:
        if (line.starts_with("\\")) break;
        if (line.starts_with("--- ") && i + 1 < lines.size() &&
            lines[i + 1].starts_with("+++ ")) {
          finish_file(cs.files.back(), line_no);
          cs.files.push_back(FileDiff{});
          state = State::kFileHeader;
          --i;
          break;
        }
        malformed(line_no, "unexpected line after hunk '" + std::string(line.substr(0, 40)) + "'");
      case State::kHunkBody:
        break;
    }
  }
  if (state == State::kHunkBody) malformed(lines.size(), "truncated hunk");
  if (!cs.files.empty()) finish_file(cs.files.back(), lines.size());
  return cs;
}

std::string serialize_unified_diff(const Changeset& cs) {
  std::ostringstream out;
  for (const FileDiff& f : cs.files) {
    out << "diff --git a/" << f.path << " b/" << f.path << '\n';
    out << "--- a/" << f.path << '\n';
    out << "+++ b/" << f.path << '\n';
    for (const Hunk& h : f.hunks) {
      out << "@@ -" << h.old_start << ',' << h.old_count << " +" << h.new_start
          << ',' << h.new_count << " @@\n";
      for (const DiffLine& l : h.lines) {
        const char marker = l.kind == LineKind::kAdded     ? '+'
                            : l.kind == LineKind::kRemoved ? '-'
                                                           : ' ';
        out << marker << l.text << '\n';
      }
    }
  }
  return out.str();
}

void for_each_line(const Document& doc,
                   const std::function<void(const DiffLine&)>& fn) {
  auto visit_hunk = [&](const Hunk& h) {
    for (const DiffLine& l : h.lines) fn(l);
  };
  auto visit_file = [&](const FileDiff& f) {
    for (const Hunk& h : f.hunks) visit_hunk(h);
  };
  if (const auto* cs = std::get_if<Changeset>(&doc.payload)) {
    for (const FileDiff& f : cs->files) visit_file(f);
  } else if (const auto* f = std::get_if<FileDiff>(&doc.payload)) {
    visit_file(*f);
  } else {
    visit_hunk(std::get<Hunk>(doc.payload));
  }
}

std::string make_doc_id(std::string_view changeset_id, Granularity g,
                        std::size_t file_idx, std::size_t hunk_idx) {
  std::string id(changeset_id);
  switch (g) {
    case Granularity::kChangeset:
      id += ":*:*";
      break;
    case Granularity::kChangesetFile:
      id += ":" + std::to_string(file_idx) + ":*";
      break;
    case Granularity::kHunk:
      id += ":" + std::to_string(file_idx) + ":" + std::to_string(hunk_idx);
      break;
  }
  return id;
}

std::string changeset_of_doc_id(std::string_view doc_id) {
  const std::size_t last = doc_id.rfind(':');
  if (last == std::string_view::npos || last == 0) return std::string(doc_id);
  const std::size_t prev = doc_id.rfind(':', last - 1);
  if (prev == std::string_view::npos) return std::string(doc_id);
  return std::string(doc_id.substr(0, prev));
}

std::vector<Document> explode(const Changeset& cs, Granularity granularity) {
  std::vector<Document> docs;
  switch (granularity) {
    case Granularity::kChangeset:
      docs.push_back({make_doc_id(cs.changeset_id, granularity, 0, 0),
                      cs.changeset_id, granularity, cs});
      break;
    case Granularity::kChangesetFile:
      for (std::size_t f = 0; f < cs.files.size(); ++f) {
        if (cs.files[f].hunks.empty()) continue;
        docs.push_back({make_doc_id(cs.changeset_id, granularity, f, 0),
                        cs.changeset_id, granularity, cs.files[f]});
      }
      break;
    case Granularity::kHunk:
      for (std::size_t f = 0; f < cs.files.size(); ++f) {
        for (std::size_t h = 0; h < cs.files[f].hunks.size(); ++h) {
          docs.push_back({make_doc_id(cs.changeset_id, granularity, f, h),
                          cs.changeset_id, granularity, cs.files[f].hunks[h]});
        }
      }
      break;
  }
  return docs;
}

std::vector<Triplet> build_triplets(std::span<const GoldLink> links,
                                    std::span<const Document> docs,
                                    std::uint64_t seed) {
  // Bugs in first-appearance order, each with its gold changesets.
  std::vector<std::string> bug_order;
  std::unordered_map<std::string, std::vector<std::string>> gold;
  for (const GoldLink& l : links) {
    auto [it, inserted] = gold.try_emplace(l.bug_id);
    if (inserted) bug_order.push_back(l.bug_id);
    if (std::find(it->second.begin(), it->second.end(), l.changeset_id) ==
        it->second.end()) {
      it->second.push_back(l.changeset_id);
    }
  }

  std::unordered_map<std::string, std::vector<std::size_t>> docs_by_cs;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    docs_by_cs[docs[i].origin_changeset].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<Triplet> out;
  for (const std::string& bug : bug_order) {
    const auto& gold_cs = gold[bug];
    const std::unordered_set<std::string> gold_set(gold_cs.begin(), gold_cs.end());
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (!gold_set.contains(docs[i].origin_changeset)) negatives.push_back(i);
    }
    if (negatives.empty()) {
      throw Error(ErrorCode::kNoNegativeAvailable,
                  "every document is gold for bug " + bug);
    }
    std::uniform_int_distribution<std::size_t> pick(0, negatives.size() - 1);
    for (const std::string& cs : gold_cs) {
      auto it = docs_by_cs.find(cs);
      if (it == docs_by_cs.end()) continue;
      for (std::size_t pos : it->second) {
        out.push_back({bug, docs[pos].doc_id, docs[negatives[pick(rng)]].doc_id});
      }
    }
  }
  return out;
}

LinkSplit split_train_test(std::span<const GoldLink> links,
                           const std::unordered_map<std::string, Timestamp>& opened_at) {
  std::vector<GoldLink> sorted(links.begin(), links.end());
  auto date = [&](const GoldLink& l) {
    auto it = opened_at.find(l.bug_id);
    if (it == opened_at.end()) {
      throw Error(ErrorCode::kInvalidArgument, "no opening date for bug " + l.bug_id);
    }
    return it->second;
  };
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](const GoldLink& a, const GoldLink& b) {
                     const Timestamp ta = date(a), tb = date(b);
                     if (ta != tb) return ta < tb;
                     if (a.bug_id != b.bug_id) return a.bug_id < b.bug_id;
                     return a.changeset_id < b.changeset_id;
                   });
  const std::size_t n_train = (sorted.size() + 1) / 2;
  LinkSplit split;
  split.train.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(sorted.begin() + static_cast<std::ptrdiff_t>(n_train), sorted.end());
  return split;
}

Timestamp parse_timestamp(std::string_view text) {
  auto bad = [&]() -> Error {
    return Error(ErrorCode::kFormat, "bad timestamp '" + std::string(text) + "'");
  };
  if (text.empty()) throw bad();
  const bool numeric = std::all_of(text.begin() + (text.front() == '-' ? 1 : 0),
                                   text.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (numeric) {
    Timestamp t = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw bad();
    return t;
  }
  auto num = [&](std::size_t pos, std::size_t len) {
    if (pos + len > text.size()) throw bad();
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
    if (ec != std::errc() || ptr != text.data() + pos + len) throw bad();
    return v;
  };
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') throw bad();
  using namespace std::chrono;
  const year_month_day ymd{year{num(0, 4)}, month{static_cast<unsigned>(num(5, 2))},
                           day{static_cast<unsigned>(num(8, 2))}};
  if (!ymd.ok()) throw bad();
  Timestamp secs = sys_days{ymd}.time_since_epoch() / seconds{1};
  std::size_t pos = 10;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    const int hh = num(pos + 1, 2);
    if (text.size() <= pos + 3 || text[pos + 3] != ':') throw bad();
    const int mm = num(pos + 4, 2);
    int ss = 0;
    pos += 6;
    if (pos < text.size() && text[pos] == ':') {
      ss = num(pos + 1, 2);
      pos += 3;
    }
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
    secs += hh * 3600 + mm * 60 + ss;
  }
  if (pos < text.size()) {
    const char z = text[pos];
    if (z == 'Z' && pos + 1 == text.size()) return secs;
    if (z != '+' && z != '-') throw bad();
    const int oh = num(pos + 1, 2);
    std::size_t mpos = pos + 3;
    if (mpos < text.size() && text[mpos] == ':') ++mpos;
    const int om = mpos < text.size() ? num(mpos, 2) : 0;
    if (mpos < text.size() && mpos + 2 != text.size()) throw bad();
    const Timestamp offset = oh * 3600 + om * 60;
    secs += z == '+' ? -offset : offset;
  }
  return secs;
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{t}};
  const auto dp = floor<days>(tp);
  const year_month_day ymd{dp};
  const hh_mm_ss hms{tp - dp};
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02lldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()),
                static_cast<long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()));
  return buf;
}

void Corpus::validate() const {
  std::unordered_set<std::string> cs_ids, bug_ids;
  for (const Changeset& cs : changesets) {
    if (!cs_ids.insert(cs.changeset_id).second) {
      throw Error(ErrorCode::kFormat, "duplicate changeset id " + cs.changeset_id);
    }
  }
  for (const BugReport& b : bugs) {
    if (!bug_ids.insert(b.bug_id).second) {
      throw Error(ErrorCode::kFormat, "duplicate bug id " + b.bug_id);
    }
  }
  for (const GoldLink& l : links) {
    if (!bug_ids.contains(l.bug_id)) {
      throw Error(ErrorCode::kFormat, "link references unknown bug " + l.bug_id);
    }
    if (!cs_ids.contains(l.changeset_id)) {
      throw Error(ErrorCode::kFormat, "link references unknown changeset " + l.changeset_id);
    }
  }
}

const Changeset* Corpus::find_changeset(std::string_view id) const {
  for (const Changeset& cs : changesets) {
    if (cs.changeset_id == id) return &cs;
  }
  return nullptr;
}

const BugReport* Corpus::find_bug(std::string_view id) const {
  for (const BugReport& b : bugs) {
    if (b.bug_id == id) return &b;
  }
  return nullptr;
}

std::unordered_map<std::string, Timestamp> Corpus::bug_dates() const {
  std::unordered_map<std::string, Timestamp> out;
  for (const BugReport& b : bugs) out.emplace(b.bug_id, b.opened_at);
  return out;
}

std::vector<Document> Corpus::documents(Granularity g) const {
  std::vector<Document> out;
  for (const Changeset& cs : changesets) {
    auto docs = explode(cs, g);
    std::move(docs.begin(), docs.end(), std::back_inserter(out));
  }
  return out;
}

namespace {

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormat,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code() == ErrorCode::kMalformedDiff ? e.code() : ErrorCode::kFormat,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

Timestamp json_timestamp(const json& v) {
  if (v.is_number_integer()) return v.get<Timestamp>();
  return parse_timestamp(v.get<std::string>());
}

std::string string_field(const json& obj, const char* key, const char* alt = nullptr) {
  if (obj.contains(key)) return obj.at(key).get<std::string>();
  if (alt != nullptr && obj.contains(alt)) return obj.at(alt).get<std::string>();
  return {};
}

void write_lines(std::ostream& out, const std::vector<json>& rows) {
  for (const json& r : rows) out << r.dump() << '\n';
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  fn(out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

std::vector<Changeset> read_changesets_jsonl(const std::filesystem::path& path) {
  std::vector<Changeset> out;
  for_each_json_line(path, [&](const json& obj) {
    const std::string id = obj.at("id").get<std::string>();
    Changeset cs = parse_unified_diff(string_field(obj, "diff"), id,
                                      string_field(obj, "log", "log_message"));
    if (obj.contains("timestamp")) cs.committed_at = json_timestamp(obj.at("timestamp"));
    out.push_back(std::move(cs));
  });
  return out;
}

std::vector<BugReport> read_bugs_jsonl(const std::filesystem::path& path) {
  std::vector<BugReport> out;
  for_each_json_line(path, [&](const json& obj) {
    BugReport b;
    b.bug_id = obj.at("id").get<std::string>();
    b.summary = string_field(obj, "summary");
    b.description = string_field(obj, "description");
    b.opened_at = json_timestamp(obj.at("opened_at"));
    out.push_back(std::move(b));
  });
  return out;
}

std::vector<GoldLink> read_links_jsonl(const std::filesystem::path& path) {
  std::vector<GoldLink> out;
  for_each_json_line(path, [&](const json& obj) {
    out.push_back({obj.at("bug_id").get<std::string>(),
                   obj.at("changeset_id").get<std::string>()});
  });
  return out;
}

void write_changesets_jsonl(std::ostream& out, std::span<const Changeset> changesets) {
  std::vector<json> rows;
  for (const Changeset& cs : changesets) {
    rows.push_back({{"id", cs.changeset_id},
                    {"log", cs.log_message},
                    {"diff", serialize_unified_diff(cs)},
                    {"timestamp", format_timestamp(cs.committed_at)}});
  }
  write_lines(out, rows);
}

void write_bugs_jsonl(std::ostream& out, std::span<const BugReport> bugs) {
  std::vector<json> rows;
  for (const BugReport& b : bugs) {
    rows.push_back({{"id", b.bug_id},
                    {"summary", b.summary},
                    {"description", b.description},
                    {"opened_at", format_timestamp(b.opened_at)}});
  }
  write_lines(out, rows);
}

void write_links_jsonl(std::ostream& out, std::span<const GoldLink> links) {
  std::vector<json> rows;
  for (const GoldLink& l : links) {
    rows.push_back({{"bug_id", l.bug_id}, {"changeset_id", l.changeset_id}});
  }
  write_lines(out, rows);
}

void write_changesets_jsonl(const std::filesystem::path& path,
                            std::span<const Changeset> changesets) {
  write_file(path, [&](std::ostream& out) { write_changesets_jsonl(out, changesets); });
}

void write_bugs_jsonl(const std::filesystem::path& path, std::span<const BugReport> bugs) {
  write_file(path, [&](std::ostream& out) { write_bugs_jsonl(out, bugs); });
}

void write_links_jsonl(const std::filesystem::path& path, std::span<const GoldLink> links) {
  write_file(path, [&](std::ostream& out) { write_links_jsonl(out, links); });
}

Corpus load_corpus(const std::filesystem::path& dir) {
  Corpus c;
  c.changesets = read_changesets_jsonl(dir / "changesets.jsonl");
  c.bugs = read_bugs_jsonl(dir / "bugs.jsonl");
  c.links = read_links_jsonl(dir / "links.jsonl");
  c.validate();
  return c;
}

void save_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
  std::filesystem::create_directories(dir);
  write_changesets_jsonl(dir / "changesets.jsonl", corpus.changesets);
  write_bugs_jsonl(dir / "bugs.jsonl", corpus.bugs);
  write_links_jsonl(dir / "links.jsonl", corpus.links);
}

}  // namespace fbl
