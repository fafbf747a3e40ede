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
#include "fbl/eval.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "fbl/error.hpp"

namespace fbl {

Qrels make_qrels(std::span<const GoldLink> links) {
  Qrels q;
  for (const GoldLink& l : links) q[l.bug_id].insert(l.changeset_id);
  return q;
}

double reciprocal_rank(const RankedResult& result, const RelevantSet& relevant) {
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    if (relevant.count(result.entries[i].changeset_id)) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double average_precision(const RankedResult& result, const RelevantSet& relevant) {
  if (relevant.empty()) return 0.0;
  std::set<std::string> found;
  double sum = 0.0;
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const std::string& cs = result.entries[i].changeset_id;
    if (!relevant.count(cs) || !found.insert(cs).second) continue;
    sum += static_cast<double>(found.size()) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(relevant.size());
}

double precision_at_k(const RankedResult& result, const RelevantSet& relevant, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "precision cutoff must be >= 1");
  std::set<std::string> found;
  const std::size_t n = std::min(k, result.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& cs = result.entries[i].changeset_id;
    if (relevant.count(cs)) found.insert(cs);
  }
  return static_cast<double>(found.size()) / static_cast<double>(k);
}

namespace {

template <typename Fn>
double mean_over_bugs(const RunSet& runs, const Qrels& qrels, Fn fn) {
  if (qrels.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [bug, relevant] : qrels) {
    const auto it = runs.find(bug);
    if (it != runs.end()) sum += fn(it->second, relevant);
  }
  return sum / static_cast<double>(qrels.size());
}

}  // namespace

double mrr(const RunSet& runs, const Qrels& qrels) {
  return mean_over_bugs(runs, qrels, reciprocal_rank);
}

double mean_average_precision(const RunSet& runs, const Qrels& qrels) {
  return mean_over_bugs(runs, qrels, average_precision);
}

double mean_precision_at_k(const RunSet& runs, const Qrels& qrels, std::size_t k) {
  return mean_over_bugs(runs, qrels, [k](const RankedResult& r, const RelevantSet& rel) {
    return precision_at_k(r, rel, k);
  });
}

std::string_view category_name(BugCategory c) {
  switch (c) {
    case BugCategory::kNotLocalized: return "NL";
    case BugCategory::kPartiallyLocalized: return "PL";
    case BugCategory::kFullyLocalized: return "FL";
  }
  return "?";
}

std::string class_name_of_path(std::string_view path) {
  const std::size_t slash = path.find_last_of("/\\");
  std::string_view base = slash == std::string_view::npos ? path : path.substr(slash + 1);
  const std::size_t dot = base.rfind('.');
  if (dot != std::string_view::npos && dot > 0) base = base.substr(0, dot);
  return std::string(base);
}

std::set<std::string> gold_class_names(const Corpus& corpus, std::string_view bug_id) {
  std::set<std::string> names;
  for (const GoldLink& l : corpus.links) {
    if (l.bug_id != bug_id) continue;
    const Changeset* cs = corpus.find_changeset(l.changeset_id);
    if (!cs) continue;
    for (const FileDiff& f : cs->files) {
      std::string name = class_name_of_path(f.path);
      if (!name.empty()) names.insert(std::move(name));
    }
  }
  return names;
}

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

}  // namespace

// '.' is not an identifier character, so `Name.java` and `pkg.Name` match
// through the ordinary boundary test.
bool mentions_class(std::string_view text, std::string_view name) {
  if (name.empty()) return false;
  for (std::size_t pos = text.find(name); pos != std::string_view::npos;
       pos = text.find(name, pos + 1)) {
    const bool left = pos == 0 || !ident_char(text[pos - 1]);
    const std::size_t end = pos + name.size();
    const bool right = end == text.size() || !ident_char(text[end]);
    if (left && right) return true;
  }
  return false;
}

BugCategory categorize(const BugReport& report, const std::set<std::string>& gold_names) {
  if (gold_names.empty()) {
    throw Error(ErrorCode::kEmptyGoldSet, "bug " + report.bug_id + " has no gold class names");
  }
  const std::string text = report.query_text();
  std::size_t hits = 0;
  for (const std::string& name : gold_names) hits += mentions_class(text, name) ? 1 : 0;
  if (hits == 0) return BugCategory::kNotLocalized;
  if (hits == gold_names.size()) return BugCategory::kFullyLocalized;
  return BugCategory::kPartiallyLocalized;
}

MetricSet compute_metrics(const RunSet& runs, const Qrels& qrels) {
  MetricSet m;
  m.bugs = qrels.size();
  m.mrr = mrr(runs, qrels);
  m.map = mean_average_precision(runs, qrels);
  m.p1 = mean_precision_at_k(runs, qrels, 1);
  m.p3 = mean_precision_at_k(runs, qrels, 3);
  m.p5 = mean_precision_at_k(runs, qrels, 5);
  return m;
}

nlohmann::json to_json(const MetricSet& m) {
  return {{"bugs", m.bugs}, {"MRR", m.mrr}, {"MAP", m.map},
          {"P@1", m.p1},    {"P@3", m.p3},  {"P@5", m.p5}};
}

nlohmann::json metrics_report(const RunSet& runs, const Qrels& qrels, const Corpus* corpus) {
  RunSet collapsed;
  for (const auto& [bug, result] : runs) collapsed.emplace(bug, aggregate_to_changeset(result));

  nlohmann::json report;
  report["overall"] = to_json(compute_metrics(collapsed, qrels));
  if (!corpus) return report;

  std::map<std::string, Qrels> groups;
  nlohmann::json per_bug = nlohmann::json::object();
  std::size_t uncategorized = 0;
  for (const auto& [bug, relevant] : qrels) {
    const BugReport* br = corpus->find_bug(bug);
    const std::set<std::string> names =
        br ? gold_class_names(*corpus, bug) : std::set<std::string>{};
    if (!br || names.empty()) {
      ++uncategorized;
      continue;
    }
    const BugCategory c = categorize(*br, names);
    const std::string cname(category_name(c));
    per_bug[bug] = cname;
    groups[cname].emplace(bug, relevant);
    if (c != BugCategory::kFullyLocalized) groups["NL+PL"].emplace(bug, relevant);
  }
  nlohmann::json cats = nlohmann::json::object();
  for (const char* name : {"NL", "PL", "FL", "NL+PL"}) {
    cats[name] = to_json(compute_metrics(collapsed, groups[name]));
  }
  report["categories"] = std::move(cats);
  report["bug_categories"] = std::move(per_bug);
  report["uncategorized"] = uncategorized;
  return report;
}

namespace {

[[noreturn]] void bad_run(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

RunSet read_run(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open run file " + path.string());
  RunSet runs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    RankedEntry e;
    std::string bug;
    if (line[first] == '{') {
      try {
        const auto row = nlohmann::json::parse(line);
        bug = row.at("bug_id").get<std::string>();
        e.doc_id = row.at("doc_id").get<std::string>();
        e.changeset_id = row.contains("changeset_id") ? row["changeset_id"].get<std::string>()
                                                      : changeset_of_doc_id(e.doc_id);
        e.score = row.at("score").get<double>();
      } catch (const nlohmann::json::exception& ex) {
        bad_run(path, lineno, ex.what());
      }
    } else {
      std::istringstream fields(line);
      std::string q0, tag;
      std::size_t rank = 0;
      if (!(fields >> bug >> q0 >> e.doc_id >> rank >> e.score >> tag)) {
        bad_run(path, lineno, "expected 'bug_id Q0 doc_id rank score tag'");
      }
      e.changeset_id = changeset_of_doc_id(e.doc_id);
    }
    RankedResult& r = runs[bug];
    r.bug_id = bug;
    r.entries.push_back(std::move(e));
  }
  for (auto& [bug, r] : runs) sort_entries(r.entries);
  return runs;
}

}  // namespace fbl
