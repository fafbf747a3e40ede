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
#include "fbl/encode.hpp"

#include <fstream>

#include "fbl/error.hpp"

namespace fbl {
namespace {

constexpr const char* kSpecialNames[] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[Q]",
                                         "[D]",   "[A]",   "[R]",   "[C]"};

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(unsigned char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

char to_lower(unsigned char c) {
  return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

bool is_utf8_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Splits on whitespace and punctuation; `keep` decides whether a punctuation
// character is emitted as a token.
template <typename Keep>
std::vector<std::string> split_words(std::string_view text, Keep keep) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_space(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      if (keep(c)) out.emplace_back(1, ch);
    } else {
      cur.push_back(ch);
    }
  }
  flush();
  return out;
}

void split_identifier(std::string_view word, std::vector<std::string>& out) {
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < word.size(); ++i) {
    const auto c = static_cast<unsigned char>(word[i]);
    if (!cur.empty()) {
      const auto p = static_cast<unsigned char>(word[i - 1]);
      const bool next_lower = i + 1 < word.size() && is_lower(static_cast<unsigned char>(word[i + 1]));
      const bool boundary = (is_lower(p) && is_upper(c)) ||
                            (is_upper(p) && is_upper(c) && next_lower) ||
                            (is_digit(p) != is_digit(c) && (is_digit(p) || is_digit(c)));
      if (boundary) flush();
    }
    cur.push_back(to_lower(c));
  }
  flush();
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = to_lower(static_cast<unsigned char>(c));
  return out;
}

void append_text(std::string_view text, const Vocabulary& vocab, std::vector<TokenId>& out) {
  for (const std::string& w : code_split(text)) wordpiece_word(w, vocab, out);
}

EncodedSequence finalize(std::vector<TokenId> stream, const Vocabulary& vocab,
                         std::size_t limit) {
  const SpecialTokens& sp = vocab.specials();
  if (stream.size() > limit - 1) stream.resize(limit - 1);
  stream.push_back(sp.sep);
  EncodedSequence seq;
  seq.real_length = stream.size();
  seq.limit = limit;
  stream.resize(limit, sp.pad);
  seq.ids = std::move(stream);
  return seq;
}

TokenId marker_for(LineKind k, const SpecialTokens& sp) {
  switch (k) {
    case LineKind::kAdded:
      return sp.added;
    case LineKind::kRemoved:
      return sp.removed;
    case LineKind::kContext:
      return sp.context;
  }
  return sp.context;
}

}  // namespace

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], static_cast<TokenId>(i)).second) {
      throw Error(ErrorCode::kFormat, "duplicate vocabulary token '" + v.tokens_[i] + "'");
    }
  }
  for (const char* name : kSpecialNames) {
    if (!v.index_.contains(name)) {
      v.index_.emplace(name, static_cast<TokenId>(v.tokens_.size()));
      v.tokens_.emplace_back(name);
      v.synthesized_.emplace_back(name);
    }
  }
  auto id = [&](const char* name) { return v.index_.at(name); };
  v.specials_ = {id("[CLS]"), id("[SEP]"), id("[PAD]"), id("[UNK]"), id("[Q]"),
                 id("[D]"),   id("[A]"),   id("[R]"),   id("[C]")};
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open vocabulary " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(std::move(line));
  }
  return from_tokens(std::move(tokens));
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (const std::string& t : tokens_) {
    out += t;
    out += '\n';
  }
  return out;
}

std::vector<std::string> basic_split(std::string_view text) {
  auto words = split_words(text, [](unsigned char) { return true; });
  for (std::string& w : words) w = lower(w);
  return words;
}

std::vector<std::string> code_split(std::string_view text) {
  std::vector<std::string> out;
  for (const std::string& w : split_words(text, [](unsigned char c) { return c != '_'; })) {
    if (w.size() == 1 && is_punct(static_cast<unsigned char>(w[0]))) {
      out.push_back(w);
    } else {
      split_identifier(w, out);
    }
  }
  return out;
}

void wordpiece_word(std::string_view word, const Vocabulary& vocab, std::vector<TokenId>& out) {
  const std::size_t mark = out.size();
  std::size_t start = 0;
  std::string candidate;
  while (start < word.size()) {
    std::size_t end = std::min(word.size(), start + Vocabulary::kMaxSubwordChars);
    std::optional<TokenId> match;
    while (end > start) {
      if (end < word.size() && is_utf8_continuation(static_cast<unsigned char>(word[end]))) {
        --end;
        continue;
      }
      candidate.assign(start > 0 ? "##" : "");
      candidate.append(word.substr(start, end - start));
      match = vocab.find(candidate);
      if (match) break;
      --end;
    }
    if (!match) {
      out.resize(mark);
      out.push_back(vocab.specials().unk);
      return;
    }
    out.push_back(*match);
    start = end;
  }
}

std::vector<std::string> wordpiece_tokenize(std::string_view text, const Vocabulary& vocab) {
  std::vector<TokenId> ids;
  for (const std::string& w : basic_split(text)) wordpiece_word(w, vocab, ids);
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(vocab.token(id));
  return out;
}

std::vector<TokenId> tokenize_ids(std::string_view text, const Vocabulary& vocab) {
  std::vector<TokenId> ids;
  append_text(text, vocab, ids);
  return ids;
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kD:
      return "d";
    case Strategy::kArc:
      return "arc";
    case Strategy::kArcL:
      return "arcl";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  const std::string n = lower(name);
  if (n == "d") return Strategy::kD;
  if (n == "arc") return Strategy::kArc;
  if (n == "arcl" || n == "arc_l") return Strategy::kArcL;
  throw Error(ErrorCode::kInvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

std::size_t LengthLimits::for_granularity(Granularity g) const {
  switch (g) {
    case Granularity::kChangeset:
      return changeset;
    case Granularity::kChangesetFile:
      return file;
    case Granularity::kHunk:
      return hunk;
  }
  return hunk;
}

EncodedSequence encode_document(const Document& doc, Strategy strategy,
                                const Vocabulary& vocab, std::size_t limit) {
  if (limit < 4) throw Error(ErrorCode::kInvalidArgument, "document limit must be >= 4");
  const SpecialTokens& sp = vocab.specials();
  std::vector<TokenId> stream{sp.cls};
  // Anything past limit - 1 is truncated, so tokenizing can stop there.
  auto full = [&] { return stream.size() >= limit; };

  switch (strategy) {
    case Strategy::kD:
      stream.push_back(sp.document);
      for_each_line(doc, [&](const DiffLine& l) {
        if (!full()) append_text(l.text, vocab, stream);
      });
      break;
    case Strategy::kArc:
      for (const LineKind kind : {LineKind::kAdded, LineKind::kRemoved, LineKind::kContext}) {
        if (full()) break;
        stream.push_back(marker_for(kind, sp));
        for_each_line(doc, [&](const DiffLine& l) {
          if (l.kind == kind && !full()) append_text(l.text, vocab, stream);
        });
      }
      break;
    case Strategy::kArcL: {
      std::optional<LineKind> prev;
      for_each_line(doc, [&](const DiffLine& l) {
        if (full()) return;
        if (!prev || *prev != l.kind) stream.push_back(marker_for(l.kind, sp));
        prev = l.kind;
        append_text(l.text, vocab, stream);
      });
      break;
    }
  }
  return finalize(std::move(stream), vocab, limit);
}

EncodedSequence encode_query_text(std::string_view text, const Vocabulary& vocab,
                                  std::size_t limit) {
  if (limit < 3) throw Error(ErrorCode::kInvalidArgument, "query limit must be >= 3");
  const SpecialTokens& sp = vocab.specials();
  std::vector<TokenId> stream{sp.cls, sp.query};
  append_text(text, vocab, stream);
  return finalize(std::move(stream), vocab, limit);
}

EncodedSequence encode_query(const BugReport& report, const Vocabulary& vocab,
                             std::size_t limit) {
  return encode_query_text(report.query_text(), vocab, limit);
}

}  // namespace fbl
