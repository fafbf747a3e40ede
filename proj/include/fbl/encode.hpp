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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fbl/corpus.hpp"

namespace fbl {

using TokenId = std::int32_t;

struct SpecialTokens {
  TokenId cls = -1;
  TokenId sep = -1;
  TokenId pad = -1;
  TokenId unk = -1;
  TokenId query = -1;    // [Q]
  TokenId document = -1; // [D]
  TokenId added = -1;    // [A]
  TokenId removed = -1;  // [R]
  TokenId context = -1;  // [C]
};

/// Token <-> id table in WordPiece layout: one token per line, id = line
/// number, continuation pieces prefixed with `##`. Immutable after load.
class Vocabulary {
 public:
  static constexpr std::size_t kMaxSubwordChars = 100;

  /// Missing special tokens are appended after the file's tokens.
  static Vocabulary load(const std::filesystem::path& path);
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const SpecialTokens& specials() const { return specials_; }

  /// Special tokens that were not in the source and got synthetic ids.
  const std::vector<std::string>& synthesized() const { return synthesized_; }

  /// Tokens joined with '\n', the canonical form used for hashing/saving.
  std::string serialize() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  SpecialTokens specials_;
  std::vector<std::string> synthesized_;
};

/// Whitespace split, ASCII punctuation as standalone tokens, lowercased.
std::vector<std::string> basic_split(std::string_view text);

/// basic_split plus identifier splitting: `_` separates, and camelCase,
/// acronym (`HTTPServer`) and letter/digit boundaries start a new word.
std::vector<std::string> code_split(std::string_view text);

/// Greedy longest-match-first WordPiece over basic_split(text). A word with
/// no full decomposition becomes a single [UNK].
std::vector<std::string> wordpiece_tokenize(std::string_view text, const Vocabulary& vocab);

/// Pieces of a single already-split word, as ids.
void wordpiece_word(std::string_view word, const Vocabulary& vocab, std::vector<TokenId>& out);

/// code_split followed by WordPiece; the pipeline used for documents and
/// queries.
std::vector<TokenId> tokenize_ids(std::string_view text, const Vocabulary& vocab);

enum class Strategy : std::uint8_t { kD, kArc, kArcL };

std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);

struct EncodedSequence {
  std::vector<TokenId> ids;     // exactly `limit` entries
  std::size_t real_length = 0;  // tokens before the first [PAD]
  std::size_t limit = 0;
};

struct LengthLimits {
  std::size_t query = 256;
  std::size_t hunk = 256;
  std::size_t file = 512;
  std::size_t changeset = 512;

  std::size_t for_granularity(Granularity g) const;
};

EncodedSequence encode_document(const Document& doc, Strategy strategy,
                                const Vocabulary& vocab, std::size_t limit);

EncodedSequence encode_query(const BugReport& report, const Vocabulary& vocab,
                             std::size_t limit);

/// [CLS] [Q] tokens(text) [SEP] for free text queries.
EncodedSequence encode_query_text(std::string_view text, const Vocabulary& vocab,
                                  std::size_t limit);

}  // namespace fbl
