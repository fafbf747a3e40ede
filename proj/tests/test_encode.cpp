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
#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fbl/encode.hpp"
#include "fbl/error.hpp"
#include "support/synthetic.hpp"

namespace fbl {
namespace {

const Vocabulary& vocab() {
  static const Vocabulary v = Vocabulary::load(std::string(FBL_TEST_DATA) + "/vocab.txt");
  return v;
}

std::vector<std::string> names(const EncodedSequence& s) {
  std::vector<std::string> out;
  for (TokenId id : s.ids) out.push_back(vocab().token(id));
  return out;
}

std::vector<std::string> with_pads(std::vector<std::string> real, std::size_t limit) {
  real.resize(limit, "[PAD]");
  return real;
}

Document hunk_doc(const Hunk& h) {
  return Document{"c:0:0", "c", Granularity::kHunk, h};
}

Hunk four_line_hunk() {
  Hunk h;
  h.lines = {{LineKind::kContext, "a"}, {LineKind::kAdded, "b"}, {LineKind::kAdded, "c"}, {LineKind::kRemoved, "d"}};
  return h;
}

TEST(WordPiece, SplitsIntoLongestSubwords) {
  EXPECT_EQ(wordpiece_tokenize("ManagerServlet", vocab()), (std::vector<std::string>{"manager", "##servlet"}));
}

TEST(WordPiece, ExactMatch) {
  EXPECT_EQ(wordpiece_tokenize("manager", vocab()), (std::vector<std::string>{"manager"}));
}

TEST(WordPiece, UnknownWord) {
  EXPECT_EQ(wordpiece_tokenize("zzz", vocab()), (std::vector<std::string>{"[UNK]"}));
}

TEST(WordPiece, PunctuationStandsAlone) {
  EXPECT_EQ(wordpiece_tokenize("x=(null);", vocab()),
            (std::vector<std::string>{"x", "=", "(", "null", ")", ";"}));
}

TEST(WordPiece, PrefixStable) {
  const std::vector<std::string> words{"manager", "servers", "crash", "qq", "save", "managerservlet"};
  for (const auto& w : words) {
    for (const auto& x : words) {
      auto left = wordpiece_tokenize(w, vocab());
      const auto right = wordpiece_tokenize(x, vocab());
      left.insert(left.end(), right.begin(), right.end());
      EXPECT_EQ(wordpiece_tokenize(w + " " + x, vocab()), left) << w << " " << x;
    }
  }
}

TEST(CodeSplit, CamelAcronymDigitsAndUnderscore) {
  EXPECT_EQ(code_split("getHTTPServer2 null_pointer"),
            (std::vector<std::string>{"get", "http", "server", "2", "null", "pointer"}));
}

TEST(Vocab, SpecialsAppendedWhenMissing) {
  const Vocabulary v = Vocabulary::from_tokens({"a", "[CLS]", "b"});
  EXPECT_EQ(v.find("[CLS]"), TokenId{1});
  EXPECT_TRUE(v.find("[SEP]").has_value());
  EXPECT_TRUE(v.find("[PAD]").has_value());
  EXPECT_EQ(v.synthesized().size(), 8u);
  EXPECT_GE(*v.find("[SEP]"), TokenId{3});
  const SpecialTokens& sp = v.specials();
  std::vector<TokenId> ids{sp.pad, sp.unk, sp.cls, sp.sep, sp.query, sp.document, sp.added, sp.removed, sp.context};
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(std::adjacent_find(ids.begin(), ids.end()), ids.end());
}

TEST(Vocab, RejectsDuplicates) {
  EXPECT_THROW(Vocabulary::from_tokens({"a", "a"}), Error);
}

TEST(Vocab, FixtureHasAllSpecials) { EXPECT_TRUE(vocab().synthesized().empty()); }

TEST(EncodeDocument, ArcLGolden) {
  const auto s = encode_document(hunk_doc(four_line_hunk()), Strategy::kArcL, vocab(), 12);
  EXPECT_EQ(names(s), with_pads({"[CLS]", "[C]", "a", "[A]", "b", "c", "[R]", "d", "[SEP]"}, 12));
  EXPECT_EQ(s.real_length, 9u);
}

TEST(EncodeDocument, ArcGolden) {
  const auto s = encode_document(hunk_doc(four_line_hunk()), Strategy::kArc, vocab(), 12);
  EXPECT_EQ(names(s), with_pads({"[CLS]", "[A]", "b", "c", "[R]", "d", "[C]", "a", "[SEP]"}, 12));
}

TEST(EncodeDocument, DGolden) {
  const auto s = encode_document(hunk_doc(four_line_hunk()), Strategy::kD, vocab(), 12);
  EXPECT_EQ(names(s), with_pads({"[CLS]", "[D]", "a", "b", "c", "d", "[SEP]"}, 12));
}

TEST(EncodeDocument, ArcEmitsMarkersForEmptyGroups) {
  Hunk h;
  h.lines = {{LineKind::kAdded, "b"}};
  const auto s = encode_document(hunk_doc(h), Strategy::kArc, vocab(), 8);
  EXPECT_EQ(names(s), with_pads({"[CLS]", "[A]", "b", "[R]", "[C]", "[SEP]"}, 8));
}

TEST(EncodeDocument, TruncationKeepsSep) {
  const auto s = encode_document(hunk_doc(four_line_hunk()), Strategy::kArcL, vocab(), 5);
  EXPECT_EQ(names(s), (std::vector<std::string>{"[CLS]", "[C]", "a", "[A]", "[SEP]"}));
  EXPECT_EQ(s.real_length, 5u);
}

TEST(EncodeDocument, LimitBelowFourRejected) {
  EXPECT_THROW(encode_document(hunk_doc(four_line_hunk()), Strategy::kD, vocab(), 3), Error);
}

TEST(EncodeQuery, EmptyReport) {
  const auto s = encode_query(BugReport{"b", "", "", 0}, vocab(), 6);
  EXPECT_EQ(names(s), with_pads({"[CLS]", "[Q]", "[SEP]"}, 6));
  EXPECT_EQ(s.real_length, 3u);
}

TEST(EncodeQuery, CrashOnSave) {
  const auto s = encode_query(BugReport{"b", "crash on save", "", 0}, vocab(), 8);
  EXPECT_EQ(names(s), with_pads({"[CLS]", "[Q]", "crash", "on", "save", "[SEP]"}, 8));
}

TEST(EncodeQuery, SummaryAndDescriptionBothUsed) {
  const auto s = encode_query(BugReport{"b", "crash", "on save", 0}, vocab(), 8);
  EXPECT_EQ(names(s), with_pads({"[CLS]", "[Q]", "crash", "on", "save", "[SEP]"}, 8));
}

TEST(EncodeQuery, LongReportTruncated) {
  std::string text;
  for (int i = 0; i < 100; ++i) text += "null pointer ";
  const auto s = encode_query(BugReport{"b", text, "", 0}, vocab(), 16);
  ASSERT_EQ(s.ids.size(), 16u);
  EXPECT_EQ(s.real_length, 16u);
  EXPECT_EQ(vocab().token(s.ids.back()), "[SEP]");
}

TEST(EncodeQuery, LimitBelowThreeRejected) {
  EXPECT_THROW(encode_query(BugReport{"b", "x", "", 0}, vocab(), 2), Error);
}

void check_shape(const EncodedSequence& s, std::size_t limit) {
  const auto& sp = vocab().specials();
  ASSERT_EQ(s.ids.size(), limit);
  ASSERT_EQ(s.limit, limit);
  EXPECT_EQ(s.ids[0], sp.cls);
  EXPECT_EQ(std::count(s.ids.begin(), s.ids.end(), sp.cls), 1);
  const auto real_end = s.ids.begin() + static_cast<std::ptrdiff_t>(s.real_length);
  EXPECT_EQ(std::count(s.ids.begin(), real_end, sp.sep), 1);
  EXPECT_EQ(*(real_end - 1), sp.sep);
  EXPECT_EQ(std::count(s.ids.begin(), real_end, sp.pad), 0);
  EXPECT_TRUE(std::all_of(real_end, s.ids.end(), [&](TokenId t) { return t == sp.pad; }));
}

std::multiset<TokenId> content(const EncodedSequence& s) {
  const auto& sp = vocab().specials();
  std::multiset<TokenId> out;
  for (std::size_t i = 0; i < s.real_length; ++i) {
    const TokenId t = s.ids[i];
    if (t == sp.cls || t == sp.sep || t == sp.document || t == sp.added || t == sp.removed || t == sp.context) continue;
    out.insert(t);
  }
  return out;
}

TEST(EncodeProperties, ShapeMultisetAndMarkerCount) {
  std::mt19937_64 rng(99);
  const auto& sp = vocab().specials();
  for (int t = 0; t < 100; ++t) {
    const Hunk h = testing::random_hunk(rng, 1 + t % 12);
    const Document doc = hunk_doc(h);
    const auto d = encode_document(doc, Strategy::kD, vocab(), 64);
    const auto arc = encode_document(doc, Strategy::kArc, vocab(), 64);
    const auto arcl = encode_document(doc, Strategy::kArcL, vocab(), 64);
    check_shape(d, 64);
    check_shape(arc, 64);
    check_shape(arcl, 64);
    EXPECT_EQ(content(arc), content(d));
    EXPECT_EQ(content(arcl), content(d));
    const auto markers = std::count_if(arcl.ids.begin(), arcl.ids.end(),
                                       [&](TokenId x) { return x == sp.added || x == sp.removed || x == sp.context; });
    EXPECT_EQ(static_cast<std::size_t>(markers), testing::kind_transitions(h));

    for (std::size_t limit : {4u, 5u, 7u, 10u}) check_shape(encode_document(doc, Strategy::kArcL, vocab(), limit), limit);
  }
}

TEST(EncodeProperties, Deterministic) {
  std::mt19937_64 rng(5);
  const Hunk h = testing::random_hunk(rng, 9);
  EXPECT_EQ(encode_document(hunk_doc(h), Strategy::kArcL, vocab(), 32).ids,
            encode_document(hunk_doc(h), Strategy::kArcL, vocab(), 32).ids);
}

TEST(LengthLimits, Defaults) {
  const LengthLimits l;
  EXPECT_EQ(l.query, 256u);
  EXPECT_EQ(l.for_granularity(Granularity::kHunk), 256u);
  EXPECT_EQ(l.for_granularity(Granularity::kChangesetFile), 512u);
  EXPECT_EQ(l.for_granularity(Granularity::kChangeset), 512u);
}

TEST(Strategy, Names) {
  EXPECT_EQ(parse_strategy("arcl"), Strategy::kArcL);
  EXPECT_EQ(parse_strategy("arc"), Strategy::kArc);
  EXPECT_EQ(parse_strategy("d"), Strategy::kD);
  EXPECT_THROW(parse_strategy("x"), Error);
}

}  // namespace
}  // namespace fbl
