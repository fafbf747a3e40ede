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
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fbl/store.hpp"
#include "support/synthetic.hpp"

namespace fbl {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  static fs::path root() { return fs::temp_directory_path() / "fbl_cli_test"; }
  static fs::path session() { return root() / "session"; }

  static Outcome run(const std::string& args) {
    const fs::path err_path = root() / "stderr.txt";
    const std::string cmd = std::string(FBL_CLI_PATH) + " " + args + " 2>" + err_path.string();
    Outcome r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read_file(err_path);
    return r;
  }

  static std::vector<json> lines(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) out.push_back(json::parse(line));
    }
    return out;
  }

  static void SetUpTestSuite() {
    fs::remove_all(root());
    fs::create_directories(root() / "corpus");
    testing::PlantedParams p;
    p.bugs = 16;
    p.distractor_changesets = 16;
    p.chatter_per_bug = 0;
    planted_ = new testing::PlantedCorpus(testing::planted_corpus(p));
    save_corpus(root() / "corpus", planted_->corpus);
    std::ofstream(root() / "vocab.txt") << planted_->vocab.serialize();

    const Outcome ingest = run("ingest " + (root() / "corpus").string() + " --session " + session().string());
    ASSERT_EQ(ingest.code, 0) << ingest.err;
    const Outcome index = run("index --session " + session().string() + " --vocab " + (root() / "vocab.txt").string() +
                              " --d-in 64 --d-out 32 --partitions 8 --subspaces 8 --codewords 16 --seed 3");
    ASSERT_EQ(index.code, 0) << index.err;
  }

  static void TearDownTestSuite() {
    delete planted_;
    planted_ = nullptr;
    fs::remove_all(root());
  }

  std::string s() const { return " --session " + session().string(); }

  static testing::PlantedCorpus* planted_;
};

testing::PlantedCorpus* Cli::planted_ = nullptr;

TEST_F(Cli, ExhaustiveTwoStageEqualsExact) {
  const Outcome exact = run("query --all-bugs --exact" + s());
  const Outcome two = run("query --all-bugs --nprobe 8 --candidates all" + s());
  ASSERT_EQ(exact.code, 0) << exact.err;
  ASSERT_EQ(two.code, 0) << two.err;
  EXPECT_FALSE(exact.out.empty());
  EXPECT_EQ(two.out, exact.out);
}

TEST_F(Cli, TopkOneGivesOneLine) {
  const Outcome r = run("query --bug BUG-1003 --topk 1" + s());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0]["rank"], 1);
  EXPECT_EQ(rows[0]["bug_id"], "BUG-1003");
}

TEST_F(Cli, PlantedHunkChangesetRanksFirst) {
  for (const auto& [bug, doc] : planted_->planted) {
    const Outcome r = run("query --bug " + bug + " --topk 3 --aggregate max" + s());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows[0]["changeset_id"], changeset_of_doc_id(doc)) << bug;
  }
}

TEST_F(Cli, TextQueryAndTrecFormat) {
  const BugReport& b = planted_->corpus.bugs[5];
  const Outcome r = run("query --text '" + b.query_text() + "' --topk 2 --format trec" + s());
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string bug, q0, doc, tag;
  int rank = 0;
  double score = 0;
  ASSERT_TRUE(in >> bug >> q0 >> doc >> rank >> score >> tag);
  EXPECT_EQ(q0, "Q0");
  EXPECT_EQ(rank, 1);
  EXPECT_EQ(changeset_of_doc_id(doc), "c5");
}

TEST_F(Cli, EvaluateReportsMetrics) {
  const Outcome q = run("query --all-bugs --topk 10" + s());
  ASSERT_EQ(q.code, 0) << q.err;
  const fs::path runs = root() / "run.jsonl";
  std::ofstream(runs) << q.out;
  const Outcome e = run("evaluate " + runs.string() + s());
  ASSERT_EQ(e.code, 0) << e.err;
  const json rep = json::parse(e.out);
  EXPECT_EQ(rep["overall"]["bugs"], 16);
  EXPECT_DOUBLE_EQ(rep["overall"]["MRR"].get<double>(), 1.0);
  EXPECT_TRUE(rep.contains("categories"));
}

TEST_F(Cli, DeterministicAcrossRuns) {
  const Outcome a = run("query --all-bugs --topk 5" + s());
  const Outcome b = run("query --all-bugs --topk 5" + s());
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, ExitCodes) {
  const Outcome usage = run("query --bogus-flag" + s());
  EXPECT_EQ(usage.code, 1);

  const Outcome no_session = run("query --text x --session " + (root() / "missing").string());
  EXPECT_EQ(no_session.code, 2);
  const json err = json::parse(no_session.err);
  EXPECT_TRUE(err.contains("error"));
  EXPECT_TRUE(err.contains("message"));

  const Outcome mismatch = run("query --text x --partitions 7" + s());
  EXPECT_EQ(mismatch.code, 2);
  EXPECT_EQ(json::parse(mismatch.err)["error"], "ConfigMismatch");

  const Outcome bad_value = run("query --text x --candidates many" + s());
  EXPECT_EQ(bad_value.code, 1);

  const Outcome unknown_bug = run("query --bug NOPE" + s());
  EXPECT_NE(unknown_bug.code, 0);
}

TEST_F(Cli, EncodeText) {
  const Outcome r = run("encode --text 'hello world' --query-limit 8 --vocab " + (root() / "vocab.txt").string() + s());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0]["tokens"].size(), 8u);
  EXPECT_EQ(rows[0]["tokens"][0], "[CLS]");
}

}  // namespace
}  // namespace fbl
