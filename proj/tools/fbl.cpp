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

// fbl: command-line driver for ingest, encode, train, index, query,
// evaluate and bench.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbl/corpus.hpp"
#include "fbl/embed.hpp"
#include "fbl/encode.hpp"
#include "fbl/error.hpp"
#include "fbl/eval.hpp"
#include "fbl/index.hpp"
#include "fbl/retrieve.hpp"
#include "fbl/simd/kernels.hpp"
#include "fbl/store.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct Options {
  std::string session;
  std::string granularity = "hunk";
  std::string strategy = "arcl";
  std::string vocab;
  std::string embedder = "hash";
  std::string projection;
  std::uint64_t seed = 42;
  std::size_t d_in = 768;
  std::size_t d_out = 128;
  std::size_t query_limit = 256;
  std::size_t doc_limit = 0;  // 0: by granularity
  std::uint32_t partitions = 320;
  std::uint32_t subspaces = 16;
  std::uint32_t codewords = 256;
  std::size_t nprobe = 16;
  std::string candidates = "1000";
  std::size_t topk = 1000;
  bool exact = false;
};

fs::path session_dir(const Options& o) {
  if (!o.session.empty()) return o.session;
  if (const char* env = std::getenv("FBL_SESSION"); env && *env) return env;
  throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "no session directory: pass --session or set FBL_SESSION");
}

fs::path corpus_dir(const Options& o) { return session_dir(o) / fbl::session_files::kCorpus; }

fbl::Corpus session_corpus(const Options& o) {
  const fs::path dir = corpus_dir(o);
  if (!fs::exists(dir / "changesets.jsonl")) {
    throw fbl::Error(fbl::ErrorCode::kIo, "session has no ingested corpus at " + dir.string());
  }
  return fbl::load_corpus(dir);
}

fbl::Vocabulary resolve_vocab(const Options& o) {
  if (!o.vocab.empty()) return fbl::Vocabulary::load(o.vocab);
  const fs::path stored = session_dir(o) / fbl::session_files::kVocab;
  if (fs::exists(stored)) return fbl::Vocabulary::load(stored);
  throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "no vocabulary: pass --vocab");
}

std::size_t doc_limit(const Options& o, fbl::Granularity g) {
  if (o.doc_limit) return o.doc_limit;
  return fbl::LengthLimits{}.for_granularity(g);
}

std::vector<std::string> names_of(const std::vector<fbl::TokenId>& ids, const fbl::Vocabulary& v) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (fbl::TokenId id : ids) out.push_back(v.token(id));
  return out;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Options& o, const std::string& from, const std::string& changesets,
               const std::string& bugs, const std::string& links) {
  fbl::Corpus c;
  if (!from.empty()) {
    c = fbl::load_corpus(from);
  } else {
    if (changesets.empty() || bugs.empty() || links.empty()) {
      throw fbl::Error(fbl::ErrorCode::kInvalidArgument,
                       "ingest needs a corpus directory or all of --changesets --bugs --links");
    }
    c.changesets = fbl::read_changesets_jsonl(changesets);
    c.bugs = fbl::read_bugs_jsonl(bugs);
    c.links = fbl::read_links_jsonl(links);
    c.validate();
  }
  fbl::save_corpus(corpus_dir(o), c);
  std::size_t hunks = 0;
  for (const auto& cs : c.changesets) {
    for (const auto& f : cs.files) hunks += f.hunks.size();
  }
  std::cout << json{{"changesets", c.changesets.size()},
                    {"bugs", c.bugs.size()},
                    {"links", c.links.size()},
                    {"hunks", hunks},
                    {"corpus_hash", fbl::corpus_hash(c)}}
                   .dump()
            << '\n';
  return kOk;
}

int cmd_encode(const Options& o, const std::string& text, const std::string& bug_id) {
  const fbl::Vocabulary vocab = resolve_vocab(o);
  if (!text.empty()) {
    const auto seq = fbl::encode_query_text(text, vocab, o.query_limit);
    std::cout << json{{"id", "text"}, {"length", seq.real_length}, {"tokens", names_of(seq.ids, vocab)}}.dump()
              << '\n';
    return kOk;
  }
  const fbl::Corpus c = session_corpus(o);
  if (!bug_id.empty()) {
    const fbl::BugReport* b = c.find_bug(bug_id);
    if (!b) throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "unknown bug " + bug_id);
    const auto seq = fbl::encode_query(*b, vocab, o.query_limit);
    std::cout << json{{"id", bug_id}, {"length", seq.real_length}, {"tokens", names_of(seq.ids, vocab)}}.dump()
              << '\n';
    return kOk;
  }
  const fbl::Granularity g = fbl::parse_granularity(o.granularity);
  const fbl::Strategy s = fbl::parse_strategy(o.strategy);
  for (const fbl::Document& d : c.documents(g)) {
    const auto seq = fbl::encode_document(d, s, vocab, doc_limit(o, g));
    std::cout << json{{"id", d.doc_id}, {"length", seq.real_length}, {"tokens", names_of(seq.ids, vocab)}}.dump()
              << '\n';
  }
  return kOk;
}

int cmd_train(const Options& o, fbl::TripletTrainConfig cfg, const std::string& out) {
  const fbl::Vocabulary vocab = resolve_vocab(o);
  const fbl::Corpus c = session_corpus(o);
  const fbl::Granularity g = fbl::parse_granularity(o.granularity);
  const fbl::Strategy s = fbl::parse_strategy(o.strategy);
  const auto embedder = fbl::make_embedder(o.embedder, o.seed, o.d_in);

  const fbl::LinkSplit split = fbl::split_train_test(c.links, c.bug_dates());
  const std::vector<fbl::Document> docs = c.documents(g);
  const std::vector<fbl::Triplet> triplets = fbl::build_triplets(split.train, docs, o.seed);

  fbl::TrainingSet data;
  for (const fbl::Document& d : docs) data.documents.emplace(d.doc_id, fbl::encode_document(d, s, vocab, doc_limit(o, g)));
  for (const fbl::Triplet& t : triplets) {
    if (data.queries.count(t.bug_id)) continue;
    data.queries.emplace(t.bug_id, fbl::encode_query(*c.find_bug(t.bug_id), vocab, o.query_limit));
  }
  cfg.d_out = o.d_out;
  cfg.seed = o.seed;
  const fbl::TrainResult r = fbl::train_projection(triplets, data, *embedder, cfg);
  const fs::path dest = out.empty() ? session_dir(o) / "trained.fble" : fs::path(out);
  fbl::save_projection(dest, r.projection);
  std::cout << json{{"projection", dest.string()},
                    {"triplets", triplets.size()},
                    {"train_links", split.train.size()},
                    {"test_links", split.test.size()},
                    {"epoch_loss", r.epoch_loss}}
                   .dump()
            << '\n';
  return kOk;
}

fbl::LinearProjection resolve_projection(const Options& o) {
  if (!o.projection.empty()) return fbl::load_projection(o.projection);
  const fs::path trained = session_dir(o) / "trained.fble";
  if (fs::exists(trained)) return fbl::load_projection(trained);
  return fbl::LinearProjection::seeded(o.d_in, o.d_out, o.seed);
}

fbl::DocMatrices embed_documents(const std::vector<fbl::Document>& docs, fbl::Strategy s,
                                 const fbl::Vocabulary& vocab, std::size_t limit,
                                 const fbl::TokenTable& table) {
  fbl::DocMatrices out;
  for (const fbl::Document& d : docs) {
    out.add(d.doc_id, table.embed(fbl::encode_document(d, s, vocab, limit)));
  }
  return out;
}

int cmd_index(const Options& o) {
  const fbl::Vocabulary vocab = resolve_vocab(o);
  const fbl::Corpus c = session_corpus(o);
  const fbl::Granularity g = fbl::parse_granularity(o.granularity);
  const fbl::Strategy s = fbl::parse_strategy(o.strategy);
  const auto embedder = fbl::make_embedder(o.embedder, o.seed, o.d_in);
  const fbl::LinearProjection proj = resolve_projection(o);
  if (proj.d_in() != embedder->dim()) {
    throw fbl::Error(fbl::ErrorCode::kDimensionMismatch, "projection d_in " + std::to_string(proj.d_in()) +
                                                             " != embedder dim " + std::to_string(embedder->dim()));
  }
  const std::size_t limit = doc_limit(o, g);
  const fbl::TokenTable table(*embedder, proj, vocab.size());

  fbl::SessionArtifacts a;
  a.vocab = vocab;
  a.projection = proj;
  a.docs = embed_documents(c.documents(g), s, vocab, limit, table);

  fbl::IvfPqParams params;
  params.partitions = o.partitions;
  params.subspaces = o.subspaces;
  params.codewords = o.codewords;
  params.seed = o.seed;
  a.index = fbl::IvfPqIndex::build(a.docs, params);

  fbl::Manifest m;
  m.corpus_hash = fbl::corpus_hash(c);
  m.granularity = std::string(fbl::granularity_name(g));
  m.strategy = std::string(fbl::strategy_name(s));
  m.embedder = embedder->spec();
  m.query_limit = static_cast<std::uint32_t>(o.query_limit);
  m.doc_limit = static_cast<std::uint32_t>(limit);
  m.index_seed = o.seed;
  fbl::save_session(session_dir(o), m, a);
  std::cout << json{{"session", session_dir(o).string()},
                    {"documents", a.docs.size()},
                    {"embeddings", a.index.size()},
                    {"manifest", fbl::to_json(m)}}
                   .dump()
            << '\n';
  return kOk;
}

// Fields the user set explicitly must agree with the stored session.
fbl::Manifest expectation(const Options& o, const CLI::App& app) {
  fbl::Manifest e;
  e.doc_pack_precision.clear();
  auto given = [&](const char* flag) { return app.count(flag) > 0; };
  if (given("--granularity")) e.granularity = std::string(fbl::granularity_name(fbl::parse_granularity(o.granularity)));
  if (given("--strategy")) e.strategy = std::string(fbl::strategy_name(fbl::parse_strategy(o.strategy)));
  if (given("--partitions")) e.partitions = o.partitions;
  if (given("--vocab")) e.vocab_hash = fbl::sha256_hex(fbl::Vocabulary::load(o.vocab).serialize());
  if (given("--embedder")) e.embedder = fbl::make_embedder(o.embedder, o.seed, o.d_in)->spec();
  if (given("--projection")) {
    std::ostringstream ss;
    const fbl::LinearProjection p = fbl::load_projection(o.projection);
    fbl::write_fble(ss, {static_cast<std::uint32_t>(p.d_in()), static_cast<std::uint32_t>(p.d_out()), p.weights()});
    e.projection_hash = fbl::sha256_hex(ss.str());
  }
  return e;
}

std::size_t parse_candidates(const std::string& v) {
  if (v == "all") return fbl::kAllResults;
  try {
    std::size_t used = 0;
    const unsigned long long n = std::stoull(v, &used);
    if (used == v.size() && n > 0) return static_cast<std::size_t>(n);
  } catch (const std::logic_error&) {
  }
  throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "--candidates must be a positive integer or 'all'");
}

std::vector<fbl::BugReport> query_bugs(const Options& o, const std::string& text, const std::string& bug_file,
                                       const std::string& bug_id, bool all_bugs, const std::string& split) {
  if (!text.empty()) {
    fbl::BugReport b;
    b.bug_id = "text";
    b.summary = text;
    return {b};
  }
  if (!bug_file.empty()) return fbl::read_bugs_jsonl(bug_file);
  const fbl::Corpus c = session_corpus(o);
  if (!bug_id.empty()) {
    const fbl::BugReport* b = c.find_bug(bug_id);
    if (!b) throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "unknown bug " + bug_id);
    return {*b};
  }
  if (!all_bugs) throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "query needs --text, --bug-file, --bug or --all-bugs");
  if (split.empty() || split == "all") return c.bugs;
  const fbl::LinkSplit parts = fbl::split_train_test(c.links, c.bug_dates());
  const auto& chosen = split == "train" ? parts.train : split == "test" ? parts.test
      : throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "--split must be train, test or all");
  std::set<std::string> wanted;
  for (const auto& l : chosen) wanted.insert(l.bug_id);
  std::vector<fbl::BugReport> out;
  for (const auto& b : c.bugs) {
    if (wanted.count(b.bug_id)) out.push_back(b);
  }
  return out;
}

int cmd_query(const Options& o, const CLI::App& app, const std::string& text, const std::string& bug_file,
              const std::string& bug_id, bool all_bugs, const std::string& split, const std::string& format,
              const std::string& aggregate) {
  const std::vector<fbl::BugReport> bugs = query_bugs(o, text, bug_file, bug_id, all_bugs, split);
  const fbl::Manifest expected = expectation(o, app);
  const fbl::LoadedSession s = fbl::load_session(session_dir(o), &expected);
  const auto& a = s.artifacts;
  const auto embedder = fbl::make_embedder(s.manifest.embedder, o.seed, s.manifest.d_in);
  const std::size_t n_prime = parse_candidates(o.candidates);
  const std::size_t nprobe = std::min<std::size_t>(o.nprobe, a.index.partitions());
  if (format != "jsonl" && format != "trec") {
    throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "--format must be jsonl or trec");
  }
  const bool collapse = aggregate != "none";
  const fbl::Aggregation agg = collapse ? fbl::parse_aggregation(aggregate) : fbl::Aggregation::kMax;

  for (const fbl::BugReport& b : bugs) {
    const auto seq = text.empty() ? fbl::encode_query(b, a.vocab, s.manifest.query_limit)
                                  : fbl::encode_query_text(text, a.vocab, s.manifest.query_limit);
    const fbl::EmbeddingMatrix q = fbl::embed_sequence(seq, *embedder, a.projection, true);
    fbl::RankedResult r = o.exact ? fbl::rank_exact(q, a.docs, collapse ? fbl::kAllResults : o.topk)
                                  : fbl::rank_two_stage(q, a.index, a.docs, n_prime, nprobe,
                                                        collapse ? fbl::kAllResults : o.topk);
    r.bug_id = b.bug_id;
    if (collapse) {
      r = fbl::aggregate_to_changeset(r, agg);
      if (r.entries.size() > o.topk) r.entries.resize(o.topk);
    }
    if (format == "trec") {
      fbl::write_run_trec(std::cout, r, o.exact ? "fbl-exact" : "fbl");
    } else {
      fbl::write_run_jsonl(std::cout, r);
    }
  }
  return kOk;
}

int cmd_evaluate(const Options& o, const std::vector<std::string>& runs, const std::string& qrels_path,
                 const std::string& split) {
  std::optional<fbl::Corpus> corpus;
  if (!o.session.empty() || std::getenv("FBL_SESSION")) {
    if (fs::exists(corpus_dir(o) / "changesets.jsonl")) corpus = session_corpus(o);
  }
  std::vector<fbl::GoldLink> links;
  if (!qrels_path.empty()) {
    links = fbl::read_links_jsonl(qrels_path);
  } else if (corpus) {
    links = corpus->links;
  } else {
    throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "evaluate needs --qrels or a session with a corpus");
  }
  if (!split.empty() && split != "all") {
    if (!corpus) throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "--split needs a session corpus");
    const fbl::LinkSplit parts = fbl::split_train_test(links, corpus->bug_dates());
    if (split == "train") links = parts.train;
    else if (split == "test") links = parts.test;
    else throw fbl::Error(fbl::ErrorCode::kInvalidArgument, "--split must be train, test or all");
  }
  const fbl::Qrels qrels = fbl::make_qrels(links);
  json out = json::object();
  for (const std::string& path : runs) {
    out[path] = fbl::metrics_report(fbl::read_run(path), qrels, corpus ? &*corpus : nullptr);
  }
  std::cout << (runs.size() == 1 ? out[runs.front()] : out).dump(2) << '\n';
  return kOk;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_bench(const Options& o, const std::vector<std::size_t>& sizes, std::size_t n_queries) {
  const fbl::LoadedSession s = fbl::load_session(session_dir(o));
  const auto& a = s.artifacts;
  const fbl::Corpus c = session_corpus(o);
  const auto embedder = fbl::make_embedder(s.manifest.embedder, o.seed, s.manifest.d_in);

  std::vector<fbl::EmbeddingMatrix> queries;
  for (const fbl::BugReport& b : c.bugs) {
    if (queries.size() == n_queries) break;
    queries.push_back(fbl::embed_sequence(fbl::encode_query(b, a.vocab, s.manifest.query_limit), *embedder,
                                          a.projection, true));
  }
  if (queries.empty()) throw fbl::Error(fbl::ErrorCode::kInsufficientData, "session corpus has no bugs");

  std::vector<std::size_t> order(a.docs.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(o.seed));

  const std::size_t n_prime = parse_candidates(o.candidates);
  std::cout << "embeddings,documents,queries,exact_ms,two_stage_ms,ratio,simd\n";
  for (std::size_t target : sizes) {
    fbl::DocMatrices sub;
    std::size_t rows = 0;
    for (std::size_t i : order) {
      if (rows >= target) break;
      sub.add(a.docs.id(i), a.docs.matrix(i));
      rows += a.docs.matrix(i).live_rows();
    }
    if (rows < target) {
      std::cerr << "skipping size " << target << ": session holds only " << rows << " embeddings\n";
      continue;
    }
    fbl::IvfPqParams params;
    params.partitions = s.manifest.partitions;
    params.subspaces = s.manifest.subspaces;
    params.codewords = s.manifest.codewords;
    params.seed = s.manifest.index_seed;
    const fbl::IvfPqIndex idx = fbl::IvfPqIndex::build(sub, params);

    auto t0 = std::chrono::steady_clock::now();
    for (const auto& q : queries) (void)fbl::rank_exact(q, sub, o.topk);
    const double exact_ms = ms_since(t0) / static_cast<double>(queries.size());
    t0 = std::chrono::steady_clock::now();
    const std::size_t nprobe = std::min<std::size_t>(o.nprobe, idx.partitions());
    for (const auto& q : queries) (void)fbl::rank_two_stage(q, idx, sub, n_prime, nprobe, o.topk);
    const double two_ms = ms_since(t0) / static_cast<double>(queries.size());
    std::cout << rows << ',' << sub.size() << ',' << queries.size() << ',' << exact_ms << ',' << two_ms << ','
              << two_ms / exact_ms << ',' << fbl::simd::kernels().name << '\n';
  }
  return kOk;
}

int exit_code_for(fbl::ErrorCode c) {
  switch (c) {
    case fbl::ErrorCode::kInvalidArgument:
      return kUsage;
    default:
      return kData;
  }
}

void report(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Changeset-based bug localization with late-interaction retrieval"};
  app.require_subcommand(1);
  Options o;

  auto session_flag = [&](CLI::App* sub) {
    sub->add_option("--session", o.session, "Session directory (default: $FBL_SESSION)");
  };
  auto pipeline_flags = [&](CLI::App* sub) {
    session_flag(sub);
    sub->add_option("--granularity", o.granularity, "changeset | file | hunk")->capture_default_str();
    sub->add_option("--strategy", o.strategy, "d | arc | arcl")->capture_default_str();
    sub->add_option("--vocab", o.vocab, "WordPiece vocabulary file");
    sub->add_option("--embedder", o.embedder, "hash | hash:<seed>[:<d>] | file:<path>")->capture_default_str();
    sub->add_option("--seed", o.seed, "Seed")->capture_default_str();
    sub->add_option("--d-in", o.d_in, "Token embedding width")->capture_default_str();
    sub->add_option("--d-out", o.d_out, "Projected width")->capture_default_str();
    sub->add_option("--query-limit", o.query_limit, "Query length limit")->capture_default_str();
    sub->add_option("--doc-limit", o.doc_limit, "Document length limit (default by granularity)");
  };

  std::string ingest_from, ingest_cs, ingest_bugs, ingest_links;
  CLI::App* ingest = app.add_subcommand("ingest", "Validate a corpus and store it in the session");
  session_flag(ingest);
  ingest->add_option("corpus_dir", ingest_from, "Directory with changesets.jsonl, bugs.jsonl, links.jsonl");
  ingest->add_option("--changesets", ingest_cs, "changesets.jsonl");
  ingest->add_option("--bugs", ingest_bugs, "bugs.jsonl");
  ingest->add_option("--links", ingest_links, "links.jsonl");

  std::string encode_text, encode_bug;
  CLI::App* encode = app.add_subcommand("encode", "Print encoded token sequences as JSONL");
  pipeline_flags(encode);
  encode->add_option("--text", encode_text, "Encode free text as a query");
  encode->add_option("--bug", encode_bug, "Encode one bug report as a query");

  fbl::TripletTrainConfig train_cfg;
  std::string train_out;
  CLI::App* train = app.add_subcommand("train", "Train the linear projection on the training split");
  pipeline_flags(train);
  train->add_option("--epochs", train_cfg.epochs, "Epochs")->capture_default_str();
  train->add_option("--batch", train_cfg.batch_size, "Batch size")->capture_default_str();
  train->add_option("--lr", train_cfg.learning_rate, "Learning rate")->capture_default_str();
  train->add_option("--margin", train_cfg.margin, "Triplet margin")->capture_default_str();
  train->add_option("--out", train_out, "Output FBLE path (default: <session>/trained.fble)");

  CLI::App* index = app.add_subcommand("index", "Embed all documents and build the IVFPQ index");
  pipeline_flags(index);
  index->add_option("--projection", o.projection, "Projection FBLE (default: trained, else seeded)");
  index->add_option("--partitions", o.partitions, "Coarse partitions P")->capture_default_str();
  index->add_option("--subspaces", o.subspaces, "PQ subspaces M")->capture_default_str();
  index->add_option("--codewords", o.codewords, "PQ codewords K")->capture_default_str();

  std::string q_text, q_file, q_bug, q_split, q_format = "jsonl", q_agg = "none";
  bool q_all = false;
  CLI::App* query = app.add_subcommand("query", "Rank documents for bug reports");
  pipeline_flags(query);
  query->add_option("--projection", o.projection, "Must match the session projection");
  query->add_option("--partitions", o.partitions, "Must match the session index");
  query->add_option("--text", q_text, "Free-text query");
  query->add_option("--bug-file", q_file, "JSONL bug reports");
  query->add_option("--bug", q_bug, "Bug id from the session corpus");
  query->add_flag("--all-bugs", q_all, "Every bug in the session corpus");
  query->add_option("--split", q_split, "With --all-bugs: train | test | all");
  query->add_option("--nprobe", o.nprobe, "Partitions scanned per query row (capped at P)")->capture_default_str();
  query->add_option("--candidates", o.candidates, "Candidate embeddings N, or 'all'")->capture_default_str();
  query->add_option("--topk", o.topk, "Results per query")->capture_default_str();
  query->add_flag("--exact", o.exact, "Exhaustive MaxSim over every document");
  query->add_option("--format", q_format, "jsonl | trec")->capture_default_str();
  query->add_option("--aggregate", q_agg, "none | max | sum (collapse to changesets)")->capture_default_str();

  std::vector<std::string> eval_runs;
  std::string eval_qrels, eval_split;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score run files against gold links");
  session_flag(evaluate);
  evaluate->add_option("runs", eval_runs, "Run files (JSONL or TREC)")->required();
  evaluate->add_option("--qrels", eval_qrels, "links.jsonl (default: session corpus links)");
  evaluate->add_option("--split", eval_split, "train | test | all");

  std::vector<std::size_t> bench_sizes{20000, 50000, 100000, 200000};
  std::size_t bench_queries = 20;
  CLI::App* bench = app.add_subcommand("bench", "Exact vs two-stage latency over corpus sizes (CSV)");
  session_flag(bench);
  bench->add_option("--sizes", bench_sizes, "Embedding counts")->delimiter(',')->capture_default_str();
  bench->add_option("--queries", bench_queries, "Queries per size")->capture_default_str();
  bench->add_option("--nprobe", o.nprobe, "Partitions scanned per query row")->capture_default_str();
  bench->add_option("--candidates", o.candidates, "Candidate embeddings N, or 'all'")->capture_default_str();
  bench->add_option("--topk", o.topk, "Results per query")->capture_default_str();
  bench->add_option("--seed", o.seed, "Subsampling seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) return cmd_ingest(o, ingest_from, ingest_cs, ingest_bugs, ingest_links);
    if (*encode) return cmd_encode(o, encode_text, encode_bug);
    if (*train) return cmd_train(o, train_cfg, train_out);
    if (*index) return cmd_index(o);
    if (*query) return cmd_query(o, *query, q_text, q_file, q_bug, q_all, q_split, q_format, q_agg);
    if (*evaluate) return cmd_evaluate(o, eval_runs, eval_qrels, eval_split);
    if (*bench) return cmd_bench(o, bench_sizes, bench_queries);
  } catch (const fbl::Error& e) {
    report(std::string(fbl::error_code_name(e.code())), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    report("Internal", e.what());
    return kInternal;
  }
  return kUsage;
}
