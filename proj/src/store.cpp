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
#include "fbl/store.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <system_error>

#include <openssl/evp.h>

#include "fbl/binary_io.hpp"
#include "fbl/error.hpp"

namespace fbl {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 15]);
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed for " + path.string());
  return std::move(ss).str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string corpus_hash(const Corpus& corpus) {
  std::ostringstream ss;
  write_changesets_jsonl(ss, corpus.changesets);
  ss << '\x1e';
  write_bugs_jsonl(ss, corpus.bugs);
  ss << '\x1e';
  write_links_jsonl(ss, corpus.links);
  return sha256_hex(ss.str());
}

json to_json(const Manifest& m) {
  return {{"format_version", m.format_version},
          {"corpus_hash", m.corpus_hash},
          {"granularity", m.granularity},
          {"strategy", m.strategy},
          {"vocab_hash", m.vocab_hash},
          {"embedder", m.embedder},
          {"d_in", m.d_in},
          {"d_out", m.d_out},
          {"query_limit", m.query_limit},
          {"doc_limit", m.doc_limit},
          {"projection_hash", m.projection_hash},
          {"index",
           {{"partitions", m.partitions},
            {"subspaces", m.subspaces},
            {"codewords", m.codewords},
            {"seed", m.index_seed}}},
          {"doc_pack_precision", m.doc_pack_precision},
          {"formats", m.formats},
          {"checksums", m.checksums}};
}

Manifest manifest_from_json(const json& j, const std::string& name) {
  Manifest m;
  try {
    m.format_version = j.at("format_version").get<std::uint32_t>();
    if (m.format_version != 1) {
      throw Error(ErrorCode::kFormat,
                  name + ": unsupported manifest version " + std::to_string(m.format_version));
    }
    m.corpus_hash = j.at("corpus_hash").get<std::string>();
    m.granularity = j.at("granularity").get<std::string>();
    m.strategy = j.at("strategy").get<std::string>();
    m.vocab_hash = j.at("vocab_hash").get<std::string>();
    m.embedder = j.at("embedder").get<std::string>();
    m.d_in = j.at("d_in").get<std::uint32_t>();
    m.d_out = j.at("d_out").get<std::uint32_t>();
    m.query_limit = j.at("query_limit").get<std::uint32_t>();
    m.doc_limit = j.at("doc_limit").get<std::uint32_t>();
    m.projection_hash = j.at("projection_hash").get<std::string>();
    const json& idx = j.at("index");
    m.partitions = idx.at("partitions").get<std::uint32_t>();
    m.subspaces = idx.at("subspaces").get<std::uint32_t>();
    m.codewords = idx.at("codewords").get<std::uint32_t>();
    m.index_seed = idx.at("seed").get<std::uint64_t>();
    m.doc_pack_precision = j.at("doc_pack_precision").get<std::string>();
    m.formats = j.at("formats").get<std::map<std::string, std::uint32_t>>();
    m.checksums = j.at("checksums").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, name + ": " + e.what());
  }
  return m;
}

namespace {

template <typename T>
void check_field(const char* field, const T& expected, const T& actual, const T& wildcard) {
  if (expected == wildcard || expected == actual) return;
  std::ostringstream ss;
  ss << "session " << field << " is '" << actual << "', expected '" << expected << "'";
  throw Error(ErrorCode::kConfigMismatch, ss.str());
}

}  // namespace

// Empty strings and zeros in `expected` match anything.
void check_compatible(const Manifest& expected, const Manifest& actual) {
  const std::string any;
  check_field("corpus_hash", expected.corpus_hash, actual.corpus_hash, any);
  check_field("granularity", expected.granularity, actual.granularity, any);
  check_field("strategy", expected.strategy, actual.strategy, any);
  check_field("vocab_hash", expected.vocab_hash, actual.vocab_hash, any);
  check_field("embedder", expected.embedder, actual.embedder, any);
  check_field("d_in", expected.d_in, actual.d_in, 0u);
  check_field("d_out", expected.d_out, actual.d_out, 0u);
  check_field("query_limit", expected.query_limit, actual.query_limit, 0u);
  check_field("doc_limit", expected.doc_limit, actual.doc_limit, 0u);
  check_field("projection_hash", expected.projection_hash, actual.projection_hash, any);
  check_field("partitions", expected.partitions, actual.partitions, 0u);
  check_field("subspaces", expected.subspaces, actual.subspaces, 0u);
  check_field("codewords", expected.codewords, actual.codewords, 0u);
  check_field("index seed", expected.index_seed, actual.index_seed, std::uint64_t{0});
  check_field("doc_pack_precision", expected.doc_pack_precision, actual.doc_pack_precision, any);
}

namespace {

constexpr std::uint32_t kFbldVersion = 1;
constexpr std::uint32_t kPrecisionF32 = 0;

}  // namespace

void write_doc_pack(std::ostream& out, const DocMatrices& docs) {
  io::Writer w(out);
  w.magic("FBLD");
  w.u32(kFbldVersion);
  w.u32(kPrecisionF32);
  w.u32(static_cast<std::uint32_t>(docs.dim()));
  w.u64(docs.size());
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const EmbeddingMatrix& m = docs.matrix(i);
    w.str(docs.id(i));
    w.u64(offset);
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.rows() - m.live_rows()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (!m.live(r)) w.u32(static_cast<std::uint32_t>(r));
    }
    w.u32(m.is_query() ? 1u : 0u);
    offset += m.rows();
  }
  w.u64(offset);
  for (std::size_t i = 0; i < docs.size(); ++i) w.f32s(docs.matrix(i).values());
}

DocMatrices read_doc_pack(std::istream& in, const std::string& name) {
  io::Reader r(in, name);
  r.expect_magic("FBLD");
  const std::uint32_t version = r.u32();
  if (version != kFbldVersion) r.fail("unsupported version " + std::to_string(version));
  const std::uint32_t precision = r.u32();
  if (precision != kPrecisionF32) r.fail("unsupported precision " + std::to_string(precision));
  const std::uint32_t dim = r.u32();
  const std::uint64_t n = r.u64();
  r.check_count(n, std::uint64_t{1} << 32, "document");

  struct Entry {
    std::string id;
    std::uint32_t rows;
    std::vector<std::uint32_t> dead;
    bool query;
  };
  std::vector<Entry> entries;
  entries.reserve(n);
  std::uint64_t expected_offset = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    Entry e;
    e.id = r.str();
    const std::uint64_t offset = r.u64();
    if (offset != expected_offset) r.fail("offset table is not contiguous at " + e.id);
    e.rows = r.u32();
    const std::uint32_t n_dead = r.u32();
    if (n_dead > e.rows) r.fail("dead row count exceeds rows for " + e.id);
    e.dead.resize(n_dead);
    for (auto& d : e.dead) {
      d = r.u32();
      if (d >= e.rows) r.fail("dead row index out of range for " + e.id);
    }
    const std::uint32_t flags = r.u32();
    if (flags > 1) r.fail("bad flags for " + e.id);
    e.query = flags == 1;
    expected_offset += e.rows;
    entries.push_back(std::move(e));
  }
  const std::uint64_t total = r.u64();
  if (total != expected_offset) r.fail("row total does not match the offset table");
  r.check_count(total * dim, std::uint64_t{1} << 34, "value");

  DocMatrices docs;
  for (Entry& e : entries) {
    std::vector<float> values(static_cast<std::size_t>(e.rows) * dim);
    r.f32s(values);
    EmbeddingMatrix m(e.rows, dim, std::move(values));
    for (std::uint32_t d : e.dead) m.mark_dead(d);
    m.set_query(e.query);
    try {
      docs.add(std::move(e.id), std::move(m));
    } catch (const Error& err) {
      r.fail(err.what());
    }
  }
  return docs;
}

namespace {

struct Blob {
  const char* file;
  std::string bytes;
};

std::string index_bytes(const IvfPqIndex& idx) {
  std::ostringstream ss(std::ios::binary);
  idx.write(ss);
  return std::move(ss).str();
}

std::string projection_bytes(const LinearProjection& p) {
  std::ostringstream ss(std::ios::binary);
  write_fble(ss, {static_cast<std::uint32_t>(p.d_in()), static_cast<std::uint32_t>(p.d_out()),
                  p.weights()});
  return std::move(ss).str();
}

std::string doc_pack_bytes(const DocMatrices& docs) {
  std::ostringstream ss(std::ios::binary);
  write_doc_pack(ss, docs);
  return std::move(ss).str();
}

}  // namespace

void save_session(const fs::path& dir, Manifest& manifest, const SessionArtifacts& a) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<Blob> blobs;
  blobs.push_back({session_files::kVocab, a.vocab.serialize()});
  blobs.push_back({session_files::kProjection, projection_bytes(a.projection)});
  blobs.push_back({session_files::kDocs, doc_pack_bytes(a.docs)});
  blobs.push_back({session_files::kIndex, index_bytes(a.index)});

  manifest.vocab_hash = sha256_hex(blobs[0].bytes);
  manifest.projection_hash = sha256_hex(blobs[1].bytes);
  manifest.d_in = static_cast<std::uint32_t>(a.projection.d_in());
  manifest.d_out = static_cast<std::uint32_t>(a.projection.d_out());
  manifest.partitions = a.index.partitions();
  manifest.subspaces = a.index.subspaces();
  manifest.codewords = a.index.codewords();
  manifest.checksums.clear();
  for (const Blob& b : blobs) {
    manifest.checksums[b.file] = sha256_hex(b.bytes);
    write_file_atomic(dir / b.file, b.bytes);
  }
  write_file_atomic(dir / session_files::kManifest, to_json(manifest).dump(2) + "\n");
}

Manifest load_manifest(const fs::path& dir) {
  const fs::path path = dir / session_files::kManifest;
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "no session manifest at " + path.string());
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return manifest_from_json(j, path.string());
}

LoadedSession load_session(const fs::path& dir, const Manifest* expected) {
  LoadedSession s;
  s.manifest = load_manifest(dir);
  const Manifest& m = s.manifest;

  auto load_checked = [&](const char* file) {
    const fs::path path = dir / file;
    std::string bytes = read_file(path);
    const auto it = m.checksums.find(file);
    if (it == m.checksums.end()) {
      throw Error(ErrorCode::kFormat, path.string() + ": no checksum recorded in manifest");
    }
    if (sha256_hex(bytes) != it->second) {
      throw Error(ErrorCode::kFormat, path.string() + ": checksum mismatch");
    }
    return bytes;
  };

  const std::string vocab = load_checked(session_files::kVocab);
  const std::string proj = load_checked(session_files::kProjection);
  const std::string docs = load_checked(session_files::kDocs);
  const std::string index = load_checked(session_files::kIndex);

  if (sha256_hex(vocab) != m.vocab_hash) {
    throw Error(ErrorCode::kConfigMismatch, "vocabulary does not match the manifest vocab_hash");
  }
  if (sha256_hex(proj) != m.projection_hash) {
    throw Error(ErrorCode::kConfigMismatch, "projection does not match the manifest projection_hash");
  }
  if (expected) check_compatible(*expected, m);

  auto parse = [&](const char* file, const std::string& bytes, auto&& fn) {
    std::istringstream in(bytes, std::ios::binary);
    const std::string name = (dir / file).string();
    auto value = fn(in, name);
    io::Reader(in, name).expect_end();
    return value;
  };

  s.artifacts.vocab = Vocabulary::load(dir / session_files::kVocab);
  if (s.artifacts.vocab.serialize() != vocab) {
    throw Error(ErrorCode::kFormat, (dir / session_files::kVocab).string() + ": not in canonical form");
  }
  const FbleMatrix w = parse(session_files::kProjection, proj, read_fble);
  s.artifacts.projection = LinearProjection(w.rows, w.dim, w.values);
  s.artifacts.docs = parse(session_files::kDocs, docs, read_doc_pack);
  s.artifacts.index = parse(session_files::kIndex, index, IvfPqIndex::read);

  if (s.artifacts.projection.d_in() != m.d_in || s.artifacts.projection.d_out() != m.d_out) {
    throw Error(ErrorCode::kConfigMismatch, "projection shape does not match the manifest");
  }
  if (s.artifacts.index.partitions() != m.partitions || s.artifacts.index.subspaces() != m.subspaces ||
      s.artifacts.index.codewords() != m.codewords) {
    throw Error(ErrorCode::kConfigMismatch, "index parameters do not match the manifest");
  }
  if (s.artifacts.index.doc_ids() != s.artifacts.docs.ids()) {
    throw Error(ErrorCode::kConfigMismatch, "index and document pack cover different documents");
  }
  return s;
}

}  // namespace fbl
