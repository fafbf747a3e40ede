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
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fbl/corpus.hpp"
#include "fbl/embed.hpp"
#include "fbl/encode.hpp"
#include "fbl/index.hpp"

namespace fbl {

/// Hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Hash over the canonical JSONL form of the corpus.
std::string corpus_hash(const Corpus& corpus);

struct Manifest {
  std::uint32_t format_version = 1;
  std::string corpus_hash;
  std::string granularity;
  std::string strategy;
  std::string vocab_hash;
  std::string embedder;  // TokenEmbedder::spec()
  std::uint32_t d_in = 0;
  std::uint32_t d_out = 0;
  std::uint32_t query_limit = 0;
  std::uint32_t doc_limit = 0;
  std::string projection_hash;
  std::uint32_t partitions = 0;
  std::uint32_t subspaces = 0;
  std::uint32_t codewords = 0;
  std::uint64_t index_seed = 0;
  std::string doc_pack_precision = "f32";
  std::map<std::string, std::uint32_t> formats{{"fbld", 1}, {"fble", 1}, {"fbli", 1}};
  /// file name -> SHA-256, filled in by save_session.
  std::map<std::string, std::string> checksums;

  bool operator==(const Manifest&) const = default;
};

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j, const std::string& name);

/// Throws kConfigMismatch naming the first configuration field that
/// differs. Hashes of artifacts and checksums are compared too; the format
/// version block is not.
void check_compatible(const Manifest& expected, const Manifest& actual);

/// FBLD: per-document matrices stored contiguously behind an offset table.
void write_doc_pack(std::ostream& out, const DocMatrices& docs);
DocMatrices read_doc_pack(std::istream& in, const std::string& name);

struct SessionArtifacts {
  Vocabulary vocab;
  LinearProjection projection;
  DocMatrices docs;
  IvfPqIndex index;
};

namespace session_files {
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kIndex = "index.fbli";
inline constexpr const char* kProjection = "projection.fble";
inline constexpr const char* kDocs = "docs.fbld";
inline constexpr const char* kVocab = "vocab.txt";
inline constexpr const char* kCorpus = "corpus";
}  // namespace session_files

/// Writes every artifact to a temp file and renames it into place, manifest
/// last. Fills in the vocab/projection hashes and checksums of `manifest`.
void save_session(const std::filesystem::path& dir, Manifest& manifest,
                  const SessionArtifacts& artifacts);

struct LoadedSession {
  Manifest manifest;
  SessionArtifacts artifacts;
};

/// Verifies checksums (kFormat naming the file), then the vocab and
/// projection hashes, then `expected` when given (kConfigMismatch).
LoadedSession load_session(const std::filesystem::path& dir, const Manifest* expected = nullptr);

Manifest load_manifest(const std::filesystem::path& dir);

/// Writes `bytes` to path via a sibling temp file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace fbl
