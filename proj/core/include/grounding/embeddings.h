// Copyright 2026 The Grounding Authors.
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

#ifndef GROUNDING_EMBEDDINGS_H_
#define GROUNDING_EMBEDDINGS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "grounding/corpus.h"
#include "grounding/error.h"

namespace grounding {

// Contextual vectors for the tokens of one pair's context window, one row per
// corpus token, row-major float32.
struct EmbeddingEntry {
  std::string pair_id;
  int64_t window_start = 0;
  int64_t window_len = 0;
  std::vector<float> values;  // window_len * dim

  TokenRange window() const { return {window_start, window_start + window_len - 1}; }
  std::span<const float> Row(int64_t token, size_t dim) const;
  bool operator==(const EmbeddingEntry &) const = default;
};

// Immutable collection of entries sharing one dimension.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(size_t dim) : dim_(dim) {}

  size_t dim() const { return dim_; }
  size_t size() const { return entries_.size(); }
  const std::vector<EmbeddingEntry> &entries() const { return entries_; }

  // Throws EmbeddingFormatError(kDuplicatePairId) or InvalidArgument on a
  // shape mismatch.
  void Add(EmbeddingEntry entry);

  // nullptr when absent.
  const EmbeddingEntry *Find(std::string_view pair_id) const;

 private:
  size_t dim_ = 0;
  std::vector<EmbeddingEntry> entries_;
  std::unordered_map<std::string, size_t> index_;
};

using SpanVector = std::vector<double>;
using PairFeature = std::vector<double>;

// Mean of the rows of `entry` covering `span`. Throws InvalidArgument naming
// the pair when the span leaves the window.
SpanVector MeanPool(const EmbeddingEntry &entry, size_t dim, TokenRange span);

// [character; place]. Throws InvalidArgument on a dimension mismatch.
PairFeature MakePairFeature(std::span<const double> character,
                            std::span<const double> place);

// Pair feature for a candidate pair from its table entry.
PairFeature PairFeatureFor(const EmbeddingTable &table, const CandidatePair &pair);

// Source of per-token vectors for a pair's context window.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual size_t dim() const = 0;
  virtual EmbeddingEntry Embed(const CandidatePair &pair, const Document &doc,
                               int64_t width) const = 0;
};

// Deterministic pseudo-embeddings: entry j of the vector for token text t is
// a hash of (seed, t, j) mapped to [-1, 1]. Context-free test double.
class HashEmbeddingProvider : public EmbeddingProvider {
 public:
  HashEmbeddingProvider(uint64_t seed, size_t dim) : seed_(seed), dim_(dim) {}

  size_t dim() const override { return dim_; }
  std::vector<float> TokenVector(std::string_view text) const;
  EmbeddingEntry Embed(const CandidatePair &pair, const Document &doc,
                       int64_t width) const override;

 private:
  uint64_t seed_;
  size_t dim_;
};

// Serves entries precomputed by an external encoder. Checks that the stored
// window matches the pair's context window for `width`.
class TableEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit TableEmbeddingProvider(const EmbeddingTable &table) : table_(table) {}

  size_t dim() const override { return table_.dim(); }
  EmbeddingEntry Embed(const CandidatePair &pair, const Document &doc,
                       int64_t width) const override;

 private:
  const EmbeddingTable &table_;
};

// Embeds every pair (documents looked up by doc_id) into a new table.
EmbeddingTable BuildEmbeddingTable(const EmbeddingProvider &provider,
                                   const std::vector<CandidatePair> &pairs,
                                   const std::vector<Document> &docs,
                                   int64_t width);

class EmbeddingFormatError : public Error {
 public:
  enum class Code { kBadMagic, kTruncated, kDuplicatePairId, kTrailingData, kBadShape };

  EmbeddingFormatError(Code code, const std::string &message);
  Code code() const { return code_; }

 private:
  Code code_;
};

// NGEMB1, little-endian: magic "NGEMB1\0\0"; u32 dim; u32 record count; per
// record u16 pair_id length, pair_id bytes, u32 window_start, u32
// window_len, window_len * dim float32 row-major.
std::string SerializeEmbeddings(const EmbeddingTable &table);
EmbeddingTable ParseEmbeddings(std::string_view bytes);
EmbeddingTable LoadEmbeddings(const std::string &path);
void WriteEmbeddings(const std::string &path, const EmbeddingTable &table);

}  // namespace grounding

#endif  // GROUNDING_EMBEDDINGS_H_
