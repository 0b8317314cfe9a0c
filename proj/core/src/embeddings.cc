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

#include "grounding/embeddings.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "grounding/io.h"
#include "grounding/random.h"

namespace grounding {

namespace {

constexpr char kMagic[8] = {'N', 'G', 'E', 'M', 'B', '1', '\0', '\0'};

std::string_view CodeName(EmbeddingFormatError::Code code) {
  using Code = EmbeddingFormatError::Code;
  switch (code) {
    case Code::kBadMagic: return "embedding_bad_magic";
    case Code::kTruncated: return "embedding_truncated";
    case Code::kDuplicatePairId: return "embedding_duplicate_pair_id";
    case Code::kTrailingData: return "embedding_trailing_data";
    case Code::kBadShape: return "embedding_bad_shape";
  }
  return "embedding";
}

void PutU16(std::string &out, uint16_t v) {
  out += static_cast<char>(v & 0xff);
  out += static_cast<char>(v >> 8);
}

void PutU32(std::string &out, uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out += static_cast<char>((v >> shift) & 0xff);
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  void Need(size_t n, const char *what) const {
    if (bytes_.size() - pos_ < n) {
      throw EmbeddingFormatError(EmbeddingFormatError::Code::kTruncated,
                                 std::string("truncated while reading ") + what +
                                     " at byte " + std::to_string(pos_));
    }
  }
  uint16_t U16(const char *what) {
    Need(2, what);
    uint16_t v = static_cast<uint8_t>(bytes_[pos_]) |
                 static_cast<uint16_t>(static_cast<uint8_t>(bytes_[pos_ + 1]) << 8);
    pos_ += 2;
    return v;
  }
  uint32_t U32(const char *what) {
    Need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::string_view Bytes(size_t n, const char *what) {
    Need(n, what);
    std::string_view v = bytes_.substr(pos_, n);
    pos_ += n;
    return v;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }
  size_t pos() const { return pos_; }

 private:
  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

EmbeddingFormatError::EmbeddingFormatError(Code code, const std::string &message)
    : Error(std::string(CodeName(code)), message), code_(code) {}

std::span<const float> EmbeddingEntry::Row(int64_t token, size_t dim) const {
  const size_t offset = static_cast<size_t>(token - window_start) * dim;
  return std::span<const float>(values).subspan(offset, dim);
}

void EmbeddingTable::Add(EmbeddingEntry entry) {
  if (entry.window_len <= 0 || entry.window_start < 0 ||
      entry.values.size() != static_cast<size_t>(entry.window_len) * dim_) {
    throw InvalidArgument("embedding entry '" + entry.pair_id +
                          "' does not match dimension " + std::to_string(dim_));
  }
  if (index_.count(entry.pair_id) != 0) {
    throw EmbeddingFormatError(EmbeddingFormatError::Code::kDuplicatePairId,
                               "duplicate pair_id '" + entry.pair_id + "'");
  }
  index_.emplace(entry.pair_id, entries_.size());
  entries_.push_back(std::move(entry));
}

const EmbeddingEntry *EmbeddingTable::Find(std::string_view pair_id) const {
  auto it = index_.find(std::string(pair_id));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

SpanVector MeanPool(const EmbeddingEntry &entry, size_t dim, TokenRange span) {
  if (span.first > span.last || !entry.window().Contains(span.first, span.last)) {
    throw InvalidArgument("pair '" + entry.pair_id + "': span [" +
                          std::to_string(span.first) + "," +
                          std::to_string(span.last) + "] outside window [" +
                          std::to_string(entry.window().first) + "," +
                          std::to_string(entry.window().last) + "]");
  }
  SpanVector mean(dim, 0.0);
  for (int64_t t = span.first; t <= span.last; ++t) {
    auto row = entry.Row(t, dim);
    for (size_t j = 0; j < dim; ++j) mean[j] += row[j];
  }
  const double n = static_cast<double>(span.length());
  for (double &v : mean) v /= n;
  return mean;
}

PairFeature MakePairFeature(std::span<const double> character,
                            std::span<const double> place) {
  if (character.size() != place.size()) {
    throw InvalidArgument("span vector dimensions differ: " +
                          std::to_string(character.size()) + " vs " +
                          std::to_string(place.size()));
  }
  PairFeature feature(character.begin(), character.end());
  feature.insert(feature.end(), place.begin(), place.end());
  return feature;
}

PairFeature PairFeatureFor(const EmbeddingTable &table, const CandidatePair &pair) {
  const EmbeddingEntry *entry = table.Find(pair.pair_id);
  if (entry == nullptr) {
    throw InvalidArgument("no embeddings for pair '" + pair.pair_id + "'");
  }
  SpanVector c = MeanPool(*entry, table.dim(), {pair.character.start, pair.character.end});
  SpanVector l = MeanPool(*entry, table.dim(), {pair.place.start, pair.place.end});
  return MakePairFeature(c, l);
}

std::vector<float> HashEmbeddingProvider::TokenVector(std::string_view text) const {
  std::vector<float> v(dim_);
  const uint64_t base = Fnv1a64(text, Mix64(seed_));
  for (size_t j = 0; j < dim_; ++j) {
    uint64_t h = Mix64(base ^ Mix64(j + 1));
    double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
    v[j] = static_cast<float>(2.0 * unit - 1.0);
  }
  return v;
}

EmbeddingEntry HashEmbeddingProvider::Embed(const CandidatePair &pair,
                                            const Document &doc,
                                            int64_t width) const {
  TokenRange window = ContextWindow(pair, doc.size(), width);
  EmbeddingEntry entry;
  entry.pair_id = pair.pair_id;
  entry.window_start = window.first;
  entry.window_len = window.length();
  entry.values.reserve(static_cast<size_t>(window.length()) * dim_);
  for (int64_t t = window.first; t <= window.last; ++t) {
    auto v = TokenVector(doc.tokens[static_cast<size_t>(t)].text);
    entry.values.insert(entry.values.end(), v.begin(), v.end());
  }
  return entry;
}

EmbeddingEntry TableEmbeddingProvider::Embed(const CandidatePair &pair,
                                             const Document &doc,
                                             int64_t width) const {
  const EmbeddingEntry *entry = table_.Find(pair.pair_id);
  if (entry == nullptr) {
    throw InvalidArgument("no embeddings for pair '" + pair.pair_id + "'");
  }
  if (entry->window() != ContextWindow(pair, doc.size(), width)) {
    throw InvalidArgument("pair '" + pair.pair_id +
                          "': stored window does not match width " +
                          std::to_string(width));
  }
  return *entry;
}

EmbeddingTable BuildEmbeddingTable(const EmbeddingProvider &provider,
                                   const std::vector<CandidatePair> &pairs,
                                   const std::vector<Document> &docs,
                                   int64_t width) {
  std::unordered_map<std::string, const Document *> by_id;
  for (const Document &d : docs) by_id.emplace(d.doc_id, &d);
  EmbeddingTable table(provider.dim());
  for (const CandidatePair &p : pairs) {
    auto it = by_id.find(p.doc_id);
    if (it == by_id.end()) {
      throw InvalidArgument("pair '" + p.pair_id + "' references unknown document '" +
                            p.doc_id + "'");
    }
    table.Add(provider.Embed(p, *it->second, width));
  }
  return table;
}

std::string SerializeEmbeddings(const EmbeddingTable &table) {
  std::string out(kMagic, sizeof(kMagic));
  PutU32(out, static_cast<uint32_t>(table.dim()));
  PutU32(out, static_cast<uint32_t>(table.size()));
  for (const EmbeddingEntry &e : table.entries()) {
    if (e.pair_id.size() > std::numeric_limits<uint16_t>::max()) {
      throw InvalidArgument("pair_id too long for NGEMB1: " + e.pair_id);
    }
    PutU16(out, static_cast<uint16_t>(e.pair_id.size()));
    out += e.pair_id;
    PutU32(out, static_cast<uint32_t>(e.window_start));
    PutU32(out, static_cast<uint32_t>(e.window_len));
    for (float f : e.values) PutU32(out, std::bit_cast<uint32_t>(f));
  }
  return out;
}

EmbeddingTable ParseEmbeddings(std::string_view bytes) {
  using Code = EmbeddingFormatError::Code;
  Reader in(bytes);
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw EmbeddingFormatError(Code::kBadMagic, "missing NGEMB1 magic");
  }
  in.Bytes(sizeof(kMagic), "magic");
  const uint32_t dim = in.U32("dim");
  const uint32_t count = in.U32("record count");
  if (dim == 0) throw EmbeddingFormatError(Code::kBadShape, "dimension is zero");

  EmbeddingTable table(dim);
  for (uint32_t r = 0; r < count; ++r) {
    EmbeddingEntry e;
    const uint16_t id_len = in.U16("pair_id length");
    e.pair_id = std::string(in.Bytes(id_len, "pair_id"));
    e.window_start = in.U32("window_start");
    e.window_len = in.U32("window_len");
    if (e.window_len == 0) {
      throw EmbeddingFormatError(Code::kBadShape,
                                 "record '" + e.pair_id + "' has an empty window");
    }
    const size_t floats = static_cast<size_t>(e.window_len) * dim;
    if (floats > (bytes.size() - in.pos()) / 4) {
      throw EmbeddingFormatError(Code::kTruncated,
                                 "matrix for '" + e.pair_id + "' is truncated");
    }
    std::string_view raw = in.Bytes(floats * 4, "matrix");
    e.values.resize(floats);
    for (size_t i = 0; i < floats; ++i) {
      uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<uint32_t>(static_cast<uint8_t>(raw[4 * i + b])) << (8 * b);
      }
      e.values[i] = std::bit_cast<float>(bits);
    }
    table.Add(std::move(e));
  }
  if (!in.AtEnd()) {
    throw EmbeddingFormatError(Code::kTrailingData,
                               "unexpected bytes after record " + std::to_string(count));
  }
  return table;
}

EmbeddingTable LoadEmbeddings(const std::string &path) {
  return ParseEmbeddings(ReadFile(path));
}

void WriteEmbeddings(const std::string &path, const EmbeddingTable &table) {
  WriteFileAtomic(path, SerializeEmbeddings(table));
}

}  // namespace grounding
