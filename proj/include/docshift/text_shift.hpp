// Copyright 2026 The docshift Authors.
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

#ifndef DOCSHIFT_TEXT_SHIFT_HPP_
#define DOCSHIFT_TEXT_SHIFT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "docshift/document.hpp"
#include "docshift/oracle.hpp"

namespace docshift {

enum class SwapMode { kEmbedding, kHomoglyph, kNumber, kCharDelete, kBertAttack };

std::string_view swap_mode_name(SwapMode mode);
SwapMode parse_swap_mode(std::string_view name);

struct SwapConfig {
  SwapMode mode = SwapMode::kCharDelete;
  // Independent per-word selection probability over eligible words.
  double rate = 0.15;
  // Neighbor / candidate count for the embedding and masked-LM modes.
  int k = 8;
  std::uint64_t seed = 0;
};

void check_swap_config(const SwapConfig& cfg);

// Word vectors for nearest-neighbor swaps. Loaded from the plain-text
// "word v1 v2 ... vd" format, one word per line.
class EmbeddingTable {
 public:
  EmbeddingTable(std::vector<std::string> vocabulary,
                 std::vector<std::vector<float>> vectors);

  static EmbeddingTable load(const std::filesystem::path& path);
  static EmbeddingTable parse(std::string_view text);

  std::size_t size() const { return vocabulary_.size(); }
  std::size_t dimension() const { return dimension_; }
  const std::string& word(std::size_t i) const { return vocabulary_[i]; }
  std::optional<std::size_t> find(std::string_view word) const;
  // Up to k vocabulary indices by descending cosine similarity, excluding
  // `index` itself. Ties go to the lower index.
  std::vector<std::size_t> nearest(std::size_t index, int k) const;

 private:
  std::vector<std::string> vocabulary_;
  std::vector<std::vector<float>> unit_vectors_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dimension_ = 0;
};

// Latin-to-lookalike character map, one "<char>\t<lookalike>" pair per line;
// '#' starts a comment.
class HomoglyphTable {
 public:
  static HomoglyphTable load(const std::filesystem::path& path);
  static HomoglyphTable parse(std::string_view text);

  std::optional<char32_t> lookup(char32_t c) const;
  std::size_t size() const { return map_.size(); }

 private:
  std::map<char32_t, char32_t> map_;
};

struct WordChange {
  std::size_t word_index = 0;
  int entity_id = 0;
  std::string before;
  std::string after;
};

struct TextShiftOutcome {
  Document document;
  std::vector<WordChange> changes;
  // Word indices selected for perturbation that stayed unchanged.
  std::vector<std::size_t> flagged;
};

// True when the word has no letter, digit or non-ASCII character.
bool punctuation_only(std::string_view word);

// Removes the codepoint at `index`.
std::string delete_character_at(std::string_view word, std::size_t index);

TextShiftOutcome swap_by_embedding(const Document& doc, const EmbeddingTable& table,
                                   const SwapConfig& cfg);
TextShiftOutcome swap_homoglyph(const Document& doc, const HomoglyphTable& table,
                                const SwapConfig& cfg);
TextShiftOutcome swap_numbers(const Document& doc, const SwapConfig& cfg);
TextShiftOutcome delete_characters(const Document& doc, const SwapConfig& cfg);
TextShiftOutcome bert_attack(const Document& doc, MaskedLmOracle& lm,
                             const SwapConfig& cfg);

}  // namespace docshift

#endif  // DOCSHIFT_TEXT_SHIFT_HPP_
