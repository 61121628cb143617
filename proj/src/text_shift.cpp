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

#include "docshift/text_shift.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "docshift/errors.hpp"
#include "docshift/rng.hpp"
#include "docshift/utf8.hpp"

namespace docshift {
namespace {

bool is_ascii_punct(char32_t c) {
  return c < 0x80 && (std::ispunct(static_cast<int>(c)) || std::isspace(static_cast<int>(c)));
}

bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using Mutator =
    std::function<std::optional<std::string>(const std::vector<std::string>&, std::size_t, Rng&)>;
using Eligibility = std::function<bool(const std::string&)>;

// Shared selection loop: every eligible word is picked with probability
// cfg.rate, then handed to the mode's mutator.
TextShiftOutcome perturb(const Document& doc, const SwapConfig& cfg,
                         const Eligibility& eligible, const Mutator& mutate) {
  check_swap_config(cfg);
  TextShiftOutcome out{doc, {}, {}};
  const auto refs = word_refs(doc);
  std::vector<std::string> words;
  words.reserve(refs.size());
  for (const auto& r : refs) words.push_back(doc.entities[r.entity].words[r.word].text);

  Rng rng(derive_seed(cfg.seed, doc.id));
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const std::string before = words[i];
    if (punctuation_only(before) || !eligible(before)) continue;
    if (!rng.bernoulli(cfg.rate)) continue;
    const auto after = mutate(words, i, rng);
    if (!after || *after == before) {
      out.flagged.push_back(i);
      continue;
    }
    words[i] = *after;
    Entity& e = out.document.entities[refs[i].entity];
    e.words[refs[i].word].text = *after;
    e.text = joined_text(e);
    out.changes.push_back({i, e.id, before, *after});
  }
  return out;
}

// Splits "(Invoice):" into "(", "Invoice", "):".
struct Affixed {
  std::string prefix, core, suffix;
};

Affixed split_affixes(const std::string& word) {
  const auto cps = utf8::decode(word);
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && is_ascii_punct(cps[b])) ++b;
  while (e > b && is_ascii_punct(cps[e - 1])) --e;
  return {utf8::encode(std::u32string_view(cps).substr(0, b)),
          utf8::encode(std::u32string_view(cps).substr(b, e - b)),
          utf8::encode(std::u32string_view(cps).substr(e))};
}

// Carries the capitalization pattern of `like` over to `word`.
std::string match_case(const std::string& word, const std::string& like) {
  int letters = 0, upper = 0;
  for (unsigned char c : like) {
    if (std::isalpha(c)) {
      ++letters;
      if (std::isupper(c)) ++upper;
    }
  }
  std::string out = word;
  if (letters >= 2 && upper == letters) {
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (!like.empty() && std::isupper(static_cast<unsigned char>(like[0])) &&
             !out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::optional<std::size_t> lookup_core(const EmbeddingTable& table, const std::string& core) {
  if (core.empty()) return std::nullopt;
  if (auto i = table.find(core)) return i;
  return table.find(utf8::to_lower_ascii(core));
}

}  // namespace

std::string_view swap_mode_name(SwapMode mode) {
  switch (mode) {
    case SwapMode::kEmbedding: return "embedding";
    case SwapMode::kHomoglyph: return "homoglyph";
    case SwapMode::kNumber: return "number";
    case SwapMode::kCharDelete: return "char_delete";
    case SwapMode::kBertAttack: return "bert_attack";
  }
  return "char_delete";
}

SwapMode parse_swap_mode(std::string_view name) {
  if (name == "embedding") return SwapMode::kEmbedding;
  if (name == "homoglyph") return SwapMode::kHomoglyph;
  if (name == "number") return SwapMode::kNumber;
  if (name == "char_delete") return SwapMode::kCharDelete;
  if (name == "bert_attack") return SwapMode::kBertAttack;
  throw ParameterError("unknown swap mode '" + std::string(name) + "'");
}

void check_swap_config(const SwapConfig& cfg) {
  if (!(cfg.rate >= 0.0 && cfg.rate <= 1.0)) {
    throw ParameterError("swap rate must lie in [0, 1], got " + std::to_string(cfg.rate));
  }
  if ((cfg.mode == SwapMode::kEmbedding || cfg.mode == SwapMode::kBertAttack) && cfg.k < 1) {
    throw ParameterError("k must be at least 1, got " + std::to_string(cfg.k));
  }
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> vocabulary,
                               std::vector<std::vector<float>> vectors)
    : vocabulary_(std::move(vocabulary)) {
  if (vocabulary_.empty()) throw ParameterError("embedding table is empty");
  if (vectors.size() != vocabulary_.size()) {
    throw ParameterError("embedding table has " + std::to_string(vocabulary_.size()) +
                         " words but " + std::to_string(vectors.size()) + " vectors");
  }
  dimension_ = vectors.front().size();
  if (dimension_ == 0) throw ParameterError("embedding vectors have dimension 0");
  unit_vectors_.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto& v = vectors[i];
    if (v.size() != dimension_) {
      throw ParameterError("embedding for '" + vocabulary_[i] + "' has dimension " +
                           std::to_string(v.size()) + ", expected " +
                           std::to_string(dimension_));
    }
    double norm = 0.0;
    for (float x : v) norm += static_cast<double>(x) * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ParameterError("embedding for '" + vocabulary_[i] + "' has zero norm");
    }
    for (auto& x : v) x = static_cast<float>(x / norm);
    unit_vectors_.push_back(std::move(v));
    index_.emplace(vocabulary_[i], i);  // first occurrence wins
  }
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

EmbeddingTable EmbeddingTable::parse(std::string_view text) {
  std::vector<std::string> vocab;
  std::vector<std::vector<float>> vectors;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<float> v;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stof(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno), "bad vector component '" + tok + "'");
      }
    }
    // word2vec text files start with a "<count> <dim>" header line.
    if (lineno == 1 && v.size() == 1 &&
        std::all_of(word.begin(), word.end(), [](unsigned char c) { return std::isdigit(c); })) {
      continue;
    }
    vocab.push_back(std::move(word));
    vectors.push_back(std::move(v));
  }
  return EmbeddingTable(std::move(vocab), std::move(vectors));
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> EmbeddingTable::nearest(std::size_t index, int k) const {
  const auto& q = unit_vectors_[index];
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (i == index || vocabulary_[i] == vocabulary_[index]) continue;
    double dot = 0.0;
    for (std::size_t d = 0; d < dimension_; ++d) {
      dot += static_cast<double>(q[d]) * unit_vectors_[i][d];
    }
    scored.emplace_back(-dot, i);
  }
  const std::size_t take = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(k));
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].second);
  return out;
}

HomoglyphTable HomoglyphTable::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

HomoglyphTable HomoglyphTable::parse(std::string_view text) {
  HomoglyphTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string trimmed = utf8::trim(line);
    if (trimmed.empty()) continue;
    std::istringstream fields(trimmed);
    std::string from, to;
    fields >> from >> to;
    const auto f = utf8::decode(from);
    const auto t = utf8::decode(to);
    if (f.size() != 1 || t.size() != 1) {
      throw ParseError("line " + std::to_string(lineno),
                       "expected two single characters separated by whitespace");
    }
    table.map_[f[0]] = t[0];
  }
  return table;
}

std::optional<char32_t> HomoglyphTable::lookup(char32_t c) const {
  auto it = map_.find(c);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

bool punctuation_only(std::string_view word) {
  const auto cps = utf8::decode(word);
  return std::all_of(cps.begin(), cps.end(), is_ascii_punct);
}

std::string delete_character_at(std::string_view word, std::size_t index) {
  auto cps = utf8::decode(word);
  if (index >= cps.size()) {
    throw ParameterError("deletion index " + std::to_string(index) + " out of range for '" +
                         std::string(word) + "'");
  }
  cps.erase(cps.begin() + static_cast<std::ptrdiff_t>(index));
  return utf8::encode(cps);
}

TextShiftOutcome swap_by_embedding(const Document& doc, const EmbeddingTable& table,
                                   const SwapConfig& cfg) {
  if (table.size() == 0) throw ParameterError("embedding table is empty");
  return perturb(
      doc, cfg,
      [&](const std::string& w) { return lookup_core(table, split_affixes(w).core).has_value(); },
      [&](const std::vector<std::string>& words, std::size_t i,
          Rng& rng) -> std::optional<std::string> {
        const auto parts = split_affixes(words[i]);
        const auto neighbors = table.nearest(*lookup_core(table, parts.core), cfg.k);
        if (neighbors.empty()) return std::nullopt;
        const auto& pick = table.word(neighbors[rng.below(neighbors.size())]);
        return parts.prefix + match_case(pick, parts.core) + parts.suffix;
      });
}

TextShiftOutcome swap_homoglyph(const Document& doc, const HomoglyphTable& table,
                                const SwapConfig& cfg) {
  return perturb(
      doc, cfg,
      [&](const std::string& w) {
        const auto cps = utf8::decode(w);
        return std::any_of(cps.begin(), cps.end(),
                           [&](char32_t c) { return table.lookup(c).has_value(); });
      },
      [&](const std::vector<std::string>& words, std::size_t i,
          Rng&) -> std::optional<std::string> {
        auto cps = utf8::decode(words[i]);
        for (auto& c : cps) {
          if (auto m = table.lookup(c)) c = *m;
        }
        return utf8::encode(cps);
      });
}

TextShiftOutcome swap_numbers(const Document& doc, const SwapConfig& cfg) {
  return perturb(
      doc, cfg,
      [](const std::string& w) {
        return std::any_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; });
      },
      [](const std::vector<std::string>& words, std::size_t i,
         Rng& rng) -> std::optional<std::string> {
        std::string out = words[i];
        for (auto& c : out) {
          if (!is_ascii_digit(static_cast<unsigned char>(c))) continue;
          // One of the nine other digits.
          const int old = c - '0';
          const int draw = static_cast<int>(rng.below(9));
          c = static_cast<char>('0' + (draw >= old ? draw + 1 : draw));
        }
        return out;
      });
}

TextShiftOutcome delete_characters(const Document& doc, const SwapConfig& cfg) {
  return perturb(
      doc, cfg, [](const std::string& w) { return utf8::length(w) >= 2; },
      [](const std::vector<std::string>& words, std::size_t i,
         Rng& rng) -> std::optional<std::string> {
        const std::size_t n = utf8::length(words[i]);
        return delete_character_at(words[i], rng.below(n));
      });
}

TextShiftOutcome bert_attack(const Document& doc, MaskedLmOracle& lm, const SwapConfig& cfg) {
  return perturb(
      doc, cfg, [](const std::string&) { return true; },
      [&](const std::vector<std::string>& words, std::size_t i,
          Rng&) -> std::optional<std::string> {
        const auto candidates = lm.fill_mask(words, i, cfg.k);
        const std::string original = utf8::to_lower_ascii(utf8::trim(words[i]));
        const MaskCandidate* best = nullptr;
        for (const auto& c : candidates) {
          const std::string token = utf8::trim(c.token);
          if (token.empty() || token.find_first_of(" \t\r\n") != std::string::npos) continue;
          if (utf8::to_lower_ascii(token) == original) continue;
          if (best == nullptr || c.score > best->score) best = &c;
        }
        if (best == nullptr) return std::nullopt;
        return utf8::trim(best->token);
      });
}

}  // namespace docshift
