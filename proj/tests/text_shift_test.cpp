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

#include <cmath>
#include <set>

#include "doctest.h"
#include "docshift/config.hpp"
#include "docshift/errors.hpp"
#include "docshift/text_shift.hpp"
#include "docshift/utf8.hpp"
#include "support.hpp"

using namespace docshift;

namespace {

Document words_page(const std::vector<std::string>& words) {
  Document d;
  d.id = "t";
  d.width = 1000;
  d.height = 100;
  Entity e;
  e.id = 0;
  e.label = Label::kAnswer;
  int x = 0;
  for (const auto& w : words) {
    e.words.push_back({w, {x, 10, x + 40, 30}});
    x += 45;
  }
  e.box = {0, 10, x - 5, 30};
  e.text = joined_text(e);
  d.entities.push_back(e);
  return d;
}

SwapConfig cfg(SwapMode mode, double rate, std::uint64_t seed = 1, int k = 8) {
  return SwapConfig{mode, rate, k, seed};
}

std::vector<std::string> texts(const Document& d) {
  std::vector<std::string> out;
  for (const auto& e : d.entities) {
    for (const auto& w : e.words) out.push_back(w.text);
  }
  return out;
}

HomoglyphTable shipped_homoglyphs() { return HomoglyphTable::load(default_homoglyph_table()); }

const char* kToyTable =
    "invoice 1.0 0.1 0.0\n"
    "receipt 0.9 0.2 0.0\n"
    "banana 0.0 0.0 1.0\n";

class FixedLm : public MaskedLmOracle {
 public:
  explicit FixedLm(std::vector<MaskCandidate> c) : candidates_(std::move(c)) {}
  std::vector<MaskCandidate> fill_mask(std::span<const std::string> words, std::size_t mask_index,
                                       int) override {
    ++calls;
    last_masked = words[mask_index];
    return candidates_;
  }
  int calls = 0;
  std::string last_masked;

 private:
  std::vector<MaskCandidate> candidates_;
};

}  // namespace

TEST_SUITE("text-shift") {

TEST_CASE("character deletion at index 2 turns houses into hoses") {
  CHECK(delete_character_at("houses", 2) == "hoses");
  CHECK(delete_character_at("h\xc3\xa9llo", 1) == "hllo");
}

TEST_CASE("delete_characters drops exactly one character of eligible words") {
  const Document d = words_page({"houses", "a", "TOTAL", "--", "2023"});
  const auto out = delete_characters(d, cfg(SwapMode::kCharDelete, 1.0));
  const auto before = texts(d);
  const auto after = texts(out.document);
  CHECK(after[1] == "a");
  CHECK(after[3] == "--");
  for (std::size_t i : {0u, 2u, 4u}) CHECK(utf8::length(after[i]) == utf8::length(before[i]) - 1);
  CHECK(out.changes.size() == 3);
  CHECK(out.document.entities[0].text == joined_text(out.document.entities[0]));
}

TEST_CASE("rate zero leaves every mode unchanged") {
  const Document d = words_page({"invoice", "code", "2023", "houses"});
  const auto table = EmbeddingTable::parse(kToyTable);
  const auto glyphs = shipped_homoglyphs();
  CHECK(swap_by_embedding(d, table, cfg(SwapMode::kEmbedding, 0)).document == d);
  CHECK(swap_homoglyph(d, glyphs, cfg(SwapMode::kHomoglyph, 0)).document == d);
  CHECK(swap_numbers(d, cfg(SwapMode::kNumber, 0)).document == d);
  CHECK(delete_characters(d, cfg(SwapMode::kCharDelete, 0)).document == d);
  FixedLm lm({{"x", 1.0}});
  CHECK(bert_attack(d, lm, cfg(SwapMode::kBertAttack, 0)).document == d);
  CHECK(lm.calls == 0);
}

TEST_CASE("toy embedding table: nearest neighbour of invoice is receipt") {
  const auto table = EmbeddingTable::parse(kToyTable);
  // Cosine oracle over all pairs.
  auto cosine = [](std::vector<double> a, std::vector<double> b) {
    double dot = 0, na = 0, nb = 0;
    for (int i = 0; i < 3; ++i) {
      dot += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    return dot / std::sqrt(na * nb);
  };
  CHECK(cosine({1, 0.1, 0}, {0.9, 0.2, 0}) > cosine({1, 0.1, 0}, {0, 0, 1}));
  CHECK(table.nearest(*table.find("invoice"), 1) == std::vector<std::size_t>{1});

  const Document d = words_page({"invoice", "Invoice", "unknownword", "invoice,"});
  const auto out = swap_by_embedding(d, table, cfg(SwapMode::kEmbedding, 1.0, 3, 1));
  const auto after = texts(out.document);
  CHECK(after[0] == "receipt");
  CHECK(after[1] == "Receipt");
  CHECK(after[2] == "unknownword");
  CHECK(after[3] == "receipt,");
}

TEST_CASE("embedding table validation") {
  CHECK_THROWS_AS(EmbeddingTable({}, {}), ParameterError);
  CHECK_THROWS_AS(EmbeddingTable({"a", "b"}, {{1, 0}, {1}}), ParameterError);
  CHECK_THROWS_AS(EmbeddingTable({"a"}, {{0, 0}}), ParameterError);
  const auto t = EmbeddingTable::parse("3 2\nx 1 0\ny 0 1\nz 1 1\n");
  CHECK(t.size() == 3);
  CHECK(t.dimension() == 2);
  CHECK(t.nearest(0, 5) == std::vector<std::size_t>{2, 1});
}

TEST_CASE("homoglyph swap maps every character of code per the shipped table") {
  const auto table = shipped_homoglyphs();
  CHECK(table.size() >= 30);
  const Document d = words_page({"code", "###"});
  const auto out = swap_homoglyph(d, table, cfg(SwapMode::kHomoglyph, 1.0));
  const std::u32string before = utf8::decode("code");
  const std::u32string after = utf8::decode(texts(out.document)[0]);
  REQUIRE(after.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(table.lookup(before[i]).has_value());
    CHECK(after[i] == *table.lookup(before[i]));
  }
  CHECK(texts(out.document)[1] == "###");
}

TEST_CASE("homoglyph table parsing") {
  const auto t = HomoglyphTable::parse("# comment\na\t\xd0\xb0\n\n0\tO  # zero\n");
  CHECK(t.size() == 2);
  CHECK(t.lookup(U'a') == U'а');
  CHECK(t.lookup(U'0') == U'O');
  CHECK_FALSE(t.lookup(U'b').has_value());
  CHECK_THROWS(HomoglyphTable::parse("ab\tc\n"));
}

TEST_CASE("number swap changes every digit to a different digit") {
  const Document d = words_page({"2023", "TOTAL", "$1,250.00"});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto out = swap_numbers(d, cfg(SwapMode::kNumber, 1.0, seed));
    const auto before = texts(d);
    const auto after = texts(out.document);
    CHECK(after[1] == "TOTAL");
    for (std::size_t w : {0u, 2u}) {
      REQUIRE(after[w].size() == before[w].size());
      for (std::size_t i = 0; i < before[w].size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(before[w][i]))) {
          CHECK(std::isdigit(static_cast<unsigned char>(after[w][i])));
          CHECK(after[w][i] != before[w][i]);
        } else {
          CHECK(after[w][i] == before[w][i]);
        }
      }
    }
    CHECK(swap_numbers(d, cfg(SwapMode::kNumber, 1.0, seed)).document == out.document);
  }
}

TEST_CASE("bert attack takes the best candidate that differs from the original") {
  const Document d = words_page({"invoice"});
  FixedLm lm({{"Invoice", 0.95}, {"receipt", 0.9}, {"invoice", 0.1}});
  const auto out = bert_attack(d, lm, cfg(SwapMode::kBertAttack, 1.0));
  CHECK(texts(out.document)[0] == "receipt");
  CHECK(lm.last_masked == "invoice");
  CHECK(out.flagged.empty());
}

TEST_CASE("bert attack flags words when every candidate is the original") {
  const Document d = words_page({"alpha", "beta"});
  struct Same : MaskedLmOracle {
    std::vector<MaskCandidate> fill_mask(std::span<const std::string> words, std::size_t i,
                                         int) override {
      return {{words[i], 1.0}};
    }
  } lm;
  const auto out = bert_attack(d, lm, cfg(SwapMode::kBertAttack, 1.0));
  CHECK(out.document == d);
  CHECK(out.flagged == std::vector<std::size_t>{0, 1});
  CHECK(out.changes.empty());
}

TEST_CASE("bert attack is deterministic and propagates oracle failures") {
  Rng rng(2);
  const Document d = docshift::testing::synthetic_form(rng, "b");
  FixedLm a({{"zzz", 0.5}}), b({{"zzz", 0.5}});
  const auto first = bert_attack(d, a, cfg(SwapMode::kBertAttack, 0.5, 9));
  const auto second = bert_attack(d, b, cfg(SwapMode::kBertAttack, 0.5, 9));
  CHECK(first.document == second.document);
  struct Down : MaskedLmOracle {
    std::vector<MaskCandidate> fill_mask(std::span<const std::string>, std::size_t, int) override {
      throw OracleError("connection refused", 0);
    }
  } down;
  CHECK_THROWS_AS(bert_attack(d, down, cfg(SwapMode::kBertAttack, 1.0)), OracleError);
}

TEST_CASE("swap config validation") {
  CHECK_THROWS_AS(check_swap_config(cfg(SwapMode::kNumber, -0.1)), ParameterError);
  CHECK_THROWS_AS(check_swap_config(cfg(SwapMode::kNumber, 1.5)), ParameterError);
  CHECK_THROWS_AS(check_swap_config(cfg(SwapMode::kEmbedding, 0.5, 1, 0)), ParameterError);
  CHECK_NOTHROW(check_swap_config(cfg(SwapMode::kCharDelete, 1.0)));
  CHECK(parse_swap_mode("homoglyph") == SwapMode::kHomoglyph);
  CHECK(swap_mode_name(SwapMode::kCharDelete) == "char_delete");
  CHECK_THROWS(parse_swap_mode("typo"));
}

TEST_CASE("text shifts keep boxes, labels and word counts") {
  Rng rng(6);
  const auto glyphs = shipped_homoglyphs();
  for (int i = 0; i < 20; ++i) {
    const Document d = docshift::testing::synthetic_form(rng, "d" + std::to_string(i));
    const SwapConfig c = cfg(SwapMode::kCharDelete, 0.5, i);
    for (const auto& out : {delete_characters(d, c), swap_numbers(d, c),
                            swap_homoglyph(d, glyphs, c)}) {
      REQUIRE(out.document.entities.size() == d.entities.size());
      for (std::size_t e = 0; e < d.entities.size(); ++e) {
        const auto& a = d.entities[e];
        const auto& b = out.document.entities[e];
        CHECK(a.box == b.box);
        CHECK(a.label == b.label);
        CHECK(a.links == b.links);
        REQUIRE(a.words.size() == b.words.size());
        for (std::size_t w = 0; w < a.words.size(); ++w) CHECK(a.words[w].box == b.words[w].box);
      }
      for (const auto& ch : out.changes) CHECK(ch.before != ch.after);
    }
  }
}

}  // TEST_SUITE
