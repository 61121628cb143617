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

#include "doctest.h"
#include "docshift/errors.hpp"
#include "docshift/metrics.hpp"
#include "docshift/rng.hpp"
#include "docshift/utf8.hpp"
#include "oracles.hpp"

using namespace docshift;

namespace {

// Two question words, then an answer of three words, the layout of the
// hand-worked F1 case: gold {Q[0..2], A[3..5]}.
Document qa_page() {
  Document d;
  d.id = "q";
  d.width = 500;
  d.height = 100;
  auto add = [&](int id, Label label, int n, int x0) {
    Entity e;
    e.id = id;
    e.label = label;
    for (int i = 0; i < n; ++i) e.words.push_back({"w", {x0 + 20 * i, 0, x0 + 20 * i + 15, 10}});
    e.box = {x0, 0, x0 + 20 * (n - 1) + 15, 10};
    e.text = joined_text(e);
    d.entities.push_back(e);
  };
  add(0, Label::kQuestion, 3, 0);
  add(1, Label::kAnswer, 3, 200);
  return d;
}

PredictionSet tags_for(const std::string& id, std::vector<std::string> tags) {
  PredictionSet p;
  p[id].tags = std::move(tags);
  return p;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("BIO decoding is lenient about stray I- tags") {
  const std::vector<std::string> tags{"B-QUESTION", "I-QUESTION", "I-ANSWER", "O",
                                      "I-answer", "I-ANSWER", "B-OTHER"};
  const auto spans = decode_bio(tags);
  REQUIRE(spans.size() == 4);
  CHECK(spans[0] == LabeledSpan{0, 2, Label::kQuestion});
  CHECK(spans[1] == LabeledSpan{2, 3, Label::kAnswer});
  CHECK(spans[2] == LabeledSpan{4, 6, Label::kAnswer});
  CHECK(spans[3] == LabeledSpan{6, 7, Label::kOther});
  const std::vector<std::string> bad{"X-HEADER"};
  CHECK_THROWS_AS(decode_bio(bad), ValidationError);
  const std::vector<std::string> unknown{"B-FOOTER"};
  CHECK_THROWS_AS(decode_bio(unknown), ValidationError);
}

TEST_CASE("entity F1 hand cases") {
  const std::vector<Document> gold{qa_page()};
  const auto perfect = entity_f1(gold, tags_for("q", gold_tags(gold[0])));
  CHECK(*perfect.precision == 1.0);
  CHECK(*perfect.recall == 1.0);
  CHECK(*perfect.f1 == 1.0);

  const auto empty = entity_f1(gold, tags_for("q", std::vector<std::string>(6, "O")));
  CHECK(*empty.precision == 0.0);
  CHECK(*empty.recall == 0.0);
  CHECK(*empty.f1 == 0.0);

  const auto half = entity_f1(
      gold, tags_for("q", {"B-QUESTION", "I-QUESTION", "I-QUESTION", "B-ANSWER", "I-ANSWER", "O"}));
  CHECK(half.matched_count == 1);
  CHECK(*half.precision == 0.5);
  CHECK(*half.recall == 0.5);
  CHECK(*half.f1 == 0.5);
}

TEST_CASE("entity F1 is independent of document order and bounded") {
  Document a = qa_page();
  Document b = qa_page();
  b.id = "r";
  PredictionSet p = tags_for("q", gold_tags(a));
  p["r"].tags = std::vector<std::string>{"B-ANSWER", "O", "O", "B-ANSWER", "I-ANSWER", "I-ANSWER"};
  const auto ab = entity_f1({a, b}, p);
  const auto ba = entity_f1({b, a}, p);
  CHECK(*ab.f1 == *ba.f1);
  CHECK(*ab.precision == doctest::Approx(3.0 / 4.0));
  CHECK(*ab.recall == doctest::Approx(3.0 / 4.0));
  CHECK(*ab.f1 <= std::max(*ab.precision, *ab.recall));
}

TEST_CASE("misaligned predictions are reported") {
  const std::vector<Document> gold{qa_page()};
  CHECK_FALSE(validate_predictions(gold, tags_for("q", {"O"}), Task::kIe).empty());
  CHECK_FALSE(validate_predictions(gold, tags_for("zz", gold_tags(gold[0])), Task::kIe).empty());
  CHECK(validate_predictions(gold, tags_for("q", gold_tags(gold[0])), Task::kIe).empty());
}

TEST_CASE("label error rates pool question and answer") {
  Document d;
  d.id = "e";
  d.width = 400;
  d.height = 100;
  const Label labels[] = {Label::kQuestion, Label::kQuestion, Label::kAnswer, Label::kAnswer,
                          Label::kHeader};
  for (int i = 0; i < 5; ++i) {
    Entity e;
    e.id = i;
    e.label = labels[i];
    e.words.push_back({"w", {i * 50, 0, i * 50 + 40, 10}});
    e.box = e.words[0].box;
    e.text = "w";
    d.entities.push_back(e);
  }
  const std::vector<Document> gold{d};
  const auto rates = label_error_rates(
      gold, tags_for("e", {"B-QUESTION", "B-ANSWER", "B-ANSWER", "B-ANSWER", "O"}));
  CHECK(rates.at("question_or_answer") == 0.25);
  CHECK(rates.at("header") == 1.0);
  CHECK(rates.count("other") == 0);
  const auto perfect = label_error_rates(gold, tags_for("e", gold_tags(d)));
  for (const auto& [k, v] : perfect) CHECK(v == 0.0);
}

TEST_CASE("classification accuracy") {
  std::vector<Document> gold;
  PredictionSet p;
  for (int i = 0; i < 4; ++i) {
    Document d;
    d.id = "c" + std::to_string(i);
    d.width = d.height = 10;
    d.payload = ClassificationPayload{i};
    gold.push_back(d);
    p[d.id].label = i == 3 ? 0 : i;
  }
  CHECK(accuracy(gold, p) == 0.75);
  p["c3"].label = 3;
  CHECK(accuracy(gold, p) == 1.0);
  for (auto& [id, pred] : p) pred.label = 15;
  CHECK(accuracy(gold, p) == 0.0);
  p.erase("c0");
  CHECK_THROWS(accuracy(gold, p));
}

TEST_CASE("ANLS hand cases") {
  const std::vector<std::string> houses{"houses"};
  CHECK(anls(houses, "hoses") == doctest::Approx(1.0 - 1.0 / 6.0).epsilon(1e-12));
  CHECK(anls(houses, "  HOUSES ") == 1.0);
  const std::vector<std::string> abc{"abc"};
  CHECK(anls(abc, "xyz") == 0.0);
  CHECK(anls(abc, "abx", 0.7) == 0.0);
  CHECK(anls(abc, "abx", 0.6) == doctest::Approx(2.0 / 3.0));
  const std::vector<std::string> two{"nope", "Answer"};
  CHECK(anls(two, "answer") == 1.0);
  CHECK_THROWS_AS(anls(std::vector<std::string>{}, "x"), ParameterError);
  CHECK(normalized_similarity("", "") == 1.0);
}

TEST_CASE("levenshtein agrees with the recursive reference") {
  Rng rng(17);
  const std::u32string alphabet = U"abcAB é";
  for (int i = 0; i < 2000; ++i) {
    std::u32string a, b;
    for (std::size_t n = rng.below(9); n > 0; --n) a += alphabet[rng.below(alphabet.size())];
    for (std::size_t n = rng.below(9); n > 0; --n) b += alphabet[rng.below(alphabet.size())];
    REQUIRE(levenshtein(a, b) == docshift::testing::reference_levenshtein(a, b));
  }
}

TEST_CASE("ANLS is non-increasing in tau") {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    std::string g, p;
    for (std::size_t n = 1 + rng.below(8); n > 0; --n) g += static_cast<char>('a' + rng.below(4));
    for (std::size_t n = rng.below(8); n > 0; --n) p += static_cast<char>('a' + rng.below(4));
    const std::vector<std::string> gold{g};
    double prev = 2.0;
    for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double s = anls(gold, p, tau);
      CHECK(s <= prev);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      prev = s;
    }
    CHECK(anls(gold, p, 0.0) == doctest::Approx(normalized_similarity(g, p)));
  }
}

TEST_CASE("dataset ANLS averages over questions") {
  Document d;
  d.id = "v";
  d.width = d.height = 10;
  d.payload = VqaPayload{{{"q1", {"houses"}}, {"q2", {"Blue"}}}};
  PredictionSet p;
  p["v"].answers = std::vector<std::string>{"hoses", "blue"};
  CHECK(dataset_anls({d}, p) == doctest::Approx((5.0 / 6.0 + 1.0) / 2));
}

TEST_CASE("prediction files round trip and reject duplicates") {
  PredictionSet p = tags_for("a", {"B-HEADER", "O"});
  p["b"].tags = std::vector<std::string>{"I-OTHER"};
  const std::string text = serialize_predictions(p, Task::kIe);
  const PredictionSet back = parse_predictions(text, Task::kIe);
  REQUIRE(back.size() == 2);
  CHECK(*back.at("a").tags == *p.at("a").tags);
  CHECK_THROWS(parse_predictions(text + text, Task::kIe));
  CHECK_THROWS(parse_predictions("{\"id\": \"x\"}\n", Task::kIe));
  const auto cls = parse_predictions("{\"id\": \"x\", \"class\": 4}\n\n", Task::kClassification);
  CHECK(*cls.at("x").label == 4);
  const auto vqa = parse_predictions("{\"id\": \"x\", \"answers\": [\"a\"]}\n", Task::kVqa);
  CHECK(vqa.at("x").answers->at(0) == "a");
}

}  // TEST_SUITE
