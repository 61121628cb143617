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

#include <chrono>
#include <csignal>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "docshift/errors.hpp"
#include "docshift/layout_shift.hpp"
#include "docshift/oracle.hpp"
#include "docshift/text_shift.hpp"
#include "support.hpp"

using namespace docshift;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

std::string stub(const std::string& args) {
  return "exec:" + docshift::testing::tool_path("stub_oracle").string() + " " + args;
}

Document small_page() {
  Rng rng(1);
  return docshift::testing::synthetic_form(rng, "o", 300, 200, 5);
}

// stub_oracle serving TCP on a free port for the lifetime of the object.
class TcpStub {
 public:
  explicit TcpStub(const std::string& mode) {
    int fds[2];
    REQUIRE(::pipe(fds) == 0);
    pid_ = ::fork();
    if (pid_ == 0) {
      ::dup2(fds[1], STDOUT_FILENO);
      ::close(fds[0]);
      const std::string path = docshift::testing::tool_path("stub_oracle").string();
      ::execl(path.c_str(), path.c_str(), "--port", "0", "--predict", mode.c_str(),
              static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(fds[1]);
    std::string line;
    char c;
    while (::read(fds[0], &c, 1) == 1 && c != '\n') line += c;
    ::close(fds[0]);
    REQUIRE(line.rfind("listening ", 0) == 0);
    port_ = std::stoi(line.substr(10));
  }
  ~TcpStub() {
    ::kill(pid_, SIGTERM);
    ::waitpid(pid_, nullptr, 0);
  }
  std::string address() const { return "tcp:127.0.0.1:" + std::to_string(port_); }

 private:
  pid_t pid_ = -1;
  int port_ = 0;
};

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("predict requests carry version, id, page size and words") {
  const Document d = small_page();
  const json req = json::parse(encode_predict_request(d));
  CHECK(req["version"] == kOracleProtocolVersion);
  CHECK(req["type"] == "predict");
  CHECK(req["id"] == "o");
  CHECK(req["width"] == 300);
  REQUIRE(req["words"].size() == d.word_count());
  CHECK(req["words"][0]["text"] == d.entities[0].words[0].text);
  const auto& b = d.entities[0].words[0].box;
  CHECK(req["words"][0]["box"] == json::array({b.x1, b.y1, b.x2, b.y2}));
  CHECK(encode_predict_request(d).find('\n') == std::string::npos);
}

TEST_CASE("predict responses are checked") {
  CHECK(decode_predict_response(R"({"version": 1, "labels": ["O", "B-HEADER"]})", 2) ==
        std::vector<std::string>{"O", "B-HEADER"});
  CHECK_THROWS_AS(decode_predict_response(R"({"version": 1, "labels": ["O"]})", 2), OracleError);
  CHECK_THROWS_AS(decode_predict_response(R"({"labels": ["O"]})", 1), OracleError);
  CHECK_THROWS_AS(decode_predict_response(R"({"version": 2, "labels": ["O"]})", 1), OracleError);
  CHECK_THROWS_AS(decode_predict_response(R"({"version": 1, "error": "boom"})", 1), OracleError);
  CHECK_THROWS_AS(decode_predict_response("nonsense", 1), OracleError);
}

TEST_CASE("fill-mask records") {
  const std::vector<std::string> words{"total", "amount", "due"};
  const json req = json::parse(encode_fill_mask_request(words, 1, 5));
  CHECK(req["version"] == 1);
  CHECK(req["type"] == "fill_mask");
  CHECK(req["mask_index"] == 1);
  CHECK(req["k"] == 5);
  CHECK(req["words"] == json(words));
  const auto c = decode_fill_mask_response(
      R"({"version": 1, "candidates": [{"token": "sum", "score": 0.7}, {"token": "fee", "score": 0.2}]})");
  CHECK(c == std::vector<MaskCandidate>{{"sum", 0.7}, {"fee", 0.2}});
  CHECK_THROWS_AS(decode_fill_mask_response(R"({"version": 1, "candidates": [{"token": 3}]})"),
                  OracleError);
  CHECK_THROWS_AS(decode_fill_mask_response(R"({"version": 1})"), OracleError);
}

TEST_CASE("prediction oracle over a child process") {
  const Document d = small_page();
  WirePredictionOracle oracle(open_channel(stub("--predict constant")), 5000ms);
  const auto labels = oracle.predict(d);
  REQUIRE(labels.size() == d.word_count());
  std::size_t i = 0;
  for (const auto& e : d.entities) {
    for (const auto& w : e.words) {
      CHECK(labels[i++] == (w.text.size() % 2 ? "B-QUESTION" : "B-ANSWER"));
    }
  }
  CHECK(oracle.predict(d) == labels);
}

TEST_CASE("layout-sensitive stub drives semantic strength to zero") {
  const Document d = small_page();
  WirePredictionOracle layout(open_channel(stub("--predict layout")), 5000ms);
  const auto scores = score_semantic_strength(d, layout, 10, 3);
  int moved_everything = 0;
  for (const auto& s : scores) moved_everything += s.unchanged == 0;
  CHECK(moved_everything >= 1);

  WirePredictionOracle constant(open_channel(stub("--predict constant")), 5000ms);
  for (const auto& s : score_semantic_strength(d, constant, 10, 3)) CHECK(s.strength() == 1.0);
}

TEST_CASE("masked LM oracle over a child process") {
  WireMaskedLmOracle lm(open_channel(stub("--lm suffix")), 5000ms);
  const std::vector<std::string> words{"two", "house", "party"};
  const auto c = lm.fill_mask(words, 1, 4);
  CHECK(c == std::vector<MaskCandidate>{{"house", 0.9}, {"houses", 0.5}});

  Document d;
  d.id = "m";
  d.width = 200;
  d.height = 50;
  Entity e;
  e.id = 0;
  e.label = Label::kOther;
  e.words = {{"house", {0, 0, 40, 10}}, {"party", {50, 0, 90, 10}}};
  e.box = {0, 0, 90, 10};
  e.text = joined_text(e);
  d.entities.push_back(e);
  const auto out = bert_attack(d, lm, {SwapMode::kBertAttack, 1.0, 8, 1});
  CHECK(out.document.entities[0].words[0].text == "houses");
  CHECK(out.document.entities[0].words[1].text == "partys");

  WireMaskedLmOracle echo(open_channel(stub("--lm echo")), 5000ms);
  const auto flagged = bert_attack(d, echo, {SwapMode::kBertAttack, 1.0, 8, 1});
  CHECK(flagged.document == d);
  CHECK(flagged.flagged.size() == 2);
}

TEST_CASE("malformed responses name the request") {
  WirePredictionOracle oracle(open_channel(stub("--garbage")), 5000ms);
  const Document d = small_page();
  try {
    oracle.predict(d);
    FAIL("expected an oracle error");
  } catch (const OracleError& e) {
    CHECK(e.request_index() == 0);
  }
}

TEST_CASE("dead and silent oracles fail within the timeout") {
  const Document d = small_page();
  WirePredictionOracle dead(open_channel("exec:exit 0"), 2000ms);
  CHECK_THROWS_AS(dead.predict(d), OracleError);

  const auto start = std::chrono::steady_clock::now();
  WirePredictionOracle silent(open_channel("exec:sleep 5"), 200ms);
  CHECK_THROWS_AS(silent.predict(d), OracleError);
  CHECK(std::chrono::steady_clock::now() - start < 3s);

  CHECK_THROWS_AS(open_channel("carrier-pigeon:home"), ParameterError);
}

TEST_CASE("prediction oracle over TCP") {
  TcpStub server("constant");
  const Document d = small_page();
  WirePredictionOracle oracle(open_channel(server.address()), 5000ms);
  const auto labels = oracle.predict(d);
  CHECK(labels.size() == d.word_count());
  WirePredictionOracle exec(open_channel(stub("--predict constant")), 5000ms);
  CHECK(exec.predict(d) == labels);
}

TEST_CASE("unreachable TCP endpoint") {
  CHECK_THROWS_AS(open_channel("tcp:127.0.0.1:1"), OracleError);
  CHECK_THROWS_AS(open_channel("tcp:nohostport"), ParameterError);
}

}  // TEST_SUITE
