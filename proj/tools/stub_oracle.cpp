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

// Scripted oracle speaking both line protocols, for tests and dry runs.
//
//   stub_oracle --predict constant   labels depend on word text only
//   stub_oracle --predict layout     labels flip once boxes differ from the
//                                    first request seen for a document
//   stub_oracle --lm suffix          candidates: original (0.9), original+"s" (0.5)
//   stub_oracle --lm echo            only the original word
//   stub_oracle --garbage            answers every request with non-JSON
//   stub_oracle --port N             serve TCP on 127.0.0.1:N instead of stdio;
//                                    N = 0 picks a free port. Prints
//                                    "listening <port>" once ready.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "docshift/oracle.hpp"

namespace {

using nlohmann::json;

struct Behaviour {
  std::string predict = "constant";
  std::string lm = "suffix";
  bool garbage = false;
  std::map<std::string, json> first_boxes;
};

json error_response(const std::string& what) {
  return {{"version", docshift::kOracleProtocolVersion}, {"error", what}};
}

std::string answer(Behaviour& b, const std::string& line) {
  if (b.garbage) return "this is not json";
  json req;
  try {
    req = json::parse(line);
  } catch (const json::parse_error&) {
    return error_response("malformed request").dump();
  }
  if (!req.is_object() || req.value("version", -1) != docshift::kOracleProtocolVersion) {
    return error_response("protocol version mismatch").dump();
  }
  const std::string type = req.value("type", "");
  if (type == "predict") {
    const json& words = req["words"];
    json boxes = json::array();
    for (const auto& w : words) boxes.push_back(w["box"]);
    const std::string id = req.value("id", "");
    const bool first = !b.first_boxes.count(id);
    if (first) b.first_boxes[id] = boxes;
    const bool moved = b.predict == "layout" && b.first_boxes[id] != boxes;
    json labels = json::array();
    for (const auto& w : words) {
      const std::string text = w["text"].get<std::string>();
      labels.push_back(moved ? "B-HEADER" : (text.size() % 2 ? "B-QUESTION" : "B-ANSWER"));
    }
    return json{{"version", docshift::kOracleProtocolVersion}, {"labels", labels}}.dump();
  }
  if (type == "fill_mask") {
    const auto& words = req["words"];
    const std::size_t i = req["mask_index"].get<std::size_t>();
    if (i >= words.size()) return error_response("mask_index out of range").dump();
    const std::string original = words[i].get<std::string>();
    json cands = json::array({{{"token", original}, {"score", 0.9}}});
    if (b.lm == "suffix") cands.push_back({{"token", original + "s"}, {"score", 0.5}});
    return json{{"version", docshift::kOracleProtocolVersion}, {"candidates", cands}}.dump();
  }
  return error_response("unknown request type '" + type + "'").dump();
}

void serve_stdio(Behaviour& b) {
  std::string line;
  while (std::getline(std::cin, line)) std::cout << answer(b, line) << std::endl;
}

void serve_tcp(Behaviour& b, int port) {
  const int server = ::socket(AF_INET, SOCK_STREAM, 0);
  int one = 1;
  ::setsockopt(server, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(server, 8) != 0) {
    std::cerr << "cannot listen on port " << port << "\n";
    std::exit(1);
  }
  socklen_t len = sizeof addr;
  ::getsockname(server, reinterpret_cast<sockaddr*>(&addr), &len);
  std::cout << "listening " << ntohs(addr.sin_port) << std::endl;
  for (;;) {
    const int conn = ::accept(server, nullptr, nullptr);
    if (conn < 0) continue;
    std::string buffer;
    char chunk[4096];
    ssize_t n;
    while ((n = ::read(conn, chunk, sizeof chunk)) > 0) {
      buffer.append(chunk, static_cast<std::size_t>(n));
      for (auto nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n')) {
        const std::string reply = answer(b, buffer.substr(0, nl)) + "\n";
        buffer.erase(0, nl + 1);
        if (::write(conn, reply.data(), reply.size()) < 0) break;
      }
    }
    ::close(conn);
  }
}

}  // namespace

int main(int argc, char** argv) {
  Behaviour b;
  int port = -1;
  CLI::App app{"scripted oracle"};
  app.add_option("--predict", b.predict)->check(CLI::IsMember({"constant", "layout"}));
  app.add_option("--lm", b.lm)->check(CLI::IsMember({"suffix", "echo"}));
  app.add_flag("--garbage", b.garbage);
  app.add_option("--port", port);
  CLI11_PARSE(app, argc, argv);
  if (port >= 0) {
    serve_tcp(b, port);
  } else {
    serve_stdio(b);
  }
  return 0;
}
