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

#include "docshift/oracle.hpp"

#include <csignal>
#include <cstring>
#include <mutex>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "docshift/errors.hpp"

namespace docshift {
namespace {

using nlohmann::json;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

void write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw OracleError(std::string("oracle write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

// Buffered line reader over a file descriptor.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  std::string read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw OracleError("oracle response timed out");
      pollfd pfd{fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw OracleError(std::string("oracle poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) throw OracleError("oracle response timed out");
      char chunk[4096];
      const ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw OracleError(std::string("oracle read failed: ") + std::strerror(errno));
      }
      if (n == 0) throw OracleError("oracle closed the connection");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

class ProcessChannel : public LineChannel {
 public:
  explicit ProcessChannel(const std::string& command) : reader_(-1) {
    ignore_sigpipe();
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
      throw OracleError("cannot create pipes for oracle process");
    }
    pid_ = ::fork();
    if (pid_ < 0) throw OracleError("cannot fork oracle process");
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_ = to_child[1];
    out_ = from_child[0];
    ::fcntl(in_, F_SETFD, FD_CLOEXEC);
    ::fcntl(out_, F_SETFD, FD_CLOEXEC);
    reader_ = LineReader(out_);
  }

  ~ProcessChannel() override {
    ::close(in_);
    ::close(out_);
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) != 0) return;
      ::usleep(10000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }

  void send_line(const std::string& line) override { write_all(in_, line + "\n"); }
  std::string receive_line(std::chrono::milliseconds timeout) override {
    return reader_.read_line(timeout);
  }

 private:
  pid_t pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  LineReader reader_;
};

class TcpChannel : public LineChannel {
 public:
  TcpChannel(const std::string& host, const std::string& port) : reader_(-1) {
    ignore_sigpipe();
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
      throw OracleError("cannot resolve oracle " + host + ":" + port + ": " +
                        ::gai_strerror(rc));
    }
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
      fd_ = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
      if (fd_ < 0) continue;
      if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
      ::close(fd_);
      fd_ = -1;
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw OracleError("cannot connect to oracle " + host + ":" + port);
    reader_ = LineReader(fd_);
  }
  ~TcpChannel() override { ::close(fd_); }

  void send_line(const std::string& line) override { write_all(fd_, line + "\n"); }
  std::string receive_line(std::chrono::milliseconds timeout) override {
    return reader_.read_line(timeout);
  }

 private:
  int fd_ = -1;
  LineReader reader_;
};

json parse_response(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    throw OracleError("malformed oracle response: " + line.substr(0, 200));
  }
  if (!j.is_object()) throw OracleError("oracle response is not an object");
  auto v = j.find("version");
  if (v == j.end() || !v->is_number_integer()) {
    throw OracleError("oracle response lacks a version field");
  }
  if (v->get<int>() != kOracleProtocolVersion) {
    throw OracleError("oracle protocol version " + std::to_string(v->get<int>()) +
                      " != " + std::to_string(kOracleProtocolVersion));
  }
  if (auto err = j.find("error"); err != j.end()) {
    throw OracleError("oracle reported: " +
                      (err->is_string() ? err->get<std::string>() : err->dump()));
  }
  return j;
}

}  // namespace

std::unique_ptr<LineChannel> open_channel(const std::string& address) {
  if (address.rfind("exec:", 0) == 0) {
    return std::make_unique<ProcessChannel>(address.substr(5));
  }
  if (address.rfind("tcp:", 0) == 0) {
    const std::string rest = address.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
      throw ParameterError("tcp oracle address must be tcp:<host>:<port>, got " + address);
    }
    return std::make_unique<TcpChannel>(rest.substr(0, colon), rest.substr(colon + 1));
  }
  throw ParameterError("unsupported oracle address '" + address +
                       "' (expected exec:<command> or tcp:<host>:<port>)");
}

std::string encode_predict_request(const Document& doc) {
  json words = json::array();
  for (const auto& e : doc.entities) {
    for (const auto& w : e.words) {
      words.push_back({{"text", w.text}, {"box", w.box.as_array()}});
    }
  }
  json req = {{"version", kOracleProtocolVersion},
              {"type", "predict"},
              {"id", doc.id},
              {"width", doc.width},
              {"height", doc.height},
              {"words", std::move(words)}};
  return req.dump();
}

std::vector<std::string> decode_predict_response(const std::string& line,
                                                 std::size_t expected_words) {
  const json j = parse_response(line);
  auto labels = j.find("labels");
  if (labels == j.end() || !labels->is_array()) {
    throw OracleError("prediction response lacks a labels array");
  }
  std::vector<std::string> out;
  for (const auto& l : *labels) {
    if (!l.is_string()) throw OracleError("prediction label is not a string");
    out.push_back(l.get<std::string>());
  }
  if (out.size() != expected_words) {
    throw OracleError("prediction response has " + std::to_string(out.size()) +
                      " labels for " + std::to_string(expected_words) + " words");
  }
  return out;
}

std::string encode_fill_mask_request(std::span<const std::string> words,
                                     std::size_t mask_index, int k) {
  json req = {{"version", kOracleProtocolVersion},
              {"type", "fill_mask"},
              {"words", std::vector<std::string>(words.begin(), words.end())},
              {"mask_index", mask_index},
              {"k", k}};
  return req.dump();
}

std::vector<MaskCandidate> decode_fill_mask_response(const std::string& line) {
  const json j = parse_response(line);
  auto cands = j.find("candidates");
  if (cands == j.end() || !cands->is_array()) {
    throw OracleError("fill-mask response lacks a candidates array");
  }
  std::vector<MaskCandidate> out;
  for (const auto& c : *cands) {
    if (!c.is_object() || !c.contains("token") || !c["token"].is_string() ||
        !c.contains("score") || !c["score"].is_number()) {
      throw OracleError("fill-mask candidate must be {token: string, score: number}");
    }
    out.push_back({c["token"].get<std::string>(), c["score"].get<double>()});
  }
  return out;
}

WirePredictionOracle::WirePredictionOracle(std::unique_ptr<LineChannel> channel,
                                           std::chrono::milliseconds timeout)
    : channel_(std::move(channel)), timeout_(timeout) {}

std::vector<std::string> WirePredictionOracle::predict(const Document& doc) {
  const long index = requests_++;
  try {
    channel_->send_line(encode_predict_request(doc));
    return decode_predict_response(channel_->receive_line(timeout_), doc.word_count());
  } catch (const OracleError& e) {
    throw OracleError(std::string(e.what()) + " [document " + doc.id + "]", index);
  }
}

WireMaskedLmOracle::WireMaskedLmOracle(std::unique_ptr<LineChannel> channel,
                                       std::chrono::milliseconds timeout)
    : channel_(std::move(channel)), timeout_(timeout) {}

std::vector<MaskCandidate> WireMaskedLmOracle::fill_mask(std::span<const std::string> words,
                                                         std::size_t mask_index, int k) {
  const long index = requests_++;
  try {
    channel_->send_line(encode_fill_mask_request(words, mask_index, k));
    return decode_fill_mask_response(channel_->receive_line(timeout_));
  } catch (const OracleError& e) {
    throw OracleError(std::string(e.what()) + " [mask_index " +
                          std::to_string(mask_index) + "]",
                      index);
  }
}

}  // namespace docshift
