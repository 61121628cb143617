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

#ifndef DOCSHIFT_ORACLE_HPP_
#define DOCSHIFT_ORACLE_HPP_

#include <chrono>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "docshift/document.hpp"

namespace docshift {

// Wire version carried by every request and response of both protocols.
constexpr int kOracleProtocolVersion = 1;

// Answers "which label does the model give each word of this page?".
class PredictionOracle {
 public:
  virtual ~PredictionOracle() = default;
  // One label string per word, in word_refs() order.
  virtual std::vector<std::string> predict(const Document& doc) = 0;
};

struct MaskCandidate {
  std::string token;
  double score = 0.0;

  friend bool operator==(const MaskCandidate&, const MaskCandidate&) = default;
};

// Masked language model: top-k fillers for one masked position.
class MaskedLmOracle {
 public:
  virtual ~MaskedLmOracle() = default;
  virtual std::vector<MaskCandidate> fill_mask(std::span<const std::string> words,
                                               std::size_t mask_index, int k) = 0;
};

// Newline-delimited duplex channel.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void send_line(const std::string& line) = 0;
  // Throws OracleError when nothing arrives within `timeout`.
  virtual std::string receive_line(std::chrono::milliseconds timeout) = 0;
};

// Opens a channel from an address:
//   exec:<shell command>   child process speaking on stdin/stdout
//   tcp:<host>:<port>      TCP connection
std::unique_ptr<LineChannel> open_channel(const std::string& address);

// Protocol records. Exposed so servers and tests can speak the same format.
std::string encode_predict_request(const Document& doc);
std::vector<std::string> decode_predict_response(const std::string& line,
                                                 std::size_t expected_words);
std::string encode_fill_mask_request(std::span<const std::string> words,
                                     std::size_t mask_index, int k);
std::vector<MaskCandidate> decode_fill_mask_response(const std::string& line);

class WirePredictionOracle : public PredictionOracle {
 public:
  WirePredictionOracle(std::unique_ptr<LineChannel> channel,
                       std::chrono::milliseconds timeout);
  std::vector<std::string> predict(const Document& doc) override;

 private:
  std::unique_ptr<LineChannel> channel_;
  std::chrono::milliseconds timeout_;
  long requests_ = 0;
};

class WireMaskedLmOracle : public MaskedLmOracle {
 public:
  WireMaskedLmOracle(std::unique_ptr<LineChannel> channel,
                     std::chrono::milliseconds timeout);
  std::vector<MaskCandidate> fill_mask(std::span<const std::string> words,
                                       std::size_t mask_index, int k) override;

 private:
  std::unique_ptr<LineChannel> channel_;
  std::chrono::milliseconds timeout_;
  long requests_ = 0;
};

}  // namespace docshift

#endif  // DOCSHIFT_ORACLE_HPP_
