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

#ifndef DOCSHIFT_ERRORS_HPP_
#define DOCSHIFT_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace docshift {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed annotation or prediction record. `path` names the offending
// location inside the record, e.g. "form[3].words[0].box".
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)), detail_(what) {}
  const std::string& path() const { return path_; }
  // The message without the path prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::string path_;
  std::string detail_;
};

// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Out-of-range operation or configuration parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// No feasible placement for a moved entity.
class PlacementError : public Error {
 public:
  using Error::Error;
};

// Prediction or masked-LM oracle unreachable, timed out, or off-protocol.
class OracleError : public Error {
 public:
  OracleError(const std::string& what, long request_index = -1)
      : Error(request_index >= 0
                  ? what + " (request " + std::to_string(request_index) + ")"
                  : what),
        request_index_(request_index) {}
  long request_index() const { return request_index_; }

 private:
  long request_index_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Predictions that cannot be lined up with the gold data.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

}  // namespace docshift

#endif  // DOCSHIFT_ERRORS_HPP_
