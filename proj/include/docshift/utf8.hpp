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

#ifndef DOCSHIFT_UTF8_HPP_
#define DOCSHIFT_UTF8_HPP_

#include <string>
#include <string_view>

namespace docshift::utf8 {

// Invalid sequences decode to U+FFFD, one per offending byte.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
std::string encode(char32_t c);

inline std::size_t length(std::string_view s) { return decode(s).size(); }

// ASCII-only case folding.
std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

}  // namespace docshift::utf8

#endif  // DOCSHIFT_UTF8_HPP_
