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

#ifndef DOCSHIFT_DIGEST_HPP_
#define DOCSHIFT_DIGEST_HPP_

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

namespace docshift {

std::string sha256_hex(std::string_view bytes);

// SHA-256 over every regular file under `root` in sorted relative-path
// order. Each file contributes its relative path, a NUL, its size as
// 8 little-endian bytes, then its contents. Paths in `exclude` (relative,
// generic form) are skipped.
std::string directory_digest(const std::filesystem::path& root,
                             const std::set<std::string>& exclude = {});

}  // namespace docshift

#endif  // DOCSHIFT_DIGEST_HPP_
