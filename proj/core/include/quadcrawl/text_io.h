// Copyright 2026 The quadcrawl Authors
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

// Small text helpers shared by the file formats: exact decimal round-trips,
// content hashing and whole-file I/O.

#ifndef QUADCRAWL_TEXT_IO_H_
#define QUADCRAWL_TEXT_IO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace quadcrawl {

// Shortest decimal text that parses back to exactly `value`.
std::string FormatDouble(double value);

// Parses the whole of `text` as a double. Throws std::invalid_argument.
double ParseDouble(std::string_view text);

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view data);
// 16 lowercase hex digits.
std::string HexDigest(uint64_t hash);

// Splits on commas; fields are trimmed of surrounding spaces.
std::vector<std::string> SplitCsvLine(std::string_view line);

// Throw std::runtime_error naming the path on I/O failure.
std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& contents);

}  // namespace quadcrawl

#endif  // QUADCRAWL_TEXT_IO_H_
