// Copyright 2026 The mdd Authors.
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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mdd {

// Append-only little-endian byte buffer.
class ByteWriter {
 public:
  void PutU32(std::uint32_t v);
  void PutF32(float v);
  void PutBytes(std::string_view bytes);
  // u32 length followed by the raw bytes.
  void PutString(std::string_view s);

  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

// Bounds-checked little-endian reader. Running past the end throws
// ParseError naming `what`.
class ByteReader {
 public:
  ByteReader(std::string_view data, std::string what)
      : data_(data), what_(std::move(what)) {}

  std::uint32_t GetU32();
  float GetF32();
  std::string_view GetBytes(std::size_t n);
  std::string GetString();

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::string what_;
};

// Writes `contents` to `path` through a temporary sibling and rename(), so a
// partially written file never appears under the final name. Throws IoError.
void WriteFileAtomic(const std::string& path, std::string_view contents);

// Throws IoError naming the file if it cannot be read.
std::string ReadFile(const std::string& path);

}  // namespace mdd
