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

#include "mdd/numcore/matrix.h"

namespace mdd {

inline constexpr std::string_view kFeatureMagic = "MDFT";
inline constexpr std::string_view kPosteriorgramMagic = "MDPG";
inline constexpr std::uint32_t kMatrixFileVersion = 1;

// Layout: 4-byte magic, u32 version, u32 rows, u32 cols, then rows*cols
// little-endian float32 values, row-major.
std::string EncodeMatrixFile(const Matrix& m, std::string_view magic);

// Wrong magic -> ParseError; unknown version or a payload that disagrees
// with the header -> SchemaError.
Matrix DecodeMatrixFile(std::string_view bytes, std::string_view magic,
                        const std::string& what);

void WriteMatrixFile(const std::string& path, const Matrix& m,
                     std::string_view magic);
Matrix ReadMatrixFile(const std::string& path, std::string_view magic);

}  // namespace mdd
