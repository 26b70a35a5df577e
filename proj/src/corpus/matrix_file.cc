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

#include "mdd/corpus/matrix_file.h"

#include "mdd/binio.h"
#include "mdd/errors.h"

namespace mdd {

std::string EncodeMatrixFile(const Matrix& m, std::string_view magic) {
  ByteWriter w;
  w.PutBytes(magic);
  w.PutU32(kMatrixFileVersion);
  w.PutU32(static_cast<std::uint32_t>(m.rows()));
  w.PutU32(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      w.PutF32(static_cast<float>(m(r, c)));
    }
  }
  return w.bytes();
}

Matrix DecodeMatrixFile(std::string_view bytes, std::string_view magic,
                        const std::string& what) {
  ByteReader r(bytes, what);
  if (r.GetBytes(4) != magic) {
    throw ParseError(what + ": bad magic, expected " + std::string(magic));
  }
  const std::uint32_t version = r.GetU32();
  if (version != kMatrixFileVersion) {
    throw SchemaError(what + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t rows = r.GetU32();
  const std::uint32_t cols = r.GetU32();
  const std::uint64_t expected = 4ULL * rows * cols;
  if (r.remaining() != expected) {
    throw SchemaError(what + ": header declares " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " values but payload has " +
                      std::to_string(r.remaining()) + " bytes");
  }
  Matrix m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = r.GetF32();
  }
  return m;
}

void WriteMatrixFile(const std::string& path, const Matrix& m,
                     std::string_view magic) {
  WriteFileAtomic(path, EncodeMatrixFile(m, magic));
}

Matrix ReadMatrixFile(const std::string& path, std::string_view magic) {
  return DecodeMatrixFile(ReadFile(path), magic, path);
}

}  // namespace mdd
