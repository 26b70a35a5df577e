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

#include "mdd/numcore/archive.h"

#include "mdd/binio.h"
#include "mdd/errors.h"

namespace mdd {

std::string EncodeArchive(std::string_view magic, const TensorArchive& archive) {
  ByteWriter w;
  w.PutBytes(magic);
  w.PutU32(archive.version);
  w.PutString(archive.header);
  w.PutU32(static_cast<std::uint32_t>(archive.tensors.size()));
  for (const auto& t : archive.tensors) {
    w.PutString(t.name);
    w.PutU32(static_cast<std::uint32_t>(t.value.rows()));
    w.PutU32(static_cast<std::uint32_t>(t.value.cols()));
    for (Eigen::Index i = 0; i < t.value.size(); ++i) {
      w.PutF32(static_cast<float>(t.value.data()[i]));
    }
  }
  return w.bytes();
}

TensorArchive DecodeArchive(std::string_view bytes, std::string_view magic,
                            std::uint32_t expected_version, const std::string& what) {
  ByteReader r(bytes, what);
  if (r.GetBytes(magic.size()) != magic) {
    throw ParseError(what + ": bad magic, expected " + std::string(magic));
  }
  TensorArchive a;
  a.version = r.GetU32();
  if (a.version != expected_version) {
    throw SchemaError(what + ": version " + std::to_string(a.version) + ", expected " +
                      std::to_string(expected_version));
  }
  a.header = r.GetString();
  const std::uint32_t count = r.GetU32();
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedTensor t;
    t.name = r.GetString();
    const std::uint32_t rows = r.GetU32();
    const std::uint32_t cols = r.GetU32();
    if (4ULL * rows * cols > r.remaining()) {
      throw ParseError(what + ": tensor " + t.name + " is truncated");
    }
    t.value.resize(rows, cols);
    for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value.data()[i] = r.GetF32();
    a.tensors.push_back(std::move(t));
  }
  if (r.remaining() != 0) throw ParseError(what + ": trailing bytes after last tensor");
  return a;
}

std::vector<NamedTensor> SnapshotParams(const ParamStore& params) {
  std::vector<NamedTensor> out;
  for (const auto& p : params.params()) out.push_back({p.name, p.value});
  return out;
}

void RestoreParams(const std::vector<NamedTensor>& tensors, ParamStore& params) {
  if (tensors.size() != params.size()) {
    throw SchemaError("archive holds " + std::to_string(tensors.size()) + " tensors, model needs " +
                      std::to_string(params.size()));
  }
  for (const auto& t : tensors) {
    if (!params.Contains(t.name)) throw SchemaError("unexpected tensor " + t.name);
    Matrix& dst = params.value(params.IndexOf(t.name));
    if (dst.rows() != t.value.rows() || dst.cols() != t.value.cols()) {
      throw SchemaError("tensor " + t.name + " has shape " + ShapeString(t.value) + ", expected " +
                        ShapeString(dst));
    }
    dst = t.value;
  }
}

void RoundParamsToFloat(ParamStore& params) {
  for (auto& p : params.params()) p.value = RoundToFloat(p.value);
}

}  // namespace mdd
