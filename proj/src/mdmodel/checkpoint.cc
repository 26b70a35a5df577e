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

#include "mdd/mdmodel/checkpoint.h"

#include <sstream>

#include "mdd/binio.h"
#include "mdd/errors.h"

namespace mdd {
namespace {

constexpr char kMetaPrefix[] = "meta.";

}  // namespace

Checkpoint MakeCheckpoint(const MdModel& model, const TrainingMetadata& metadata) {
  Checkpoint c;
  c.config = model.config();
  c.metadata = metadata;
  c.tensors = SnapshotParams(model.params());
  return c;
}

MdModel ModelFromCheckpoint(const Checkpoint& checkpoint) {
  MdModel model(checkpoint.config);
  if (checkpoint.tensors.size() != model.params().size()) {
    throw SchemaError("checkpoint has " + std::to_string(checkpoint.tensors.size()) +
                      " tensors, the model needs " + std::to_string(model.params().size()));
  }
  RestoreParams(checkpoint.tensors, model.params());
  return model;
}

std::string EncodeCheckpoint(const Checkpoint& checkpoint) {
  TensorArchive a;
  a.version = checkpoint.version;
  std::ostringstream h;
  h.precision(17);
  h << EncodeModelConfig(checkpoint.config);
  h << kMetaPrefix << "epoch=" << checkpoint.metadata.epoch << "\n"
    << kMetaPrefix << "epochs_run=" << checkpoint.metadata.epochs_run << "\n"
    << kMetaPrefix << "dev_metric=" << checkpoint.metadata.dev_metric << "\n"
    << kMetaPrefix << "seed=" << checkpoint.metadata.seed << "\n";
  a.header = h.str();
  a.tensors = checkpoint.tensors;
  return EncodeArchive(kCheckpointMagic, a);
}

Checkpoint DecodeCheckpoint(const std::string& bytes, const std::string& what) {
  TensorArchive a = DecodeArchive(bytes, kCheckpointMagic, kCheckpointVersion, what);
  Checkpoint c;
  c.version = a.version;
  std::istringstream in(a.header);
  std::string line;
  std::string config_text;
  bool have[4] = {false, false, false, false};
  try {
    while (std::getline(in, line)) {
      if (line.rfind(kMetaPrefix, 0) != 0) {
        config_text += line + "\n";
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw SchemaError(what + ": bad metadata line: " + line);
      const std::string key = line.substr(sizeof(kMetaPrefix) - 1, eq - (sizeof(kMetaPrefix) - 1));
      const std::string value = line.substr(eq + 1);
      if (key == "epoch") {
        c.metadata.epoch = std::stoi(value);
        have[0] = true;
      } else if (key == "epochs_run") {
        c.metadata.epochs_run = std::stoi(value);
        have[1] = true;
      } else if (key == "dev_metric") {
        c.metadata.dev_metric = std::stod(value);
        have[2] = true;
      } else if (key == "seed") {
        c.metadata.seed = std::stoull(value);
        have[3] = true;
      }
    }
  } catch (const std::logic_error&) {
    throw SchemaError(what + ": malformed metadata value");
  }
  for (bool h : have) {
    if (!h) throw SchemaError(what + ": incomplete training metadata");
  }
  c.config = DecodeModelConfig(config_text);
  c.tensors = std::move(a.tensors);
  return c;
}

void SaveCheckpoint(const Checkpoint& checkpoint, const std::string& path) {
  WriteFileAtomic(path, EncodeCheckpoint(checkpoint));
}

Checkpoint LoadCheckpoint(const std::string& path) {
  return DecodeCheckpoint(ReadFile(path), path);
}

}  // namespace mdd
