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

#include "mdd/experiment/config.h"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "mdd/binio.h"
#include "mdd/errors.h"
#include "mdd/rng.h"

namespace mdd {
namespace {

struct Field {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest text that parses back to the same double.
std::string FormatDouble(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

long long ParseInteger(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used == v.size()) return x;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("config key " + key + ": expected an integer, got '" + v + "'");
}

double ParseReal(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("config key " + key + ": expected a number, got '" + v + "'");
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config key " + key + ": expected a boolean, got '" + v + "'");
}

template <typename Member>
Field IntField(const std::string& key, Member member) {
  return {[member](const ExperimentConfig& c) { return std::to_string(member(const_cast<ExperimentConfig&>(c))); },
          [member, key](ExperimentConfig& c, const std::string& v) {
            member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(ParseInteger(key, v));
          }};
}

template <typename Member>
Field RealField(const std::string& key, Member member) {
  return {[member](const ExperimentConfig& c) { return FormatDouble(member(const_cast<ExperimentConfig&>(c))); },
          [member, key](ExperimentConfig& c, const std::string& v) { member(c) = ParseReal(key, v); }};
}

template <typename Member>
Field BoolField(const std::string& key, Member member) {
  return {[member](const ExperimentConfig& c) {
            return std::string(member(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
          },
          [member, key](ExperimentConfig& c, const std::string& v) { member(c) = ParseBool(key, v); }};
}

template <typename Member>
Field StringField(Member member) {
  return {[member](const ExperimentConfig& c) { return member(const_cast<ExperimentConfig&>(c)); },
          [member](ExperimentConfig& c, const std::string& v) { member(c) = v; }};
}

#define MDD_MEMBER(expr) [](ExperimentConfig& c) -> auto& { return c.expr; }

const std::map<std::string, Field>& Fields() {
  static const std::map<std::string, Field> fields = [] {
    std::map<std::string, Field> f;
    f["work_dir"] = StringField(MDD_MEMBER(work_dir));
    f["corpus_dir"] = StringField(MDD_MEMBER(corpus_dir));
    f["seed"] = IntField("seed", MDD_MEMBER(seed));
    f["input_aug"] = BoolField("input_aug", MDD_MEMBER(input_aug));
    f["label_aug"] = BoolField("label_aug", MDD_MEMBER(label_aug));
    f["spec_augment"] = BoolField("spec_augment", MDD_MEMBER(spec_augment));

    f["corpus.train"] = IntField("corpus.train", MDD_MEMBER(corpus.counts.train));
    f["corpus.dev"] = IntField("corpus.dev", MDD_MEMBER(corpus.counts.dev));
    f["corpus.test"] = IntField("corpus.test", MDD_MEMBER(corpus.counts.test));
    f["corpus.l1_train_fraction"] = RealField("corpus.l1_train_fraction", MDD_MEMBER(corpus.l1_train_fraction));
    f["corpus.p_sub"] = RealField("corpus.p_sub", MDD_MEMBER(corpus.error_model.p_sub));
    f["corpus.p_del"] = RealField("corpus.p_del", MDD_MEMBER(corpus.error_model.p_del));
    f["corpus.p_ins"] = RealField("corpus.p_ins", MDD_MEMBER(corpus.error_model.p_ins));
    f["corpus.p_distort"] = RealField("corpus.p_distort", MDD_MEMBER(corpus.error_model.p_distort));
    f["corpus.prototype_shift"] = RealField("corpus.prototype_shift", MDD_MEMBER(corpus.error_model.prototype_shift));
    f["corpus.feature_dim"] = IntField("corpus.feature_dim", MDD_MEMBER(corpus.feature_dim));
    f["corpus.frames_per_phone"] = IntField("corpus.frames_per_phone", MDD_MEMBER(corpus.frames_per_phone));
    f["corpus.noise_stddev"] = RealField("corpus.noise_stddev", MDD_MEMBER(corpus.noise_stddev));
    f["corpus.speaker_stddev"] = RealField("corpus.speaker_stddev", MDD_MEMBER(corpus.speaker_stddev));
    f["corpus.lexicon_size"] = IntField("corpus.lexicon_size", MDD_MEMBER(corpus.lexicon_size));
    f["corpus.min_words"] = IntField("corpus.min_words", MDD_MEMBER(corpus.min_words));
    f["corpus.max_words"] = IntField("corpus.max_words", MDD_MEMBER(corpus.max_words));

    f["am.hidden"] = IntField("am.hidden", MDD_MEMBER(am.hidden));
    f["am.epochs"] = IntField("am.epochs", MDD_MEMBER(am.epochs));
    f["am.batch_size"] = IntField("am.batch_size", MDD_MEMBER(am.batch_size));
    f["am.lr"] = RealField("am.lr", MDD_MEMBER(am.learning_rate));

    f["cbow.window"] = IntField("cbow.window", MDD_MEMBER(cbow.window));
    f["cbow.dim"] = IntField("cbow.dim", MDD_MEMBER(cbow.dim));
    f["cbow.epochs"] = IntField("cbow.epochs", MDD_MEMBER(cbow.epochs));
    f["cbow.lr"] = RealField("cbow.lr", MDD_MEMBER(cbow.learning_rate));
    f["beta"] = RealField("beta", MDD_MEMBER(beta));

    f["model.encoder_hidden"] = IntField("model.encoder_hidden", MDD_MEMBER(model.encoder_hidden));
    f["model.decoder_hidden"] = IntField("model.decoder_hidden", MDD_MEMBER(model.decoder_hidden));
    f["model.attention_dim"] = IntField("model.attention_dim", MDD_MEMBER(model.attention_dim));
    f["model.embedding_dim"] = IntField("model.embedding_dim", MDD_MEMBER(model.embedding_dim));
    f["model.downsample"] = IntField("model.downsample", MDD_MEMBER(model.downsample));
    f["lambda_train"] = RealField("lambda_train", MDD_MEMBER(model.lambda_train));
    f["lambda_decode"] = RealField("lambda_decode", MDD_MEMBER(model.lambda_decode));
    f["alpha"] = RealField("alpha", MDD_MEMBER(model.alpha));
    f["beam"] = IntField("beam", MDD_MEMBER(model.beam));

    f["train.max_epochs"] = IntField("train.max_epochs", MDD_MEMBER(train.max_epochs));
    f["train.patience"] = IntField("train.patience", MDD_MEMBER(train.patience));
    f["train.batch_size"] = IntField("train.batch_size", MDD_MEMBER(train.batch_size));
    f["train.lr"] = RealField("train.lr", MDD_MEMBER(train.adam.learning_rate));
    f["train.clip_norm"] = RealField("train.clip_norm", MDD_MEMBER(train.adam.clip_norm));
    f["train.lr_decay"] = RealField("train.lr_decay", MDD_MEMBER(train.lr_decay));
    f["train.decay_after"] = IntField("train.decay_after", MDD_MEMBER(train.decay_after));
    f["specaug.freq_masks"] = IntField("specaug.freq_masks", MDD_MEMBER(train.spec_policy.n_freq_masks));
    f["specaug.max_freq_width"] = IntField("specaug.max_freq_width", MDD_MEMBER(train.spec_policy.max_freq_width));
    f["specaug.time_masks"] = IntField("specaug.time_masks", MDD_MEMBER(train.spec_policy.n_time_masks));
    f["specaug.max_time_width"] = IntField("specaug.max_time_width", MDD_MEMBER(train.spec_policy.max_time_width));
    return f;
  }();
  return fields;
}

#undef MDD_MEMBER

// Keys that do not enter the config hash: per-condition flags and paths.
const std::vector<std::string>& UnhashedKeys() {
  static const std::vector<std::string> keys = {"input_aug", "label_aug", "spec_augment", "work_dir",
                                                "corpus_dir"};
  return keys;
}

}  // namespace

std::string ExperimentConfig::CorpusDir() const {
  return corpus_dir.empty() ? work_dir + "/corpus" : corpus_dir;
}

void ExperimentConfig::Validate() const {
  if (work_dir.empty()) throw ConfigError("work_dir must not be empty");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0,1]");
  if (corpus.counts.train < 1 || corpus.counts.dev < 1 || corpus.counts.test < 1) {
    throw ConfigError("every split needs at least one utterance");
  }
  if (model.feature_dim != corpus.feature_dim || am.feature_dim != corpus.feature_dim) {
    throw ConfigError("feature dimensions of corpus, acoustic model and recognizer disagree");
  }
  corpus.error_model.Validate();
  model.Validate();
  train.Validate();
}

ExperimentConfig DefaultExperimentConfig() {
  ExperimentConfig c;
  c.corpus = DefaultCorpusConfig(BuildInventory());
  return c;
}

void ApplySetting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto& fields = Fields();
  auto it = fields.find(key);
  if (it == fields.end()) throw ConfigError("unknown config key: " + key);
  it->second.set(config, value);
  // Feature width is one setting shared by every stage.
  if (key == "corpus.feature_dim") {
    config.model.feature_dim = config.corpus.feature_dim;
    config.am.feature_dim = config.corpus.feature_dim;
  }
}

void ApplyConfigText(ExperimentConfig& config, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      ApplySetting(config, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  ExperimentConfig c = DefaultExperimentConfig();
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const IoError&) {
    throw ConfigError("cannot read config file: " + path);
  }
  ApplyConfigText(c, text);
  return c;
}

void ApplyOverride(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be key=value: " + assignment);
  const std::string key = Trim(assignment.substr(0, eq));
  const std::string value = Trim(assignment.substr(eq + 1));
  ApplySetting(config, key, value);
  config.overrides.emplace_back(key, value);
}

std::string CanonicalConfigText(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, field] : Fields()) {
    bool skip = false;
    for (const auto& k : UnhashedKeys()) skip |= k == key;
    if (skip) continue;
    out += key + "=" + field.get(config) + "\n";
  }
  return out;
}

std::string ConfigHash(const ExperimentConfig& config) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(Fnv1a64(CanonicalConfigText(config))));
  return buf;
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const auto& [key, field] : Fields()) keys.push_back(key);
  return keys;
}

}  // namespace mdd
