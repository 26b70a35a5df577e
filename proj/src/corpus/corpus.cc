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

#include "mdd/corpus/corpus.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "mdd/binio.h"
#include "mdd/corpus/matrix_file.h"
#include "mdd/errors.h"
#include "mdd/rng.h"

namespace mdd {
namespace {

constexpr std::string_view kManifestHeader = "# mdd-corpus-manifest v1";

std::vector<std::string> SplitOn(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> Words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

int SampleCumulative(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.Uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<int>(it - cumulative.begin());
}

// Zipf-like weights over a seeded permutation of n items.
std::vector<double> ZipfCumulative(int n, double offset, Rng& rng) {
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) rank[i] = i;
  rng.Shuffle(rank);
  std::vector<double> cum(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += 1.0 / (rank[i] + offset);
    cum[i] = acc;
  }
  return cum;
}

struct Speaker {
  std::string name;
  std::string mother_tongue;
};

struct SharedModel {
  Matrix prototypes;  // kNumBasePhones x F
  std::vector<std::vector<int>> lexicon;
  std::vector<double> word_cumulative;
};

SharedModel BuildSharedModel(const CorpusConfig& cfg) {
  SharedModel m;
  Rng proto_rng(DeriveSeed(cfg.seed, "prototypes"));
  m.prototypes.resize(kNumBasePhones, cfg.feature_dim);
  for (int p = 0; p < kNumBasePhones; ++p) {
    for (int f = 0; f < cfg.feature_dim; ++f) m.prototypes(p, f) = proto_rng.Normal();
  }

  Rng lex_rng(DeriveSeed(cfg.seed, "lexicon"));
  const std::vector<double> phone_cum = ZipfCumulative(kNumBasePhones, 6.0, lex_rng);
  m.lexicon.resize(cfg.lexicon_size);
  for (auto& word : m.lexicon) {
    const int len = lex_rng.UniformInt(2, 5);
    while (static_cast<int>(word.size()) < len) {
      const int p = SampleCumulative(lex_rng, phone_cum);
      if (!word.empty() && word.back() == p) continue;
      word.push_back(p);
    }
  }
  m.word_cumulative = ZipfCumulative(cfg.lexicon_size, 3.0, lex_rng);
  return m;
}

RowVector SpeakerOffset(const CorpusConfig& cfg, const std::string& speaker) {
  Rng rng(DeriveSeed(cfg.seed, "speaker:" + speaker));
  RowVector v(cfg.feature_dim);
  for (int f = 0; f < cfg.feature_dim; ++f) v(f) = rng.Normal(0.0, cfg.speaker_stddev);
  return v;
}

// Picks a confusable of `phone` that differs from both neighbors, or -1.
int PickConfusable(Rng& rng, const ErrorModel& em, int phone, int prev, int next) {
  std::vector<int> options;
  for (int c : em.confusions[phone]) {
    if (c != prev && c != next && c != phone) options.push_back(c);
  }
  if (options.empty()) return -1;
  return options[rng.UniformInt(0, static_cast<int>(options.size()) - 1)];
}

Utterance GenerateUtterance(const CorpusConfig& cfg, const SharedModel& shared,
                            const Speaker& spk, Split split, std::size_t index) {
  Rng rng(DeriveSeed(cfg.seed, static_cast<std::uint64_t>(index)));
  Utterance utt;
  char idbuf[32];
  std::snprintf(idbuf, sizeof(idbuf), "_%05zu", index);
  utt.id = spk.name + idbuf;
  utt.speaker = spk.name;
  utt.mother_tongue = spk.mother_tongue;
  utt.split = split;

  const int n_words = rng.UniformInt(cfg.min_words, cfg.max_words);
  for (int w = 0; w < n_words; ++w) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      const auto& word = shared.lexicon[SampleCumulative(rng, shared.word_cumulative)];
      if (!utt.canonical.empty() && utt.canonical.back() == word.front()) continue;
      utt.canonical.insert(utt.canonical.end(), word.begin(), word.end());
      break;
    }
  }

  ErrorModel em = cfg.error_model;
  if (spk.mother_tongue == kNativeTongue) {
    em.p_sub = em.p_del = em.p_ins = em.p_distort = 0.0;
  }

  // `last` is the base id of the most recent pronounced entry; consecutive
  // pronounced phones never share a base id.
  int last = -1;
  const int n = static_cast<int>(utt.canonical.size());
  for (int i = 0; i < n; ++i) {
    const int phone = utt.canonical[i];
    const int next = i + 1 < n ? utt.canonical[i + 1] : -1;
    const double r = rng.Uniform();
    double edge = em.p_sub;
    if (r < edge) {
      const int sub = PickConfusable(rng, em, phone, last, next);
      if (sub >= 0) {
        utt.actual.push_back({sub, ErrorKind::kSubstitution});
        last = sub;
        continue;
      }
    } else if (r < (edge += em.p_del)) {
      if (last != next || next < 0) {
        utt.actual.push_back({phone, ErrorKind::kDeletion});
        continue;
      }
    } else if (r < (edge += em.p_ins)) {
      const int ins = PickConfusable(rng, em, phone, phone, next);
      utt.actual.push_back({phone, ErrorKind::kCorrect});
      last = phone;
      if (ins >= 0) {
        utt.actual.push_back({ins, ErrorKind::kInsertion});
        last = ins;
      }
      continue;
    } else if (r < (edge += em.p_distort)) {
      utt.actual.push_back({PhoneInventory::AntiOf(phone), ErrorKind::kDistortion});
      last = phone;
      continue;
    }
    utt.actual.push_back({phone, ErrorKind::kCorrect});
    last = phone;
  }

  if (!utt.actual.empty() &&
      std::all_of(utt.actual.begin(), utt.actual.end(),
                  [](const PronouncedPhone& e) { return e.kind == ErrorKind::kDeletion; })) {
    utt.actual.front().kind = ErrorKind::kCorrect;
  }

  const RowVector offset = SpeakerOffset(cfg, spk.name);
  std::vector<RowVector> rows;
  for (const auto& entry : utt.actual) {
    if (entry.kind == ErrorKind::kDeletion) continue;
    const int base = PhoneInventory::BaseOf(entry.symbol);
    RowVector center = shared.prototypes.row(base);
    int toward = -1;
    if (entry.kind == ErrorKind::kDistortion) {
      const auto& nbrs = em.confusions[base];
      toward = nbrs[rng.UniformInt(0, static_cast<int>(nbrs.size()) - 1)];
      center += em.prototype_shift * (shared.prototypes.row(toward) - shared.prototypes.row(base));
    }
    const int frames = std::max(1, rng.UniformInt(cfg.frames_per_phone - 2, cfg.frames_per_phone + 2));
    for (int k = 0; k < frames; ++k) {
      RowVector frame = center + offset;
      for (int f = 0; f < cfg.feature_dim; ++f) frame(f) += rng.Normal(0.0, cfg.noise_stddev);
      rows.push_back(frame);
      utt.frame_labels.push_back(base);
    }
  }
  utt.features.resize(static_cast<Eigen::Index>(rows.size()), cfg.feature_dim);
  for (std::size_t t = 0; t < rows.size(); ++t) utt.features.row(t) = rows[t];
  utt.features = RoundToFloat(utt.features);
  return utt;
}

}  // namespace

std::string_view SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

Split ParseSplit(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "dev") return Split::kDev;
  if (s == "test") return Split::kTest;
  throw ParseError("unknown split: " + std::string(s));
}

std::string_view ErrorKindName(ErrorKind k) {
  switch (k) {
    case ErrorKind::kCorrect: return "correct";
    case ErrorKind::kSubstitution: return "substitution";
    case ErrorKind::kDeletion: return "deletion";
    case ErrorKind::kInsertion: return "insertion";
    case ErrorKind::kDistortion: return "distortion";
  }
  return "correct";
}

ErrorKind ParseErrorKind(std::string_view s) {
  if (s == "correct") return ErrorKind::kCorrect;
  if (s == "substitution") return ErrorKind::kSubstitution;
  if (s == "deletion") return ErrorKind::kDeletion;
  if (s == "insertion") return ErrorKind::kInsertion;
  if (s == "distortion") return ErrorKind::kDistortion;
  throw ParseError("unknown error kind: " + std::string(s));
}

std::vector<int> Utterance::Pronounced() const {
  std::vector<int> out;
  for (const auto& e : actual) {
    if (e.kind != ErrorKind::kDeletion) out.push_back(e.symbol);
  }
  return out;
}

void ValidateUtterance(const Utterance& utt) {
  auto fail = [&](const std::string& msg) {
    throw SchemaError("utterance " + utt.id + ": " + msg);
  };
  for (int c : utt.canonical) {
    if (c < 0 || c >= kNumBasePhones) fail("canonical entry is not a base phone");
  }
  std::size_t ci = 0;
  std::size_t pronounced = 0;
  for (const auto& e : utt.actual) {
    if (e.symbol < 0 || e.symbol >= kNumPhoneSymbols) fail("actual symbol out of range");
    const bool anti = PhoneInventory::IsAnti(e.symbol);
    if ((e.kind == ErrorKind::kDistortion) != anti) {
      fail("distortion entries must carry an anti-phone and only they may");
    }
    if (e.kind != ErrorKind::kDeletion) ++pronounced;
    if (e.kind == ErrorKind::kInsertion) continue;
    if (ci >= utt.canonical.size()) fail("actual has more aligned entries than canonical");
    const int canon = utt.canonical[ci++];
    const bool same_phone = PhoneInventory::BaseOf(e.symbol) == canon;
    if (e.kind == ErrorKind::kSubstitution ? same_phone : !same_phone) {
      fail("actual entry disagrees with canonical phone at position " + std::to_string(ci - 1));
    }
  }
  if (ci != utt.canonical.size()) fail("actual does not cover every canonical phone");
  const auto t = static_cast<std::size_t>(utt.features.rows());
  if (t < pronounced) fail("fewer frames than pronounced phones");
  if (utt.frame_labels.size() != t) fail("frame_labels length differs from frame count");
  for (int l : utt.frame_labels) {
    if (l < 0 || l >= kNumBasePhones) fail("frame label is not a base-phone index");
  }
  if (!utt.features.allFinite()) fail("non-finite feature value");
}

const std::vector<std::string>& L2MotherTongues() {
  static const std::vector<std::string> tongues = {
      "Arabic", "Hindi", "Korean", "Mandarin", "Spanish", "Vietnamese"};
  return tongues;
}

void ErrorModel::Validate() const {
  for (double p : {p_sub, p_del, p_ins, p_distort}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("error probability outside [0,1]");
  }
  if (p_sub + p_del + p_ins + p_distort > 1.0 + 1e-12) {
    throw ConfigError("error probabilities sum to more than 1");
  }
  if (confusions.size() != kNumBasePhones) {
    throw ConfigError("confusion graph must list all 48 phones");
  }
  for (std::size_t p = 0; p < confusions.size(); ++p) {
    if (confusions[p].empty()) throw ConfigError("phone without confusable neighbor");
    for (int c : confusions[p]) {
      if (c < 0 || c >= kNumBasePhones || c == static_cast<int>(p)) {
        throw ConfigError("invalid confusable neighbor");
      }
    }
  }
  if (!std::isfinite(prototype_shift)) throw ConfigError("prototype_shift must be finite");
}

std::vector<std::vector<int>> DefaultConfusions(const PhoneInventory& inventory) {
  static const std::vector<std::pair<const char*, std::vector<const char*>>> kPairs = {
      {"dh", {"d", "z", "th"}}, {"z", {"s"}},       {"ih", {"iy", "eh"}},
      {"iy", {"ih"}},           {"ow", {"aa", "ao"}}, {"er", {"ah", "r"}},
      {"d", {"t", "dh"}},       {"t", {"d", "dx"}},  {"s", {"z", "sh"}},
      {"th", {"t", "s", "f"}},  {"v", {"f", "b", "w"}}, {"w", {"v"}},
      {"l", {"r", "n"}},        {"r", {"l", "er"}},  {"ae", {"eh", "aa"}},
      {"eh", {"ae", "ih"}},     {"uh", {"uw"}},      {"uw", {"uh"}},
      {"n", {"ng", "m"}},       {"ng", {"n"}},       {"m", {"n"}},
      {"b", {"p"}},             {"p", {"b"}},        {"g", {"k"}},
      {"k", {"g"}},             {"sh", {"s", "ch"}}, {"ch", {"sh", "jh"}},
      {"jh", {"ch", "zh"}},     {"zh", {"sh", "jh"}}, {"f", {"th", "v"}},
  };
  std::vector<std::vector<int>> conf(kNumBasePhones);
  for (const auto& [from, tos] : kPairs) {
    auto& list = conf[inventory.Index(from)];
    for (const char* to : tos) list.push_back(inventory.Index(to));
  }
  for (int p = 0; p < kNumBasePhones; ++p) {
    const int ring = (p + 1) % kNumBasePhones;
    if (std::find(conf[p].begin(), conf[p].end(), ring) == conf[p].end()) {
      conf[p].push_back(ring);
    }
  }
  return conf;
}

ErrorModel DefaultErrorModel(const PhoneInventory& inventory) {
  ErrorModel em;
  em.confusions = DefaultConfusions(inventory);
  return em;
}

CorpusConfig DefaultCorpusConfig(const PhoneInventory& inventory) {
  CorpusConfig cfg;
  cfg.error_model = DefaultErrorModel(inventory);
  return cfg;
}

std::vector<const Utterance*> Corpus::Select(Split split) const {
  std::vector<const Utterance*> out;
  for (const auto& u : utterances) {
    if (u.split == split) out.push_back(&u);
  }
  return out;
}

Corpus GenerateCorpus(const PhoneInventory& inventory, const CorpusConfig& config) {
  (void)inventory;
  if (config.feature_dim < 2) throw ConfigError("feature_dim must be >= 2");
  if (config.counts.train <= 0 || config.counts.dev <= 0 || config.counts.test <= 0) {
    throw ConfigError("utterance counts per split must be positive");
  }
  if (config.frames_per_phone < 1) throw ConfigError("frames_per_phone must be >= 1");
  if (config.lexicon_size < 1 || config.min_words < 1 || config.max_words < config.min_words) {
    throw ConfigError("invalid lexicon or words-per-utterance settings");
  }
  if (!(config.l1_train_fraction >= 0.0 && config.l1_train_fraction <= 1.0)) {
    throw ConfigError("l1_train_fraction outside [0,1]");
  }
  config.error_model.Validate();

  const SharedModel shared = BuildSharedModel(config);
  const auto& tongues = L2MotherTongues();
  auto l2_speaker = [&](const char* prefix, int i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%s%02d", prefix, i);
    return Speaker{name, tongues[i % tongues.size()]};
  };
  constexpr int kL1Speakers = 10;
  constexpr int kTrainL2Speakers = 17;
  constexpr int kDevSpeakers = 1;
  const int test_speakers = static_cast<int>(tongues.size());

  struct Slot {
    Speaker speaker;
    Split split;
  };
  std::vector<Slot> slots;
  const int n_l1 = static_cast<int>(std::lround(config.counts.train * config.l1_train_fraction));
  for (int i = 0; i < config.counts.train; ++i) {
    if (i < n_l1) {
      char name[32];
      std::snprintf(name, sizeof(name), "L1S%02d", i % kL1Speakers);
      slots.push_back({Speaker{name, std::string(kNativeTongue)}, Split::kTrain});
    } else {
      slots.push_back({l2_speaker("L2TR", (i - n_l1) % kTrainL2Speakers), Split::kTrain});
    }
  }
  for (int i = 0; i < config.counts.dev; ++i) {
    slots.push_back({l2_speaker("L2DV", i % kDevSpeakers), Split::kDev});
  }
  for (int i = 0; i < config.counts.test; ++i) {
    slots.push_back({l2_speaker("L2TE", i % test_speakers), Split::kTest});
  }

  Corpus corpus;
  corpus.utterances.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    corpus.utterances.push_back(
        GenerateUtterance(config, shared, slots[i].speaker, slots[i].split, i));
  }
  return corpus;
}

std::string EncodeManifest(const Corpus& corpus, const PhoneInventory& inventory) {
  std::ostringstream out;
  out << kManifestHeader << "\n";
  for (const auto& u : corpus.utterances) {
    out << u.id << '\t' << u.speaker << '\t' << u.mother_tongue << '\t'
        << SplitName(u.split) << '\t';
    for (std::size_t i = 0; i < u.canonical.size(); ++i) {
      out << (i ? " " : "") << inventory.Symbol(u.canonical[i]);
    }
    out << '\t';
    for (std::size_t i = 0; i < u.actual.size(); ++i) {
      out << (i ? " " : "") << inventory.Symbol(u.actual[i].symbol) << ':'
          << ErrorKindName(u.actual[i].kind);
    }
    out << '\t' << "feats/" << u.id << ".mdft" << '\t' << u.num_frames() << '\t';
    for (std::size_t i = 0; i < u.frame_labels.size(); ++i) {
      out << (i ? " " : "") << u.frame_labels[i];
    }
    out << '\n';
  }
  return out.str();
}

std::string WriteCorpus(const Corpus& corpus, const PhoneInventory& inventory,
                        const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "feats", ec);
  if (ec) throw IoError("cannot create corpus directory " + dir + ": " + ec.message());
  for (const auto& u : corpus.utterances) {
    WriteMatrixFile((fs::path(dir) / "feats" / (u.id + ".mdft")).string(), u.features,
                    kFeatureMagic);
  }
  const std::string manifest = (fs::path(dir) / "manifest.tsv").string();
  WriteFileAtomic(manifest, EncodeManifest(corpus, inventory));
  return manifest;
}

Corpus LoadCorpus(const std::string& manifest_path, const PhoneInventory& inventory) {
  namespace fs = std::filesystem;
  const std::string text = ReadFile(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  Corpus corpus;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto where = [&](const std::string& msg) {
      return manifest_path + ":" + std::to_string(line_no) + ": " + msg;
    };
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 9) {
      throw ParseError(where("expected 9 tab-separated fields, got " +
                             std::to_string(fields.size())));
    }
    Utterance u;
    u.id = fields[0];
    u.speaker = fields[1];
    u.mother_tongue = fields[2];
    if (u.id.empty() || u.speaker.empty() || u.mother_tongue.empty()) {
      throw ParseError(where("empty id, speaker or mother_tongue"));
    }
    try {
      u.split = ParseSplit(fields[3]);
    } catch (const ParseError& e) {
      throw ParseError(where(e.what()));
    }
    for (const auto& sym : Words(fields[4])) u.canonical.push_back(inventory.Index(sym));
    for (const auto& tok : Words(fields[5])) {
      const auto colon = tok.rfind(':');
      if (colon == std::string::npos) throw ParseError(where("actual entry lacks ':kind': " + tok));
      ErrorKind kind;
      try {
        kind = ParseErrorKind(tok.substr(colon + 1));
      } catch (const ParseError& e) {
        throw ParseError(where(e.what()));
      }
      u.actual.push_back({inventory.Index(tok.substr(0, colon)), kind});
    }
    long n_frames = 0;
    try {
      std::size_t used = 0;
      n_frames = std::stol(fields[7], &used);
      if (used != fields[7].size() || n_frames < 0) throw std::invalid_argument("");
      for (const auto& l : Words(fields[8])) {
        std::size_t u2 = 0;
        const int v = std::stoi(l, &u2);
        if (u2 != l.size()) throw std::invalid_argument("");
        u.frame_labels.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw ParseError(where("malformed integer field"));
    }
    const std::string feat_path = (base / fields[6]).string();
    if (!fs::exists(feat_path)) throw IoError("missing feature file: " + feat_path);
    u.features = ReadMatrixFile(feat_path, kFeatureMagic);
    if (u.features.rows() != n_frames) {
      throw SchemaError(where("n_frames " + std::to_string(n_frames) +
                              " disagrees with feature file " + feat_path));
    }
    ValidateUtterance(u);
    corpus.utterances.push_back(std::move(u));
  }
  return corpus;
}

}  // namespace mdd
