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

#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "mdd/binio.h"
#include "mdd/corpus/corpus.h"
#include "mdd/corpus/inventory.h"
#include "mdd/corpus/matrix_file.h"
#include "mdd/corpus/spec_augment.h"
#include "mdd/errors.h"
#include "test_util.h"

namespace mdd {
namespace {

CorpusConfig SmallConfig(std::uint64_t seed = 3) {
  CorpusConfig c = DefaultCorpusConfig(BuildInventory());
  c.counts = {40, 8, 12};
  c.seed = seed;
  return c;
}

TEST_CASE("inventory has 48 phones, 48 anti-phones and a 39-phone image") {
  const PhoneInventory& inv = BuildInventory();
  CHECK(inv.base_phones().size() == 48);
  CHECK(inv.anti_phones().size() == 48);
  CHECK(inv.ScoringSet().size() == 39);
  std::set<std::string> all(inv.base_phones().begin(), inv.base_phones().end());
  all.insert(inv.anti_phones().begin(), inv.anti_phones().end());
  all.insert({inv.blank(), inv.sos(), inv.eos()});
  CHECK(all.size() == 99);
}

TEST_CASE("collapse is idempotent and keeps anti-phones on the anti side") {
  const PhoneInventory& inv = BuildInventory();
  for (int id = 0; id < kNumPhoneSymbols; ++id) {
    CHECK(inv.Collapse(inv.Collapse(id)) == inv.Collapse(id));
    CHECK(PhoneInventory::IsAnti(inv.Collapse(id)) == PhoneInventory::IsAnti(id));
  }
  CHECK(inv.Symbol(inv.Collapse(inv.Index("ao"))) == "aa");
  CHECK(inv.Symbol(inv.Collapse(inv.Index("zh"))) == "sh");
  CHECK(inv.Symbol(inv.Collapse(inv.Index("*ix"))) == "*ih");
}

TEST_CASE("unknown symbols and broken tables are rejected") {
  const PhoneInventory& inv = BuildInventory();
  CHECK_THROWS_AS(inv.Index("qq"), SchemaError);
  CHECK_THROWS_AS(PhoneInventory::FromTable("aa aa\n"), ConfigError);
  CHECK_THROWS_AS(BuildInventory("/nonexistent/table.map"), ConfigError);
}

TEST_CASE("generation is a pure function of config and seed") {
  const PhoneInventory& inv = BuildInventory();
  const Corpus a = GenerateCorpus(inv, SmallConfig());
  const Corpus b = GenerateCorpus(inv, SmallConfig());
  CHECK(EncodeManifest(a, inv) == EncodeManifest(b, inv));
  for (std::size_t i = 0; i < a.utterances.size(); ++i) {
    CHECK(a.utterances[i].features == b.utterances[i].features);
  }
  const Corpus c = GenerateCorpus(inv, SmallConfig(4));
  CHECK(EncodeManifest(a, inv) != EncodeManifest(c, inv));
}

TEST_CASE("split sizes and speaker tags follow the config") {
  const Corpus c = GenerateCorpus(BuildInventory(), SmallConfig());
  CHECK(c.Select(Split::kTrain).size() == 40);
  CHECK(c.Select(Split::kDev).size() == 8);
  CHECK(c.Select(Split::kTest).size() == 12);
  std::set<std::string> test_tongues;
  for (const auto* u : c.Select(Split::kTest)) test_tongues.insert(u->mother_tongue);
  CHECK(test_tongues.size() == L2MotherTongues().size());
  for (const auto& u : c.utterances) {
    CHECK_NOTHROW(ValidateUtterance(u));
    if (u.mother_tongue == kNativeTongue) {
      CHECK(u.Pronounced() == u.canonical);
    }
  }
}

TEST_CASE("zero error probabilities give actual == canonical") {
  CorpusConfig cfg = SmallConfig();
  cfg.error_model.p_sub = cfg.error_model.p_del = cfg.error_model.p_ins = cfg.error_model.p_distort = 0.0;
  for (const auto& u : GenerateCorpus(BuildInventory(), cfg).utterances) {
    CHECK(u.Pronounced() == u.canonical);
    for (const auto& e : u.actual) CHECK(e.kind == ErrorKind::kCorrect);
  }
}

TEST_CASE("all error kinds occur and distortions carry anti-phones") {
  CorpusConfig cfg = SmallConfig();
  cfg.counts = {200, 10, 10};
  std::set<ErrorKind> kinds;
  for (const auto& u : GenerateCorpus(BuildInventory(), cfg).utterances) {
    for (const auto& e : u.actual) {
      kinds.insert(e.kind);
      CHECK(PhoneInventory::IsAnti(e.symbol) == (e.kind == ErrorKind::kDistortion));
    }
  }
  CHECK(kinds.size() == 5);
}

TEST_CASE("invalid error models are rejected") {
  ErrorModel em = DefaultErrorModel(BuildInventory());
  em.p_sub = 0.7;
  em.p_del = 0.4;
  CHECK_THROWS_AS(em.Validate(), ConfigError);
  em = DefaultErrorModel(BuildInventory());
  em.p_ins = -0.1;
  CHECK_THROWS_AS(em.Validate(), ConfigError);
}

TEST_CASE("utterance invariants are enforced") {
  Corpus c = GenerateCorpus(BuildInventory(), SmallConfig());
  Utterance u = c.utterances.front();
  Utterance bad = u;
  bad.frame_labels.pop_back();
  CHECK_THROWS_AS(ValidateUtterance(bad), SchemaError);
  bad = u;
  bad.actual.front().kind = ErrorKind::kDistortion;  // symbol is not an anti-phone
  CHECK_THROWS_AS(ValidateUtterance(bad), SchemaError);
  bad = u;
  bad.features = bad.features.topRows(1);
  bad.frame_labels.resize(1);
  CHECK_THROWS_AS(ValidateUtterance(bad), SchemaError);
}

TEST_CASE("corpus round-trips through disk") {
  test::TempDir dir;
  const PhoneInventory& inv = BuildInventory();
  const Corpus c = GenerateCorpus(inv, SmallConfig());
  const std::string manifest = WriteCorpus(c, inv, dir.path());
  const Corpus back = LoadCorpus(manifest, inv);
  REQUIRE(back.utterances.size() == c.utterances.size());
  CHECK(EncodeManifest(back, inv) == EncodeManifest(c, inv));
  for (std::size_t i = 0; i < c.utterances.size(); ++i) {
    CHECK(back.utterances[i].features == c.utterances[i].features);
    CHECK(back.utterances[i].actual == c.utterances[i].actual);
  }
}

TEST_CASE("loading reports missing files and malformed lines") {
  test::TempDir dir;
  const PhoneInventory& inv = BuildInventory();
  const Corpus c = GenerateCorpus(inv, SmallConfig());
  const std::string manifest = WriteCorpus(c, inv, dir.path());
  std::filesystem::remove(dir.path() + "/feats/" + c.utterances[3].id + ".mdft");
  try {
    LoadCorpus(manifest, inv);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(c.utterances[3].id) != std::string::npos);
  }
  WriteFileAtomic(dir.path() + "/bad.tsv", "# mdd-corpus-manifest v1\nonly\tthree\tfields\n");
  try {
    LoadCorpus(dir.path() + "/bad.tsv", inv);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("matrix files check magic and version") {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  std::string bytes = EncodeMatrixFile(m, kFeatureMagic);
  CHECK(DecodeMatrixFile(bytes, kFeatureMagic, "m") == m);
  CHECK_THROWS_AS(DecodeMatrixFile(bytes, kPosteriorgramMagic, "m"), ParseError);
  std::string bumped = bytes;
  bumped[4] = 2;
  CHECK_THROWS_AS(DecodeMatrixFile(bumped, kFeatureMagic, "m"), SchemaError);
  CHECK_THROWS_AS(DecodeMatrixFile(bytes.substr(0, bytes.size() - 4), kFeatureMagic, "m"), SchemaError);
}

TEST_CASE("identity SpecAugment policy returns the input") {
  Matrix x = Matrix::Random(20, 16);
  CHECK(SpecAugment(x, {0, 0, 0, 0}, 9) == x);
}

TEST_CASE("SpecAugment only zeroes whole bands and spans, deterministically") {
  Matrix x = Matrix::Constant(30, 16, 1.0);
  const SpecAugmentPolicy policy{2, 3, 2, 6};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix y = SpecAugment(x, policy, seed);
    CHECK(y == SpecAugment(x, policy, seed));
    int zero_cols = 0;
    for (int c = 0; c < 16; ++c) zero_cols += y.col(c).isZero() ? 1 : 0;
    int zero_rows = 0;
    for (int r = 0; r < 30; ++r) zero_rows += y.row(r).isZero() ? 1 : 0;
    CHECK(zero_cols <= 6);
    CHECK(zero_rows <= 12);
    for (int r = 0; r < 30; ++r) {
      for (int c = 0; c < 16; ++c) {
        const bool masked = y.col(c).isZero() || y.row(r).isZero();
        CHECK(y(r, c) == (masked ? 0.0 : 1.0));
      }
    }
  }
  CHECK_THROWS_AS(SpecAugment(x, {-1, 0, 0, 0}, 1), ConfigError);
}

}  // namespace
}  // namespace mdd
