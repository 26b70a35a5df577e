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

#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdd/errors.h"
#include "mdd/experiment/config.h"
#include "mdd/experiment/pipeline.h"
#include "mdd/mdeval/report.h"
#include "mdd/version.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> work_dir;
  std::optional<std::string> corpus_dir;
  std::optional<std::string> seed;
  std::optional<std::string> lambda_train;
  std::optional<std::string> lambda_decode;
  std::optional<std::string> alpha;
  std::optional<std::string> beta;
  bool input_aug = false;
  bool label_aug = false;
  bool spec_augment = false;
};

void AddCommon(CLI::App* cmd, CommonOptions& o, bool conditions) {
  cmd->add_option("-c,--config", o.config_path, "Experiment config file (key = value lines)");
  cmd->add_option("--set", o.sets, "Override a config key, key=value (repeatable)");
  cmd->add_option("--work-dir", o.work_dir, "Work directory for artifacts");
  cmd->add_option("--corpus-dir", o.corpus_dir, "Corpus directory (default <work-dir>/corpus)");
  cmd->add_option("--seed", o.seed, "Global seed");
  cmd->add_option("--lambda-train", o.lambda_train, "CTC weight in the training objective");
  cmd->add_option("--lambda-decode", o.lambda_decode, "CTC weight in hybrid rescoring");
  cmd->add_option("--alpha", o.alpha, "Label-smoothing penalty weight");
  cmd->add_option("--beta", o.beta, "CBOW/unigram interpolation weight");
  if (conditions) {
    cmd->add_flag("--input-aug", o.input_aug, "Concatenate posteriorgrams to the features");
    cmd->add_flag("--label-aug", o.label_aug, "Smooth labels with the CBOW-interpolated distribution");
    cmd->add_flag("--spec-augment", o.spec_augment, "Mask features during training");
  }
}

mdd::ExperimentConfig BuildConfig(const CommonOptions& o) {
  mdd::ExperimentConfig c =
      o.config_path.empty() ? mdd::DefaultExperimentConfig() : mdd::LoadExperimentConfig(o.config_path);
  auto apply = [&](const char* key, const std::optional<std::string>& v) {
    if (v) mdd::ApplyOverride(c, std::string(key) + "=" + *v);
  };
  apply("work_dir", o.work_dir);
  apply("corpus_dir", o.corpus_dir);
  apply("seed", o.seed);
  apply("lambda_train", o.lambda_train);
  apply("lambda_decode", o.lambda_decode);
  apply("alpha", o.alpha);
  apply("beta", o.beta);
  for (const auto& s : o.sets) mdd::ApplyOverride(c, s);
  // Condition flags select a grid cell; they are not provenance overrides.
  c.input_aug = c.input_aug || o.input_aug;
  c.label_aug = c.label_aug || o.label_aug;
  c.spec_augment = c.spec_augment || o.spec_augment;
  // Paths do not change results, so they stay out of the report header.
  std::erase_if(c.overrides, [](const auto& kv) { return kv.first == "work_dir" || kv.first == "corpus_dir"; });
  c.Validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mispronunciation detection and diagnosis experiments"};
  app.set_version_flag("--version", std::string("mdd ") + mdd::kVersion);
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    CommonOptions options;
  };
  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const std::string& name, const std::string& help, bool conditions) {
    auto cmd = std::make_unique<Command>();
    cmd->app = app.add_subcommand(name, help);
    AddCommon(cmd->app, cmd->options, conditions);
    commands.push_back(std::move(cmd));
    return commands.back().get();
  };

  Command* gen = add("gen-corpus", "Generate the synthetic L1/L2 corpus", false);
  Command* train_am = add("train-am", "Train the frame classifier used for posteriorgrams and GOP", false);
  Command* extract = add("extract-ppg", "Write a posteriorgram for every utterance", false);
  Command* cbow = add("train-cbow", "Train phone embeddings and write the label-augmentation distribution", false);
  Command* train_md = add("train-md", "Train the CTC-attention recognizer for one condition", true);
  std::string smoothing_path;
  train_md->app->add_option("--smoothing", smoothing_path, "Label-augmentation distribution file");
  Command* decode = add("decode", "Decode the test split with a trained recognizer", true);
  Command* gop = add("score-gop", "Calibrate and apply the GOP baseline", false);
  Command* evaluate = add("evaluate", "Score one system against the human annotation", true);
  bool evaluate_gop = false;
  evaluate->app->add_flag("--gop", evaluate_gop, "Evaluate the GOP baseline instead of a recognizer");
  Command* report = add("report", "Assemble evaluated systems into the results grid", false);
  Command* matrix = add("run-matrix", "Run every stage for all eight conditions and GOP", false);
  Command* show = add("show-config", "Print the resolved configuration and its hash", true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }

  try {
    for (const auto& cmd : commands) {
      if (!cmd->app->parsed()) continue;
      const mdd::ExperimentConfig config = BuildConfig(cmd->options);
      std::string summary;
      if (cmd.get() == gen) {
        summary = mdd::StageGenCorpus(config);
      } else if (cmd.get() == train_am) {
        summary = mdd::StageTrainAm(config);
      } else if (cmd.get() == extract) {
        summary = mdd::StageExtractPpg(config);
      } else if (cmd.get() == cbow) {
        summary = mdd::StageTrainCbow(config);
      } else if (cmd.get() == train_md) {
        summary = mdd::StageTrainMd(config, smoothing_path);
      } else if (cmd.get() == decode) {
        summary = mdd::StageDecode(config);
      } else if (cmd.get() == gop) {
        summary = mdd::StageScoreGop(config);
      } else if (cmd.get() == evaluate) {
        summary = mdd::StageEvaluate(config, evaluate_gop ? mdd::kGopName : mdd::ConditionOf(config).Name());
      } else if (cmd.get() == report) {
        std::cout << mdd::RenderText(mdd::StageReport(config));
        summary = "report -> " + mdd::WorkLayout(config).report_tsv;
      } else if (cmd.get() == matrix) {
        std::cout << mdd::RenderText(mdd::RunExperimentMatrix(config));
        summary = "run-matrix -> " + mdd::WorkLayout(config).report_tsv;
      } else if (cmd.get() == show) {
        std::cout << mdd::CanonicalConfigText(config);
        summary = "config_hash " + mdd::ConfigHash(config);
      }
      std::cout << summary << std::endl;
    }
  } catch (const mdd::ConfigError& e) {
    std::cerr << "mdd: configuration error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const mdd::Error& e) {
    std::cerr << "mdd: error: " << e.what() << std::endl;
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "mdd: error: " << e.what() << std::endl;
    return kExitRuntime;
  }
  return kExitOk;
}
