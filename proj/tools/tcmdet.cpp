// tools/tcmdet.cpp

// Copyright 2026 The tcmdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// tcmdet: synthetic temporal-channel corpus, TCM training and evaluation.
//
//   tcmdet gen-data    --config run.json --out data/
//   tcmdet train       --config run.json --data data/ --out exp/
//   tcmdet eval        --config run.json --checkpoint exp/final.tcmc --data data/ --out eval/
//   tcmdet ablate      --config run.json --data data/ --out ablate/
//   tcmdet sweep-heads --config run.json --data data/ --out sweep/
//   tcmdet params      --config run.json
//
// Any config key can be overridden with --set section.key=value. Machine
// output goes to stdout as JSON, the human summary to stderr.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tcm/cli/commands.hpp"

namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration (JSON)")->required();
  cmd->add_option("--set", c.overrides, "override a config key, e.g. train.lr=1e-4");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-channel modeling for synthetic-speech detection"};
  app.require_subcommand(1);

  Common common;
  std::string data, out, checkpoint, mode, split;
  std::vector<std::size_t> heads;
  std::size_t jobs = 0;
  bool force = false;

  auto* gen = app.add_subcommand("gen-data", "generate the synthetic corpus");
  add_common(gen, common);
  gen->add_option("--out", out, "output directory")->required();
  gen->add_flag("--force", force, "overwrite a non-empty output directory");

  auto* train = app.add_subcommand("train", "train with early stopping and top-k averaging");
  add_common(train, common);
  train->add_option("--data", data, "corpus directory")->required();
  train->add_option("--out", out, "experiment directory")->required();

  auto* eval = app.add_subcommand("eval", "score a split and report EER / min t-DCF");
  add_common(eval, common);
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--data", data, "corpus directory")->required();
  eval->add_option("--out", out, "output directory")->required();
  eval->add_option("--mode", mode, "fixed | variable (overrides eval.mode)");
  eval->add_option("--split", split, "train | dev | eval (overrides eval.split)");
  eval->add_option("--jobs", jobs, "scoring threads (overrides eval.jobs)");

  auto* ablate = app.add_subcommand("ablate", "train and score the seven ablation variants");
  add_common(ablate, common);
  ablate->add_option("--data", data, "corpus directory")->required();
  ablate->add_option("--out", out, "output directory")->required();

  auto* sweep = app.add_subcommand("sweep-heads", "train and score per head count");
  add_common(sweep, common);
  sweep->add_option("--data", data, "corpus directory")->required();
  sweep->add_option("--out", out, "output directory")->required();
  sweep->add_option("--heads", heads, "head counts (overrides sweep.heads)")->delimiter(',');

  auto* params = app.add_subcommand("params", "parameter count and TCM delta");
  add_common(params, common);

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::string> overrides = common.overrides;
    if (!mode.empty()) overrides.push_back("eval.mode=" + mode);
    if (!split.empty()) overrides.push_back("eval.split=" + split);
    if (jobs > 0) overrides.push_back("eval.jobs=" + std::to_string(jobs));
    if (!heads.empty()) overrides.push_back("sweep.heads=" + tcm::Json(heads).dump());
    const tcm::RunConfig cfg = tcm::load_run_config(common.config, overrides);

    tcm::Json result;
    if (*gen) {
      result = tcm::cmd_gen_data(cfg, out, force, std::cerr);
    } else if (*train) {
      result = tcm::cmd_train(cfg, data, out, std::cerr);
    } else if (*eval) {
      result = tcm::cmd_eval(cfg, checkpoint, data, out, std::cerr);
    } else if (*ablate) {
      result = tcm::cmd_ablate(cfg, data, out, std::cerr);
    } else if (*sweep) {
      result = tcm::cmd_sweep_heads(cfg, data, out, std::cerr);
    } else if (*params) {
      result = tcm::cmd_params(cfg, std::cerr);
    }
    std::cout << result.dump(2) << "\n";
    return 0;
  } catch (const tcm::Error& e) {
    std::cerr << "tcmdet: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tcmdet: error: " << e.what() << "\n";
    return 1;
  }
}
