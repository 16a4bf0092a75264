// tests/cli_test.cc

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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "tcm/cli/commands.hpp"
#include "temp_dir.hpp"

namespace tcm {
namespace {

using testing_util::TempDir;

// A corpus and model small enough to train in well under a second.
Json tiny_doc() {
  return Json{{"corpus",
               {{"n_train", 12},
                {"n_dev", 6},
                {"n_eval", 8},
                {"F", 6},
                {"T_range", {8, 12}},
                {"artifact", {{"band_width", 2}, {"seg_len", 3}, {"amplitude", 3.0}}}}},
              {"model", {{"F", 6}, {"D", 8}, {"H", 2}, {"L", 1}, {"conv_kernel", 3}, {"ffn_expansion", 2}}},
              {"train", {{"max_epochs", 2}, {"batch_size", 4}, {"target_T", 10}, {"seed", 3}}},
              {"costs", {{"C0", 0.0}, {"C1", 1.0}, {"C2", 1.0}}}};
}

RunConfig tiny(const std::vector<std::string>& overrides = {}) {
  return run_config_from_json(tiny_doc(), overrides);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<Json> jsonl(const fs::path& p) {
  std::vector<Json> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) out.push_back(Json::parse(line));
  return out;
}

// ---- run config -------------------------------------------------------------

TEST(RunConfig, DefaultsAndEcho) {
  const RunConfig c = run_config_from_json(Json::object());
  EXPECT_EQ(c.model.model_dim, 32u);
  EXPECT_EQ(c.sweep.heads, (std::vector<std::size_t>{4, 6, 8}));
  EXPECT_FALSE(c.costs.has_value());
  EXPECT_THROW(c.require_costs(), ConfigError);
  const RunConfig again = run_config_from_json(to_json(tiny()));
  EXPECT_EQ(to_json(again), to_json(tiny()));
}

TEST(RunConfig, UnknownKeysRejectedWithPath) {
  for (const char* bad : {"bogus=1", "model.bogus=1", "corpus.artifact.width=3", "costs.C3=1"}) {
    try {
      tiny({bad});
      FAIL() << bad;
    } catch (const ConfigError& e) {
      const std::string key = std::string(bad).substr(0, std::string(bad).find('='));
      EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
    }
  }
}

TEST(RunConfig, Overrides) {
  const RunConfig c = tiny({"train.lr=0.5", "model.toggles.use_tcm=false", "eval.mode=variable",
                            "sweep.heads=[2,3]", "corpus.T_range=[9,11]"});
  EXPECT_EQ(c.train.lr, 0.5);
  EXPECT_FALSE(c.model.toggles.use_tcm);
  EXPECT_EQ(c.eval.mode, LengthMode::kVariable);
  EXPECT_EQ(c.sweep.heads, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(c.corpus.t_min, 9u);
  EXPECT_THROW(tiny({"train.lr"}), ConfigError);
  EXPECT_THROW(tiny({"train..lr=1"}), ConfigError);
  EXPECT_THROW(tiny({"train.lr.x=1"}), ConfigError);
  EXPECT_THROW(tiny({"train.lr=fast"}), ConfigError);
  EXPECT_THROW(tiny({"corpus.n_train=0"}), ConfigError);
  EXPECT_THROW(tiny({"model.H=3"}), ConfigError);
}

TEST(RunConfig, FileErrors) {
  TempDir dir;
  EXPECT_THROW(load_run_config(dir / "missing.json"), IoError);
  io::write_text_atomic(dir / "bad.json", "{\"model\": ");
  EXPECT_THROW(load_run_config(dir / "bad.json"), ConfigError);
  io::write_text_atomic(dir / "ok.json", tiny_doc().dump());
  EXPECT_EQ(to_json(load_run_config(dir / "ok.json")), to_json(tiny()));
}

// ---- gen-data ---------------------------------------------------------------

TEST(GenData, ByteIdenticalAndForce) {
  TempDir dir;
  std::ostringstream log;
  const Json a = cmd_gen_data(tiny(), dir / "a", false, log);
  const Json b = cmd_gen_data(tiny(), dir / "b", false, log);
  EXPECT_EQ(a.at("corpus_hash"), b.at("corpus_hash"));
  EXPECT_EQ(slurp(dir / "a" / "train" / "train_000003.tcmf"),
            slurp(dir / "b" / "train" / "train_000003.tcmf"));
  EXPECT_TRUE(fs::exists(dir / "a" / kResolvedConfigFile));
  EXPECT_THROW(cmd_gen_data(tiny(), dir / "a", false, log), IoError);
  const Json c = cmd_gen_data(tiny({"corpus.seed=2"}), dir / "a", true, log);
  EXPECT_NE(c.at("corpus_hash"), a.at("corpus_hash"));
  EXPECT_EQ(load_split(dir / "a" / "eval").size(), 8u);
}

// ---- train / eval -----------------------------------------------------------

class TrainedRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir;
    std::ostringstream log;
    cmd_gen_data(tiny(), data(), false, log);
    summary_ = new Json(cmd_train(tiny(), data(), exp(), log));
  }
  static void TearDownTestSuite() {
    delete summary_;
    delete dir_;
  }
  static fs::path data() { return *dir_ / "data"; }
  static fs::path exp() { return *dir_ / "exp"; }

  static TempDir* dir_;
  static Json* summary_;
};

TempDir* TrainedRun::dir_ = nullptr;
Json* TrainedRun::summary_ = nullptr;

TEST_F(TrainedRun, WritesCheckpointsAndLog) {
  EXPECT_TRUE(fs::exists(exp() / "epoch_001.tcmc"));
  EXPECT_TRUE(fs::exists(exp() / "epoch_002.tcmc"));
  EXPECT_FALSE(fs::exists(exp() / "epoch_003.tcmc"));
  EXPECT_TRUE(fs::exists(exp() / kFinalCheckpoint));
  const auto lines = jsonl(exp() / kTrainLogFile);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].at("epoch"), 1);
  EXPECT_TRUE(lines[1].contains("train_loss"));
  EXPECT_EQ(lines[2].at("final"), kFinalCheckpoint);
  EXPECT_EQ(lines[2].at("val_loss"), summary_->at("final_val_loss"));
  const Checkpoint final_ckpt = load_checkpoint(exp() / kFinalCheckpoint);
  EXPECT_EQ(final_ckpt.config.at("model"), to_json(tiny().model));
}

TEST_F(TrainedRun, ReproducibleUnderSeed) {
  TempDir again;
  std::ostringstream log;
  cmd_train(tiny(), data(), again.path(), log);
  EXPECT_EQ(slurp(again / kFinalCheckpoint), slurp(exp() / kFinalCheckpoint));
  EXPECT_EQ(slurp(again / kTrainLogFile), slurp(exp() / kTrainLogFile));
}

TEST_F(TrainedRun, ReRunFromEchoReproduces) {
  TempDir again;
  std::ostringstream log;
  const RunConfig echo = load_run_config(exp() / kResolvedConfigFile);
  cmd_train(echo, data(), again.path(), log);
  EXPECT_EQ(slurp(again / kFinalCheckpoint), slurp(exp() / kFinalCheckpoint));
}

TEST_F(TrainedRun, DevEvalReproducesFinalValLoss) {
  TempDir out;
  std::ostringstream log;
  const Json report =
      cmd_eval(tiny({"eval.split=dev", "eval.mode=fixed"}), exp() / kFinalCheckpoint, data(),
               out.path(), log);
  EXPECT_NEAR(report.at("loss").get<double>(), summary_->at("final_val_loss").get<double>(),
              1e-12);
}

TEST_F(TrainedRun, BothModesCoverEveryEvalId) {
  for (const char* mode : {"fixed", "variable"}) {
    TempDir out;
    std::ostringstream log;
    const Json report = cmd_eval(tiny({std::string("eval.mode=") + mode, "eval.jobs=2"}),
                                 exp() / kFinalCheckpoint, data(), out.path(), log);
    const auto scores = read_scores(out / "scores.txt");
    const auto protocol = read_protocol(data() / "eval" / kProtocolFile);
    ASSERT_EQ(scores.size(), protocol.size());
    for (std::size_t i = 0; i < scores.size(); ++i) EXPECT_EQ(scores[i].id, protocol[i].id);
    const Json on_disk = Json::parse(slurp(out / "report.json"));
    EXPECT_EQ(on_disk.at("eer"), report.at("eer"));
    for (const char* k : {"eer", "min_tdcf", "n_bona", "n_spoof", "threshold"}) {
      EXPECT_TRUE(on_disk.contains(k)) << k;
    }
  }
}

TEST_F(TrainedRun, EvalErrors) {
  TempDir out;
  std::ostringstream log;
  RunConfig no_costs = tiny();
  no_costs.costs.reset();
  EXPECT_THROW(cmd_eval(no_costs, exp() / kFinalCheckpoint, data(), out.path(), log), ConfigError);
  EXPECT_THROW(cmd_eval(tiny({"model.toggles.use_tcm=false"}), exp() / kFinalCheckpoint, data(),
                        out.path(), log),
               ConsistencyError);
  EXPECT_THROW(cmd_eval(tiny(), exp() / "missing.tcmc", data(), out.path(), log), IoError);

  // A protocol that lacks a scored id.
  TempDir broken;
  fs::copy(data(), broken / "data", fs::copy_options::recursive);
  auto protocol = read_protocol(broken / "data" / "eval" / kProtocolFile);
  const std::string dropped = protocol.back().id;
  protocol.pop_back();
  write_protocol(protocol, broken / "data" / "eval" / kProtocolFile);
  const std::vector<Utterance> split = load_split(broken / "data" / "eval");
  const Model m = model_from_checkpoint(load_checkpoint(exp() / kFinalCheckpoint));
  Evaluation ev = evaluate(m, split, LengthMode::kFixed, 10, TdcfCosts{});
  ev.scores.push_back({dropped, 0.0});
  EXPECT_THROW(score_report(ev.scores, protocol, TdcfCosts{}), ConsistencyError);
}

TEST(Train, MissingDataIsIoError) {
  TempDir dir;
  std::ostringstream log;
  EXPECT_THROW(cmd_train(tiny(), dir / "nothing", dir / "out", log), IoError);
}

TEST(Train, PlateauStopsByPatiencePlusOne) {
  TempDir dir;
  std::ostringstream log;
  cmd_gen_data(tiny(), dir / "data", false, log);
  const Json s = cmd_train(tiny({"train.lr=0", "train.max_epochs=20", "train.patience=7"}),
                           dir / "data", dir / "exp", log);
  EXPECT_TRUE(s.at("early_stopped").get<bool>());
  EXPECT_EQ(s.at("epochs"), 8);
}

TEST(Train, FeatureDimMismatch) {
  TempDir dir;
  std::ostringstream log;
  cmd_gen_data(tiny(), dir / "data", false, log);
  EXPECT_THROW(cmd_train(tiny({"model.F=7"}), dir / "data", dir / "exp", log), ConsistencyError);
}

// ---- ablate / sweep / params ------------------------------------------------

TEST(Ablate, SevenRowsOnOneCorpus) {
  TempDir dir;
  std::ostringstream log;
  cmd_gen_data(tiny(), dir / "data", false, log);
  const Json t = cmd_ablate(tiny({"train.max_epochs=1"}), dir / "data", dir / "ab", log);
  const std::vector<std::string> want{"w/o TCM (baseline)",
                                      "+ TCM",
                                      "w/o HT embedding",
                                      "w/o HT in MHSA",
                                      "w/o adding mean HT to CLS",
                                      "w/o adding mean TT to CLS",
                                      "w/o adding mean HT & mean TT to CLS"};
  ASSERT_EQ(t.at("rows").size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    const Json& r = t.at("rows")[i];
    EXPECT_EQ(r.at("label"), want[i]);
    EXPECT_EQ(r.at("corpus_hash"), t.at("corpus_hash"));
    EXPECT_GE(r.at("eer").get<double>(), 0.0);
  }
  EXPECT_EQ(Json::parse(slurp(dir / "ab" / "ablation.json")), t);
  EXPECT_FALSE(t.at("rows")[0].at("toggles").at("use_tcm").get<bool>());
  EXPECT_FALSE(t.at("rows")[6].at("toggles").at("add_mean_tt_to_cls").get<bool>());
}

TEST(SweepHeads, InvalidHeadBecomesErrorRow) {
  TempDir dir;
  std::ostringstream log;
  cmd_gen_data(tiny(), dir / "data", false, log);
  const RunConfig c = tiny({"train.max_epochs=1", "sweep.heads=[2,3]"});
  const Json t = cmd_sweep_heads(c, dir / "data", dir / "sw", log);
  ASSERT_EQ(t.at("rows").size(), 4u);
  EXPECT_FALSE(t.at("rows")[0].contains("error"));
  EXPECT_EQ(t.at("rows")[1].at("tcm"), true);
  EXPECT_TRUE(t.at("rows")[2].contains("error"));
  EXPECT_EQ(t.at("rows")[3].at("H"), 3);
  const Json again = cmd_sweep_heads(c, dir / "data", dir / "sw2", log);
  EXPECT_EQ(again, t);
}

TEST(Params, DeskAndLargeConfigs) {
  std::ostringstream out;
  const Json desk = cmd_params(run_config_from_json(Json::object()), out);
  EXPECT_EQ(desk.at("tcm_delta"), 832);
  EXPECT_EQ(desk.at("formula"), "L*(d*D + D + H*D) = 2*(8*32 + 32 + 4*32) = 832");
  const Json large = cmd_params(
      run_config_from_json(Json::object(), {"model.F=1024", "model.D=144", "model.L=4"}), out);
  EXPECT_EQ(large.at("tcm_delta"), 23616);
  const Json no_emb =
      cmd_params(run_config_from_json(Json::object(), {"model.toggles.ht_embedding=false"}), out);
  EXPECT_EQ(no_emb.at("tcm_delta"), 832 - 2 * 4 * 32);
  EXPECT_EQ(no_emb.at("total").get<std::size_t>(), desk.at("total").get<std::size_t>() - 2 * 4 * 32);
}

}  // namespace
}  // namespace tcm
