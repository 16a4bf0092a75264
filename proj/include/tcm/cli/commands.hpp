// include/tcm/cli/commands.hpp

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

// Bodies of the tcmdet subcommands. Each takes a resolved RunConfig, writes
// its outputs plus resolved_config.json, returns a JSON summary and prints a
// human summary to `log`.

#pragma once

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tcm/cli/run_config.hpp"
#include "tcm/data/corpus_dir.hpp"
#include "tcm/metrics/evaluate.hpp"
#include "tcm/train/trainer.hpp"

namespace tcm {

namespace fs = std::filesystem;

inline constexpr char kResolvedConfigFile[] = "resolved_config.json";
inline constexpr char kTrainLogFile[] = "train_log.jsonl";
inline constexpr char kFinalCheckpoint[] = "final.tcmc";

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline std::string epoch_checkpoint_name(std::uint32_t epoch) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "epoch_%03u.tcmc", epoch);
  return buf;
}

inline void write_resolved_config(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  io::write_text_atomic(out_dir / kResolvedConfigFile, to_json(cfg).dump(2) + "\n");
}

/// The corpus spec stored in <data_dir>/manifest.json.
inline CorpusSpec corpus_spec_of(const fs::path& data_dir) {
  const Json manifest = read_json_file(data_dir / kManifestFile);
  if (!manifest.contains("spec")) {
    throw FormatError("manifest in '" + data_dir.string() + "' has no 'spec'");
  }
  CorpusSpec s;
  read_json(manifest.at("spec"), s, "manifest.spec");
  return s;
}

inline void require_feature_dim(const RunConfig& cfg, const ModelConfig& model,
                                const fs::path& data_dir) {
  const CorpusSpec s = corpus_spec_of(data_dir);
  if (s.feature_dim != model.feature_dim) {
    throw ConsistencyError("model.F=" + std::to_string(model.feature_dim) +
                           " but the corpus in '" + data_dir.string() + "' has F=" +
                           std::to_string(s.feature_dim));
  }
  (void)cfg;
}

// ---- gen-data ---------------------------------------------------------------

inline Json cmd_gen_data(const RunConfig& cfg, const fs::path& out_dir, bool force,
                         std::ostream& log) {
  if (fs::exists(out_dir) && !fs::is_empty(out_dir)) {
    if (!force) {
      throw IoError("output directory '" + out_dir.string() +
                    "' is not empty; pass --force to overwrite");
    }
    fs::remove_all(out_dir);
  }
  const Corpus corpus = generate_corpus(cfg.corpus);
  write_corpus(corpus, cfg.corpus, out_dir);
  write_resolved_config(cfg, out_dir);
  const std::uint64_t hash = corpus_fingerprint(out_dir);
  log << "gen-data: " << corpus.train.size() << " train / " << corpus.dev.size()
      << " dev / " << corpus.eval.size() << " eval utterances in " << out_dir.string()
      << " (hash " << hex64(hash) << ")\n";
  return Json{{"out", out_dir.string()},
              {"train", corpus.train.size()},
              {"dev", corpus.dev.size()},
              {"eval", corpus.eval.size()},
              {"corpus_hash", hex64(hash)}};
}

// ---- train ------------------------------------------------------------------

inline Json epoch_log_line(const EpochRecord& r) {
  return Json{{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_loss", r.val_loss}};
}

/// Trains on <data>/train, validates on <data>/dev, and writes
/// epoch_NNN.tcmc per epoch, final.tcmc (top-k average) and a JSON-lines log.
inline TrainResult train_run(const RunConfig& cfg, const ModelConfig& model,
                             const Corpus& corpus, const fs::path& out_dir,
                             std::ostream& log) {
  fs::create_directories(out_dir);
  RunConfig echo_cfg = cfg;
  echo_cfg.model = model;
  const Json echo = to_json(echo_cfg);
  std::ofstream jsonl(out_dir / kTrainLogFile, std::ios::trunc);
  if (!jsonl) throw IoError("cannot write '" + (out_dir / kTrainLogFile).string() + "'");
  TrainCallbacks cb;
  cb.on_epoch = [&](const EpochRecord& r, const Checkpoint& c) {
    save_checkpoint(c, out_dir / epoch_checkpoint_name(r.epoch));
    jsonl << epoch_log_line(r).dump() << "\n" << std::flush;
    log << "  epoch " << r.epoch << "  train " << std::fixed << std::setprecision(4)
        << r.train_loss << "  val " << r.val_loss << std::defaultfloat << "\n";
  };
  TrainResult result = train_model(model, corpus.train, corpus.dev, cfg.train, echo, cb);
  save_checkpoint(result.averaged, out_dir / kFinalCheckpoint);
  jsonl << Json{{"final", kFinalCheckpoint},
                {"epochs", result.history.size()},
                {"early_stopped", result.early_stopped},
                {"val_loss", result.averaged.val_loss}}
               .dump()
        << "\n";
  return result;
}

inline Json cmd_train(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir,
                      std::ostream& log) {
  require_feature_dim(cfg, cfg.model, data_dir);
  const Corpus corpus{load_split(data_dir / "train"), load_split(data_dir / "dev"), {}};
  write_resolved_config(cfg, out_dir);
  log << "train: " << corpus.train.size() << " train / " << corpus.dev.size()
      << " dev utterances, " << param_count(cfg.model).total << " parameters\n";
  const TrainResult r = train_run(cfg, cfg.model, corpus, out_dir, log);
  log << "train: " << r.history.size() << " epochs" << (r.early_stopped ? " (early stop)" : "")
      << ", averaged val loss " << r.averaged.val_loss << " -> "
      << (out_dir / kFinalCheckpoint).string() << "\n";
  return Json{{"epochs", r.history.size()},
              {"early_stopped", r.early_stopped},
              {"final_val_loss", r.averaged.val_loss},
              {"checkpoint", (out_dir / kFinalCheckpoint).string()}};
}

// ---- eval -------------------------------------------------------------------

/// Weights used for loss reporting: configured, else inverse frequency of
/// the training protocol.
inline ClassWeights report_class_weights(const TrainConfig& t, const fs::path& data_dir) {
  if (t.class_weights) return *t.class_weights;
  std::vector<Label> labels;
  for (const auto& e : read_protocol(data_dir / "train" / kProtocolFile)) labels.push_back(e.label);
  return inverse_frequency_weights(std::span<const Label>(labels));
}

inline Json cmd_eval(const RunConfig& cfg, const fs::path& checkpoint_path,
                     const fs::path& data_dir, const fs::path& out_dir, std::ostream& log) {
  const TdcfCosts& costs = cfg.require_costs();
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const ModelConfig stored = checkpoint_model_config(ckpt);
  if (to_json(stored) != to_json(cfg.model)) {
    throw ConsistencyError("model section of the config does not match checkpoint '" +
                           checkpoint_path.string() + "': config " +
                           to_json(cfg.model).dump() + " vs checkpoint " +
                           to_json(stored).dump());
  }
  const Model model = model_from_checkpoint(ckpt, cfg.model);
  require_feature_dim(cfg, cfg.model, data_dir);
  const std::vector<Utterance> split = load_split(data_dir / cfg.eval.split);
  const Evaluation ev =
      evaluate(model, split, cfg.eval.mode, cfg.train.target_t, costs, cfg.eval.jobs);
  const double loss =
      mean_weighted_loss(ev.logits, split, report_class_weights(cfg.train, data_dir));

  write_resolved_config(cfg, out_dir);
  write_scores(ev.scores, out_dir / "scores.txt");
  Json report = to_json(ev.report);
  report["loss"] = loss;
  report["split"] = cfg.eval.split;
  report["mode"] = to_string(cfg.eval.mode);
  io::write_text_atomic(out_dir / "report.json", report.dump(2) + "\n");
  log << "eval: " << cfg.eval.split << " (" << to_string(cfg.eval.mode) << ") " << split.size()
      << " utterances  EER " << std::fixed << std::setprecision(2) << 100.0 * ev.report.eer
      << "%  min t-DCF " << std::setprecision(4) << ev.report.min_tdcf << "  loss " << loss
      << std::defaultfloat << "\n";
  return report;
}

// ---- ablate -----------------------------------------------------------------

struct AblationVariant {
  std::string key;
  std::string label;
  TcmToggles toggles;
};

/// The seven rows of the component ablation, in table order.
inline std::vector<AblationVariant> ablation_variants() {
  std::vector<AblationVariant> v;
  v.push_back({"baseline", "w/o TCM (baseline)", TcmToggles::plain()});
  v.push_back({"tcm", "+ TCM", TcmToggles::full()});
  TcmToggles t = TcmToggles::full();
  t.ht_embedding = false;
  v.push_back({"no_ht_embedding", "w/o HT embedding", t});
  t = TcmToggles::full();
  t.ht_in_mhsa = false;
  v.push_back({"no_ht_in_mhsa", "w/o HT in MHSA", t});
  t = TcmToggles::full();
  t.add_mean_ht_to_cls = false;
  v.push_back({"no_mean_ht", "w/o adding mean HT to CLS", t});
  t = TcmToggles::full();
  t.add_mean_tt_to_cls = false;
  v.push_back({"no_mean_tt", "w/o adding mean TT to CLS", t});
  t = TcmToggles::full();
  t.add_mean_ht_to_cls = false;
  t.add_mean_tt_to_cls = false;
  v.push_back({"no_mean_ht_tt", "w/o adding mean HT & mean TT to CLS", t});
  return v;
}

/// Trains one model config on the corpus and evaluates it on the configured
/// split; training artefacts go to out_dir.
inline Json train_and_score(const RunConfig& cfg, const ModelConfig& model, const Corpus& corpus,
                            const fs::path& out_dir, std::ostream& log) {
  const TrainResult r = train_run(cfg, model, corpus, out_dir, log);
  const Model averaged = model_from_checkpoint(r.averaged, model);
  const std::vector<Utterance>& split = cfg.eval.split == "train" ? corpus.train
                                        : cfg.eval.split == "dev" ? corpus.dev
                                                                  : corpus.eval;
  std::vector<UtteranceLogits> logits =
      score_utterances(averaged, split, cfg.eval.mode, cfg.train.target_t, cfg.eval.jobs);
  std::vector<double> bona, spoof;
  for (std::size_t i = 0; i < split.size(); ++i) {
    (split[i].label == Label::kBonafide ? bona : spoof).push_back(logits[i].score());
  }
  Json row{{"eer", compute_eer(bona, spoof).eer},
           {"epochs", r.history.size()},
           {"val_loss", r.averaged.val_loss},
           {"params", param_count(model).total}};
  row["min_tdcf"] = cfg.costs ? Json(compute_min_tdcf(bona, spoof, *cfg.costs)) : Json(nullptr);
  return row;
}

inline Json cmd_ablate(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir,
                       std::ostream& log) {
  require_feature_dim(cfg, cfg.model, data_dir);
  const std::string hash = hex64(corpus_fingerprint(data_dir));
  const Corpus corpus = load_corpus(data_dir);
  write_resolved_config(cfg, out_dir);
  Json rows = Json::array();
  for (const auto& v : ablation_variants()) {
    ModelConfig m = cfg.model;
    m.toggles = v.toggles;
    log << "ablate: " << v.label << "\n";
    Json row = train_and_score(cfg, m, corpus, out_dir / v.key, log);
    row["variant"] = v.key;
    row["label"] = v.label;
    row["toggles"] = to_json(v.toggles);
    row["corpus_hash"] = hash;
    rows.push_back(row);
  }
  const Json table{{"corpus_hash", hash},
                   {"split", cfg.eval.split},
                   {"mode", to_string(cfg.eval.mode)},
                   {"rows", rows}};
  io::write_text_atomic(out_dir / "ablation.json", table.dump(2) + "\n");
  log << "ablate: corpus " << hash << "\n";
  for (const auto& r : rows) {
    log << "  " << std::left << std::setw(40) << r["label"].get<std::string>() << std::right
        << std::fixed << std::setprecision(2) << 100.0 * r["eer"].get<double>() << "% EER"
        << std::defaultfloat << "\n";
  }
  return table;
}

// ---- sweep-heads ------------------------------------------------------------

inline Json cmd_sweep_heads(const RunConfig& cfg, const fs::path& data_dir,
                            const fs::path& out_dir, std::ostream& log) {
  require_feature_dim(cfg, cfg.model, data_dir);
  const std::string hash = hex64(corpus_fingerprint(data_dir));
  const Corpus corpus = load_corpus(data_dir);
  write_resolved_config(cfg, out_dir);
  Json rows = Json::array();
  for (std::size_t h : cfg.sweep.heads) {
    for (bool tcm_on : {false, true}) {
      ModelConfig m = cfg.model;
      m.heads = h;
      m.toggles = tcm_on ? TcmToggles::full() : TcmToggles::plain();
      const std::string key = "H" + std::to_string(h) + (tcm_on ? "_tcm" : "_baseline");
      Json row;
      try {
        m.validate();
        log << "sweep-heads: H=" << h << (tcm_on ? " with TCM" : " baseline") << "\n";
        row = train_and_score(cfg, m, corpus, out_dir / key, log);
      } catch (const ConfigError& e) {
        log << "sweep-heads: H=" << h << " skipped: " << e.what() << "\n";
        row = Json{{"error", e.what()}};
      }
      row["H"] = h;
      row["tcm"] = tcm_on;
      rows.push_back(row);
    }
  }
  const Json table{{"corpus_hash", hash}, {"rows", rows}};
  io::write_text_atomic(out_dir / "sweep_heads.json", table.dump(2) + "\n");
  return table;
}

// ---- params -----------------------------------------------------------------

inline Json cmd_params(const RunConfig& cfg, std::ostream& out) {
  const ModelConfig& m = cfg.model;
  const ParamCount pc = param_count(m);
  const std::size_t d = m.head_dim();
  std::ostringstream formula;
  formula << "L*(d*D + D" << (m.toggles.ht_embedding ? " + H*D" : "") << ") = " << m.blocks
          << "*(" << d << "*" << m.model_dim << " + " << m.model_dim;
  if (m.toggles.ht_embedding) formula << " + " << m.heads << "*" << m.model_dim;
  formula << ") = " << analytic_tcm_delta(m);
  out << "total parameters: " << pc.total << " (" << std::fixed << std::setprecision(3)
      << static_cast<double>(pc.total) / 1e6 << "M)\n"
      << "tcm_delta:        " << pc.tcm_delta << " (" << static_cast<double>(pc.tcm_delta) / 1e6
      << "M)" << std::defaultfloat << "\n"
      << "  " << formula.str() << "\n"
      << "  projection d->D: " << d * m.model_dim + m.model_dim << " per block"
      << ", head-token embedding H*D: " << (m.toggles.ht_embedding ? m.heads * m.model_dim : 0)
      << " per block\n";
  return Json{{"total", pc.total},
              {"tcm_delta", pc.tcm_delta},
              {"analytic_tcm_delta", analytic_tcm_delta(m)},
              {"formula", formula.str()}};
}

}  // namespace tcm
