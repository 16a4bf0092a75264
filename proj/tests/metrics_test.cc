// tests/metrics_test.cc

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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "model_fixtures.hpp"
#include "tcm/data/corpus.hpp"
#include "tcm/metrics/evaluate.hpp"
#include "temp_dir.hpp"

namespace tcm {
namespace {

using testing_util::TempDir;
using Scores = std::vector<double>;

// ---- brute-force oracle -----------------------------------------------------

// Thresholds at all 2N+1 positions of the pooled, sorted (not deduplicated)
// list: below everything, every adjacent midpoint, above everything. Error
// rates are recounted from scratch at each one.
struct Brute {
  std::vector<double> tau, p_miss, p_fa;

  Brute(const Scores& bona, const Scores& spoof) {
    Scores pooled(bona);
    pooled.insert(pooled.end(), spoof.begin(), spoof.end());
    std::sort(pooled.begin(), pooled.end());
    tau.push_back(pooled.front() - 1.0);
    for (std::size_t i = 0; i + 1 < pooled.size(); ++i) tau.push_back((pooled[i] + pooled[i + 1]) / 2);
    tau.push_back(pooled.back() + 1.0);
    for (double t : tau) {
      std::size_t miss = 0, fa = 0;
      for (double b : bona) miss += b < t;
      for (double s : spoof) fa += s >= t;
      p_miss.push_back(static_cast<double>(miss) / static_cast<double>(bona.size()));
      p_fa.push_back(static_cast<double>(fa) / static_cast<double>(spoof.size()));
    }
  }

  double eer() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < tau.size(); ++i) {
      if (std::abs(p_miss[i] - p_fa[i]) < std::abs(p_miss[best] - p_fa[best])) best = i;
    }
    return (p_miss[best] + p_fa[best]) / 2;
  }

  double min_tdcf(const TdcfCosts& c) const {
    double best = 1.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
      best = std::min(best, (c.c0 + c.c1 * p_miss[i] + c.c2 * p_fa[i]) /
                                std::min(c.c0 + c.c1, c.c0 + c.c2));
    }
    return best;
  }
};

// Scores on a coarse grid half of the time so that ties occur.
Scores random_scores(std::mt19937_64& rng, std::size_t n, double shift) {
  std::normal_distribution<double> normal(shift, 1.0);
  const bool coarse = rng() % 2 == 0;
  Scores s(n);
  for (double& x : s) x = coarse ? std::round(normal(rng) * 2.0) / 2.0 : normal(rng);
  return s;
}

// ---- EER --------------------------------------------------------------------

TEST(ComputeEer, HandExamples) {
  EXPECT_EQ(compute_eer(Scores{0.9, 0.8}, Scores{0.1, 0.2}).eer, 0.0);
  EXPECT_EQ(compute_eer(Scores{0.1, 0.2}, Scores{0.9, 0.8}).eer, 1.0);
  EXPECT_DOUBLE_EQ(compute_eer(Scores{0.8, 0.4, 0.6}, Scores{0.5, 0.2, 0.7}).eer, 1.0 / 3.0);
}

TEST(ComputeEer, ThresholdLiesInSeparatingGap) {
  const EerResult r = compute_eer(Scores{0.9, 0.8}, Scores{0.1, 0.2});
  EXPECT_GT(r.threshold, 0.2);
  EXPECT_LE(r.threshold, 0.8);
}

// Every threshold position is degenerate; the lowest one (Pmiss 0, Pfa 1)
// is chosen and reported as 0.5.
TEST(ComputeEer, ConstantScoresGiveHalf) {
  const EerResult r = compute_eer(Scores(5, 0.3), Scores(5, 0.3));
  EXPECT_EQ(r.eer, 0.5);
  EXPECT_LT(r.threshold, 0.3);
}

TEST(ComputeEer, EmptyOrNonFiniteRejected) {
  EXPECT_THROW(compute_eer(Scores{}, Scores{1.0}), InputError);
  EXPECT_THROW(compute_eer(Scores{1.0}, Scores{}), InputError);
  EXPECT_THROW(compute_eer(Scores{NAN}, Scores{1.0}), InputError);
  EXPECT_THROW(compute_eer(Scores{1.0}, Scores{INFINITY}), InputError);
}

TEST(ComputeEer, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Scores bona = random_scores(rng, 1 + rng() % 100, 1.0);
    const Scores spoof = random_scores(rng, 1 + rng() % 100, 0.0);
    EXPECT_EQ(compute_eer(bona, spoof).eer, Brute(bona, spoof).eer()) << trial;
  }
}

TEST(ComputeEer, InRangeAndInvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Scores bona = random_scores(rng, 1 + rng() % 60, 0.5);
    const Scores spoof = random_scores(rng, 1 + rng() % 60, 0.0);
    const double eer = compute_eer(bona, spoof).eer;
    EXPECT_GE(eer, 0.0);
    EXPECT_LE(eer, 1.0);
    auto f = [](Scores s) {
      for (double& x : s) x = std::exp(x / 2.0) * 3.0 - 1.0;
      return s;
    };
    EXPECT_EQ(compute_eer(f(bona), f(spoof)).eer, eer);
  }
}

// Swapping roles and negating maps (Pmiss, Pfa) to (Pfa, Pmiss) and reverses
// the sweep. When several positions share the smallest gap with different
// sums, the lowest-threshold tie rule picks from the other end, so the
// swapped value is only required to be one of the tied candidates.
TEST(ComputeEer, ClassSwapWithNegation) {
  std::mt19937_64 rng(13);
  int unique = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Scores bona = random_scores(rng, 1 + rng() % 60, 0.5);
    const Scores spoof = random_scores(rng, 1 + rng() % 60, 0.0);
    Scores nb(spoof), ns(bona);
    for (double& x : nb) x = -x;
    for (double& x : ns) x = -x;
    const Brute b(bona, spoof);
    double gap = 2.0;
    for (std::size_t i = 0; i < b.tau.size(); ++i) gap = std::min(gap, std::abs(b.p_miss[i] - b.p_fa[i]));
    std::vector<double> candidates;
    for (std::size_t i = 0; i < b.tau.size(); ++i) {
      if (std::abs(b.p_miss[i] - b.p_fa[i]) == gap) candidates.push_back((b.p_miss[i] + b.p_fa[i]) / 2);
    }
    const double swapped = compute_eer(nb, ns).eer;
    if (std::adjacent_find(candidates.begin(), candidates.end(), std::not_equal_to<>()) ==
        candidates.end()) {
      ++unique;
      EXPECT_EQ(swapped, compute_eer(bona, spoof).eer) << trial;
    } else {
      EXPECT_NE(std::find(candidates.begin(), candidates.end(), swapped), candidates.end()) << trial;
    }
  }
  EXPECT_GT(unique, 100);
}

// ---- t-DCF ------------------------------------------------------------------

TEST(ComputeMinTdcf, PerfectSeparationIsZero) {
  EXPECT_EQ(compute_min_tdcf(Scores{0.9, 0.8}, Scores{0.1, 0.2}, TdcfCosts{}), 0.0);
}

TEST(ComputeMinTdcf, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Scores bona = random_scores(rng, 1 + rng() % 100, 1.0);
    const Scores spoof = random_scores(rng, 1 + rng() % 100, 0.0);
    const TdcfCosts c{u(rng), 0.01 + u(rng), 0.01 + u(rng)};
    EXPECT_EQ(compute_min_tdcf(bona, spoof, c), Brute(bona, spoof).min_tdcf(c)) << trial;
  }
}

TEST(ComputeMinTdcf, SymmetricCostsAndEer) {
  EXPECT_DOUBLE_EQ(compute_min_tdcf(Scores{0.8, 0.4, 0.6}, Scores{0.5, 0.2, 0.7}, TdcfCosts{}),
                   2.0 / 3.0);
  // min(Pmiss + Pfa) can only undercut the sum at the EER crossing.
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const Scores bona = random_scores(rng, 1 + rng() % 50, 0.7);
    const Scores spoof = random_scores(rng, 1 + rng() % 50, 0.0);
    const double eer = compute_eer(bona, spoof).eer;
    const double dcf = compute_min_tdcf(bona, spoof, TdcfCosts{0.0, 1.0, 1.0});
    EXPECT_LE(dcf, std::min(2.0 * eer, 1.0) + 1e-15);
  }
}

TEST(ComputeMinTdcf, BoundsAndClipping) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const Scores bona = random_scores(rng, 1 + rng() % 30, -1.0);
    const Scores spoof = random_scores(rng, 1 + rng() % 30, 0.0);
    const TdcfCosts c{0.5, 2.0, 1.0};
    const double v = compute_min_tdcf(bona, spoof, c);
    EXPECT_GE(v, c.c0 / c.normalizer() - 1e-15);
    EXPECT_LE(v, 1.0);
  }
}

TEST(ComputeMinTdcf, InvalidCostsRejected) {
  const Scores b{1.0}, s{0.0};
  EXPECT_THROW(compute_min_tdcf(b, s, TdcfCosts{-0.1, 1.0, 1.0}), ConfigError);
  EXPECT_THROW(compute_min_tdcf(b, s, TdcfCosts{0.0, 0.0, 1.0}), ConfigError);
  EXPECT_THROW(compute_min_tdcf(b, s, TdcfCosts{0.0, 1.0, NAN}), ConfigError);
}

TEST(TdcfCosts, JsonRoundTripAndUnknownKey) {
  TdcfCosts c{0.25, 1.5, 3.0}, back;
  read_json(to_json(c), back, "costs");
  EXPECT_EQ(back.c0, 0.25);
  EXPECT_EQ(back.c1, 1.5);
  EXPECT_EQ(back.c2, 3.0);
  EXPECT_THROW(read_json(Json{{"C3", 1.0}}, back, "costs"), ConfigError);
}

// ---- DET --------------------------------------------------------------------

TEST(DetPoints, PerfectSeparationContainsOrigin) {
  const auto pts = det_points(Scores{0.9, 0.8}, Scores{0.1, 0.2});
  EXPECT_NE(std::find(pts.begin(), pts.end(), std::make_pair(0.0, 0.0)), pts.end());
}

TEST(DetPoints, SingleScoreEach) {
  const auto pts = det_points(Scores{1.0}, Scores{0.0});
  const std::vector<std::pair<double, double>> want{{0.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}};
  EXPECT_EQ(pts, want);
  EXPECT_EQ(det_points(Scores{0.0}, Scores{1.0}),
            (std::vector<std::pair<double, double>>{{0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}}));
}

TEST(DetPoints, MonotoneWithCornerEndpoints) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Scores bona = random_scores(rng, 50, 0.8);
    const Scores spoof = random_scores(rng, 50, 0.0);
    const auto pts = det_points(bona, spoof);
    EXPECT_EQ(pts.front().second, 1.0);
    EXPECT_EQ(pts.front().first, 0.0);
    EXPECT_EQ(pts.back().first, 1.0);
    EXPECT_EQ(pts.back().second, 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      EXPECT_GE(pts[i].first, pts[i - 1].first);
      EXPECT_LE(pts[i].second, pts[i - 1].second);
      EXPECT_NE(pts[i], pts[i - 1]);
    }
  }
}

// ---- score files ------------------------------------------------------------

TEST(ScoreFile, FormatHasSixDecimals) {
  EXPECT_EQ(format_scores({{"u1", 0.5}, {"u2", -1.25}}), "u1 0.500000\nu2 -1.250000\n");
  EXPECT_THROW(format_score(NAN), InputError);
  EXPECT_THROW(format_scores({{"a b", 0.0}}), InputError);
  EXPECT_THROW(format_scores({{"", 0.0}}), InputError);
}

TEST(ScoreFile, MalformedLineReportsLineNumber) {
  std::istringstream in("u1 abc\n");
  try {
    parse_scores(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  std::istringstream three("u1 0.5\nu2 0.25\nu3\n");
  try {
    parse_scores(three);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream extra("u1 0.5 7\n");
  EXPECT_THROW(parse_scores(extra), ParseError);
  std::istringstream inf("u1 inf\n");
  EXPECT_THROW(parse_scores(inf), ParseError);
}

TEST(ScoreFile, ThousandRecordRoundTrip) {
  std::mt19937_64 rng(18);
  std::normal_distribution<double> normal(0.0, 5.0);
  std::vector<ScoreRecord> recs;
  for (int i = 0; i < 1000; ++i) {
    const double v = normal(rng);
    recs.push_back({"eval_" + std::to_string(i), std::round(v * 1e6) / 1e6});
  }
  TempDir dir;
  write_scores(recs, dir / "scores.txt");
  const auto back = read_scores(dir / "scores.txt");
  ASSERT_EQ(back.size(), 1000u);
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, recs[i].id);
    EXPECT_EQ(format_score(back[i].score), format_score(recs[i].score));
    EXPECT_NEAR(back[i].score, recs[i].score, 5e-7);
  }
  // Formatting is idempotent on the stored text.
  write_scores(back, dir / "again.txt");
  std::ifstream a(dir / "scores.txt"), b(dir / "again.txt");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_THROW(read_scores(dir / "missing.txt"), IoError);
}

// ---- evaluate ---------------------------------------------------------------

TEST(ScoreReport, OracleScoresGiveZero) {
  const std::vector<ProtocolEntry> protocol{
      {"a", Label::kBonafide}, {"b", Label::kSpoof}, {"c", Label::kSpoof}, {"d", Label::kBonafide}};
  std::vector<ScoreRecord> scores;
  for (const auto& e : protocol) scores.push_back({e.id, e.label == Label::kBonafide ? 1.0 : -1.0});
  const MetricsReport r = score_report(scores, protocol, TdcfCosts{});
  EXPECT_EQ(r.eer, 0.0);
  EXPECT_EQ(r.min_tdcf, 0.0);
  EXPECT_EQ(r.n_bona, 2u);
  EXPECT_EQ(r.n_spoof, 2u);
  scores.push_back({"e", 0.0});
  EXPECT_THROW(score_report(scores, protocol, TdcfCosts{}), ConsistencyError);
}

struct SmallEval {
  CorpusSpec spec;
  std::vector<Utterance> eval;
  ModelConfig config = testing_util::small_config(6, 8, 2, 1);

  SmallEval() {
    spec.n_train = 2;
    spec.n_dev = 2;
    spec.n_eval = 24;
    spec.feature_dim = 6;
    spec.t_min = 6;
    spec.t_max = 14;
    spec.artifact.band_width = 2;
    spec.artifact.seg_len = 4;
    eval = generate_split(spec, Split::kEval);
  }
};

TEST(Evaluate, ConstantModelGivesHalf) {
  SmallEval s;
  const Model m(s.config, testing_util::random_parameters(s.config, 19));
  for (const char* name : {"classifier.weight", "classifier.bias"}) {
    Tensor t = m.parameters().at(name);
    for (double& x : t.mutable_data()) x = 0.0;
  }
  const Evaluation ev = evaluate(m, s.eval, LengthMode::kVariable, 10, TdcfCosts{});
  EXPECT_EQ(ev.report.eer, 0.5);
  EXPECT_EQ(ev.scores.size(), s.eval.size());
}

// The reported metrics equal the brute-force oracle on the emitted scores,
// and both length modes cover every id.
TEST(Evaluate, MatchesIndependentPipeline) {
  SmallEval s;
  const Model m(s.config, testing_util::random_parameters(s.config, 20));
  for (LengthMode mode : {LengthMode::kFixed, LengthMode::kVariable}) {
    const Evaluation ev = evaluate(m, s.eval, mode, 10, TdcfCosts{0.1, 1.0, 2.0}, 3);
    Scores bona, spoof;
    ASSERT_EQ(ev.scores.size(), s.eval.size());
    for (std::size_t i = 0; i < s.eval.size(); ++i) {
      EXPECT_EQ(ev.scores[i].id, s.eval[i].id);
      const double direct =
          model_forward(m, mode == LengthMode::kFixed ? fix_length(s.eval[i], 10)
                                                      : s.eval[i].features)
              .score;
      EXPECT_EQ(ev.scores[i].score, direct);
      (s.eval[i].label == Label::kBonafide ? bona : spoof).push_back(direct);
    }
    const Brute brute(bona, spoof);
    EXPECT_EQ(ev.report.eer, brute.eer());
    EXPECT_EQ(ev.report.min_tdcf, brute.min_tdcf(TdcfCosts{0.1, 1.0, 2.0}));
  }
}

TEST(Evaluate, ReportJson) {
  const MetricsReport r{0.25, 0.5, 0.1, 3, 4};
  const Json j = to_json(r);
  EXPECT_EQ(j.at("eer"), 0.25);
  EXPECT_EQ(j.at("min_tdcf"), 0.5);
  EXPECT_EQ(j.at("n_bona"), 3);
  EXPECT_EQ(j.at("n_spoof"), 4);
  EXPECT_EQ(j.at("threshold"), 0.1);
}

}  // namespace
}  // namespace tcm
