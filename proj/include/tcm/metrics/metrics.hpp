// include/tcm/metrics/metrics.hpp

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

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tcm/errors.hpp"
#include "tcm/json_fields.hpp"

namespace tcm {

/**
   Detection error rates are step functions of the threshold tau, with scores
   oriented so that higher means more bona fide:

     Pmiss(tau) = fraction of bona fide scores <  tau
     Pfa(tau)   = fraction of spoof scores     >= tau

   With M distinct scores pooled over both classes there are M+1 distinct
   (Pmiss, Pfa) pairs. They are realised by the sweep positions
     s_1 - 1,  (s_1 + s_2)/2, ..., (s_{M-1} + s_M)/2,  s_M + 1
   where s_1 < ... < s_M are the distinct scores. Every metric below
   optimises over exactly these positions, in increasing order.
*/
struct SweepPoint {
  double threshold = 0.0;
  double p_miss = 0.0;
  double p_fa = 0.0;
};

namespace detail {

inline void require_scores(std::span<const double> bona, std::span<const double> spoof) {
  if (bona.empty()) throw InputError("no bona fide scores");
  if (spoof.empty()) throw InputError("no spoof scores");
  for (double s : bona) {
    if (!std::isfinite(s)) throw InputError("non-finite bona fide score");
  }
  for (double s : spoof) {
    if (!std::isfinite(s)) throw InputError("non-finite spoof score");
  }
}

}  // namespace detail

/// All sweep positions with their error rates, thresholds increasing.
inline std::vector<SweepPoint> threshold_sweep(std::span<const double> bona,
                                               std::span<const double> spoof) {
  detail::require_scores(bona, spoof);
  std::vector<double> b(bona.begin(), bona.end());
  std::vector<double> s(spoof.begin(), spoof.end());
  std::sort(b.begin(), b.end());
  std::sort(s.begin(), s.end());
  std::vector<double> pooled(b);
  pooled.insert(pooled.end(), s.begin(), s.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  std::vector<double> thresholds;
  thresholds.reserve(pooled.size() + 1);
  thresholds.push_back(pooled.front() - 1.0);
  for (std::size_t i = 0; i + 1 < pooled.size(); ++i) {
    thresholds.push_back(0.5 * (pooled[i] + pooled[i + 1]));
  }
  thresholds.push_back(pooled.back() + 1.0);

  const double nb = static_cast<double>(b.size());
  const double ns = static_cast<double>(s.size());
  std::vector<SweepPoint> out;
  out.reserve(thresholds.size());
  std::size_t bi = 0, si = 0;  // counts of scores below the threshold
  for (double tau : thresholds) {
    while (bi < b.size() && b[bi] < tau) ++bi;
    while (si < s.size() && s[si] < tau) ++si;
    out.push_back({tau, static_cast<double>(bi) / nb,
                   static_cast<double>(s.size() - si) / ns});
  }
  return out;
}

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// EER = (Pmiss + Pfa)/2 at the sweep position minimising |Pmiss - Pfa|;
/// ties go to the lowest threshold.
inline EerResult compute_eer(std::span<const double> bona, std::span<const double> spoof) {
  const auto sweep = threshold_sweep(bona, spoof);
  std::size_t best = 0;
  double best_gap = std::abs(sweep[0].p_miss - sweep[0].p_fa);
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    const double gap = std::abs(sweep[i].p_miss - sweep[i].p_fa);
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return {(sweep[best].p_miss + sweep[best].p_fa) / 2.0, sweep[best].threshold};
}

/// Coefficients of the constrained tandem detection cost
///   t-DCF(tau) = C0 + C1 Pmiss(tau) + C2 Pfa(tau),
/// normalised by min(C0 + C1, C0 + C2).
struct TdcfCosts {
  double c0 = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;

  void validate() const {
    if (!(c0 >= 0.0) || !std::isfinite(c0)) throw ConfigError("costs.C0 must be >= 0");
    if (!(c1 > 0.0) || !std::isfinite(c1)) throw ConfigError("costs.C1 must be > 0");
    if (!(c2 > 0.0) || !std::isfinite(c2)) throw ConfigError("costs.C2 must be > 0");
  }

  double normalizer() const { return std::min(c0 + c1, c0 + c2); }
};

inline Json to_json(const TdcfCosts& c) {
  return Json{{"C0", c.c0}, {"C1", c.c1}, {"C2", c.c2}};
}

inline void read_json(const Json& j, TdcfCosts& c, const std::string& path) {
  FieldReader r(j, path);
  r.get("C0", c.c0);
  r.get("C1", c.c1);
  r.get("C2", c.c2);
  r.finish();
}

/// Minimum over the sweep of the normalised t-DCF, clipped at 1.
inline double compute_min_tdcf(std::span<const double> bona, std::span<const double> spoof,
                               const TdcfCosts& costs) {
  costs.validate();
  const auto sweep = threshold_sweep(bona, spoof);
  const double norm = costs.normalizer();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : sweep) {
    best = std::min(best, (costs.c0 + costs.c1 * p.p_miss + costs.c2 * p.p_fa) / norm);
  }
  return std::min(best, 1.0);
}

/// (Pmiss, Pfa) at every sweep position, thresholds increasing: Pmiss is
/// non-decreasing, Pfa non-increasing, the first point has Pfa = 1 and the
/// last Pmiss = 1.
inline std::vector<std::pair<double, double>> det_points(std::span<const double> bona,
                                                         std::span<const double> spoof) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : threshold_sweep(bona, spoof)) out.emplace_back(p.p_miss, p.p_fa);
  return out;
}

}  // namespace tcm
