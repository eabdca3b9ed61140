// Copyright 2026 The Coupon Probing Authors.
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

// Experiment harness behind the command-line tool: runs a named policy on an
// instance and renders reports as key=value text or a tab-separated table.

#ifndef COUPON_PROBING_REPORT_H_
#define COUPON_PROBING_REPORT_H_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coupon_probing/model.h"
#include "coupon_probing/oracle.h"
#include "coupon_probing/relaxation.h"
#include "coupon_probing/rounding.h"
#include "coupon_probing/sequencing.h"

namespace coupon_probing {

inline const std::vector<std::string>& PolicyNames() {
  static const std::vector<std::string> names = {
      "alg1", "alg2", "stoch-cp", "e-alg1", "e-alg2", "e-stoch-cp", "opt-oracle"};
  return names;
}

struct RunOptions {
  std::optional<double> beta;   // defaults depend on the extended flag
  std::optional<double> delta;  // defaults to 1 / |S|^2
  int64_t worlds = 10000;
  uint64_t seed = 0;
  bool extended = false;  // maps alg1/alg2/stoch-cp to their W-capped variants
  CostMode cost_mode = CostMode::kThresholdConsistent;
  int64_t marginal_samples = 2000;
  int64_t influence_samples = 10000;
};

struct RunReport {
  std::string policy;
  double mean = 0.0;
  double std_error = 0.0;
  int64_t worlds = 0;
  FeasibilityReport violations;
  std::optional<double> rounding_share;
  std::optional<double> sequencing_share;
  std::optional<double> restricted_value;  // opt-oracle only
  int max_users_probed = 0;
  double beta = 0.0;
  double delta = 0.0;
  bool extended = false;
  uint64_t seed = 0;
  CostMode cost_mode = CostMode::kThresholdConsistent;
  std::vector<std::string> warnings;
  std::string error;
  double elapsed_ms = 0.0;
};

namespace internal {

inline std::string Num(double x) {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << x;
  return out.str();
}

}  // namespace internal

inline std::string CanonicalPolicy(const std::string& name, bool extended) {
  bool known = false;
  for (const auto& n : PolicyNames()) known = known || n == name;
  if (!known) {
    std::string msg = "unknown policy '" + name + "'; valid policies:";
    for (const auto& n : PolicyNames()) msg += " " + n;
    throw ProbingError(msg);
  }
  if (extended && (name == "alg1" || name == "alg2" || name == "stoch-cp")) {
    return "e-" + name;
  }
  return name;
}

inline RunReport RunPolicy(const Instance& instance, const std::string& name,
                           const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.policy = CanonicalPolicy(name, options.extended);
  const bool extended = report.policy.rfind("e-", 0) == 0 ||
                        (report.policy == "opt-oracle" && options.extended);
  report.extended = extended;
  report.seed = options.seed;
  report.cost_mode = options.cost_mode;
  report.beta = options.beta.value_or(extended ? ExtendedDefaultBeta() : DefaultBeta());
  if (extended && !instance.user_cap()) {
    throw ProbingError("policy '" + report.policy + "' needs W in the instance");
  }

  StochCpConfig config;
  config.relaxation.beta = report.beta;
  config.relaxation.delta = options.delta;
  config.relaxation.marginal_samples = options.marginal_samples;
  config.relaxation.rng_seed = StreamRng(options.seed, {101})();
  config.relaxation.cost_mode = options.cost_mode;
  config.influence.samples = options.influence_samples;
  config.influence.rng_seed = StreamRng(options.seed, {102})();

  const ActionSpace space(instance);
  report.delta = options.delta.value_or(DefaultDelta(space));
  if (!space.empty() && std::ceil(1.0 / report.delta) > 1e4) {
    report.warnings.push_back("delta implies more than 10^4 continuous greedy steps");
  }

  const std::string& p = report.policy;
  auto finish = [&](const PolicyEvaluation& eval) {
    report.mean = eval.mean;
    report.std_error = eval.std_error;
    report.worlds = eval.worlds;
    report.violations = eval.violations;
    report.max_users_probed = eval.max_users_probed;
  };
  if (p == "opt-oracle") {
    report.mean = OptimalAdaptiveValue(instance, false, extended);
    report.restricted_value = OptimalAdaptiveValue(instance, true, extended);
  } else if (p == "alg1" || p == "e-alg1") {
    const RoundingPolicy policy(instance, config.relaxation, extended);
    if (policy.vacuous()) {
      report.warnings.push_back("no coupon is at most B/2; the rounding branch never probes");
    }
    finish(EvaluatePolicy(instance, AsPolicy(policy), options.worlds, options.seed,
                          extended));
  } else if (p == "alg2" || p == "e-alg2") {
    const SequencingPolicy policy(
        instance, SingletonInfluenceTable(instance.graph(), config.influence), extended);
    if (policy.degenerate()) {
      throw ProbingError("sequencing branch unavailable: the largest coupon exceeds B or K = 0");
    }
    finish(EvaluatePolicy(instance, AsPolicy(policy), options.worlds, options.seed,
                          extended));
  } else {
    const StochCpPolicy policy(instance, config, extended);
    if (policy.forced_branch() == Branch::kRounding) {
      report.warnings.push_back("combiner always uses the rounding branch");
    } else if (policy.forced_branch() == Branch::kSequencing) {
      report.warnings.push_back("combiner always uses the sequencing branch");
    }
    const PolicyEvaluation eval = EvaluatePolicy(instance, AsPolicy(policy),
                                                 options.worlds, options.seed, extended);
    finish(eval);
    report.rounding_share = static_cast<double>(eval.rounding_runs) / eval.worlds;
    report.sequencing_share = static_cast<double>(eval.sequencing_runs) / eval.worlds;
  }
  report.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return report;
}

// key=value lines; `elapsed_ms` only when `timing` is set, so that reports
// for identical inputs are byte-identical by default.
inline std::string FormatReport(const RunReport& r, bool timing = false) {
  using internal::Num;
  std::ostringstream out;
  out << "policy=" << r.policy << "\n";
  if (!r.error.empty()) {
    out << "error=" << r.error << "\n";
    return out.str();
  }
  out << "mean_utility=" << Num(r.mean) << "\n";
  out << "std_error=" << Num(r.std_error) << "\n";
  out << "worlds=" << r.worlds << "\n";
  if (r.restricted_value) out << "restricted_value=" << Num(*r.restricted_value) << "\n";
  out << "violations=" << r.violations.total() << "\n";
  out << "violations_budget=" << r.violations.budget << "\n";
  out << "violations_probe_cap=" << r.violations.probe_cap << "\n";
  out << "violations_consecutive=" << r.violations.consecutive << "\n";
  out << "violations_user_cap=" << r.violations.user_cap << "\n";
  out << "violations_bookkeeping=" << r.violations.bookkeeping << "\n";
  out << "max_users_probed=" << r.max_users_probed << "\n";
  if (r.rounding_share) out << "branch_rounding=" << Num(*r.rounding_share) << "\n";
  if (r.sequencing_share) out << "branch_sequencing=" << Num(*r.sequencing_share) << "\n";
  out << "seed=" << r.seed << "\n";
  out << "beta=" << Num(r.beta) << "\n";
  out << "delta=" << Num(r.delta) << "\n";
  out << "extended=" << (r.extended ? "true" : "false") << "\n";
  out << "cost_mode="
      << (r.cost_mode == CostMode::kThresholdConsistent ? "threshold" : "paper") << "\n";
  for (const auto& w : r.warnings) out << "warning=" << w << "\n";
  if (timing) out << "elapsed_ms=" << Num(r.elapsed_ms) << "\n";
  return out.str();
}

// One row per policy in input order; failed rows carry their error message.
inline std::string FormatComparison(const std::vector<RunReport>& rows,
                                    bool timing = false) {
  using internal::Num;
  std::ostringstream out;
  out << "policy\tmean_utility\tstd_error\tworlds\tviolations\terror";
  if (timing) out << "\telapsed_ms";
  out << "\n";
  for (const RunReport& r : rows) {
    out << r.policy << "\t";
    if (r.error.empty()) {
      out << Num(r.mean) << "\t" << Num(r.std_error) << "\t" << r.worlds << "\t"
          << r.violations.total() << "\t";
    } else {
      out << "\t\t\t\t" << r.error;
    }
    if (timing) out << "\t" << Num(r.elapsed_ms);
    out << "\n";
  }
  return out.str();
}

inline std::vector<RunReport> ComparePolicies(const Instance& instance,
                                              const std::vector<std::string>& names,
                                              const RunOptions& options) {
  if (names.size() < 2) throw ProbingError("compare needs at least two policies");
  for (const auto& n : names) CanonicalPolicy(n, options.extended);
  std::vector<RunReport> rows;
  for (const auto& n : names) {
    try {
      rows.push_back(RunPolicy(instance, n, options));
    } catch (const ProbingError& e) {
      RunReport failed;
      failed.policy = CanonicalPolicy(n, options.extended);
      failed.error = e.what();
      rows.push_back(failed);
    }
  }
  return rows;
}

}  // namespace coupon_probing

#endif  // COUPON_PROBING_REPORT_H_
