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

// coupon_probe: run probing policies on instance files.
//
//   coupon_probe validate toy.inst
//   coupon_probe run toy.inst --policy stoch-cp --worlds 10000 --seed 7
//   coupon_probe compare toy.inst --policy alg1,alg2,stoch-cp
//   coupon_probe oracle toy.inst [--extended]

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coupon_probing/coupon_probing.h"

namespace cp = coupon_probing;

namespace {

struct SharedFlags {
  double beta = -1.0;
  double delta = -1.0;
  int64_t worlds = 10000;
  uint64_t seed = 0;
  bool extended = false;
  std::string cost_mode = "threshold";
  int64_t samples = 2000;
  int64_t influence_samples = 10000;
  bool timing = false;
};

void AddSharedFlags(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--beta", f.beta, "budget scaling in [0, 1/2] (default: bound maximizer)")
      ->check(CLI::Range(0.0, 0.5));
  cmd->add_option("--delta", f.delta, "continuous greedy step (default: 1/|S|^2)")
      ->check(CLI::Range(1e-12, 1.0));
  cmd->add_option("--worlds", f.worlds, "simulated worlds per policy")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "master random seed");
  cmd->add_flag("--extended", f.extended, "use the W-capped variants");
  cmd->add_option("--cost-mode", f.cost_mode, "expected cost formula")
      ->check(CLI::IsMember({"threshold", "paper"}));
  cmd->add_option("--samples", f.samples, "marginal samples per greedy step")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--influence-samples", f.influence_samples,
                  "Monte Carlo samples for singleton influence on large graphs")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--timing", f.timing, "append elapsed_ms to reports");
}

cp::RunOptions ToOptions(const SharedFlags& f) {
  cp::RunOptions o;
  if (f.beta >= 0.0) o.beta = f.beta;
  if (f.delta > 0.0) o.delta = f.delta;
  o.worlds = f.worlds;
  o.seed = f.seed;
  o.extended = f.extended;
  o.cost_mode = f.cost_mode == "paper" ? cp::CostMode::kPaperLiteral
                                       : cp::CostMode::kThresholdConsistent;
  o.marginal_samples = f.samples;
  o.influence_samples = f.influence_samples;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic coupon probing policies for influence maximization"};
  app.require_subcommand(1);

  std::string path;
  SharedFlags flags;

  CLI::App* validate = app.add_subcommand("validate", "check an instance file");
  validate->add_option("instance", path, "instance file")->required();

  std::string policy;
  CLI::App* run = app.add_subcommand("run", "evaluate one policy");
  run->add_option("instance", path, "instance file")->required();
  run->add_option("--policy", policy, "policy name")->required();
  AddSharedFlags(run, flags);

  std::vector<std::string> policies;
  CLI::App* compare = app.add_subcommand("compare", "evaluate policies on common worlds");
  compare->add_option("instance", path, "instance file")->required();
  compare->add_option("--policy", policies, "policy names (repeat or comma-separate)")
      ->required()
      ->delimiter(',');
  AddSharedFlags(compare, flags);

  CLI::App* oracle = app.add_subcommand("oracle", "optimal adaptive value by backward induction");
  oracle->add_option("instance", path, "instance file")->required();
  oracle->add_flag("--extended", flags.extended, "enforce the user cap W");
  oracle->add_flag("--timing", flags.timing, "append elapsed_ms to the report");

  CLI11_PARSE(app, argc, argv);

  try {
    const cp::Instance instance = cp::LoadInstance(path);
    if (validate->parsed()) {
      const cp::ActionSpace space(instance);
      std::cout << "status=ok\n"
                << "users=" << instance.user_count() << "\n"
                << "edges=" << instance.graph().edge_count() << "\n"
                << "coupons=" << instance.coupon_count() << "\n"
                << "low_value_coupons=" << cp::LowValueCoupons(instance).size() << "\n"
                << "actions=" << space.size() << "\n";
      return 0;
    }
    const cp::RunOptions options = ToOptions(flags);
    if (run->parsed()) {
      std::cout << cp::FormatReport(cp::RunPolicy(instance, policy, options), flags.timing);
    } else if (compare->parsed()) {
      std::cout << cp::FormatComparison(cp::ComparePolicies(instance, policies, options),
                                        flags.timing);
    } else if (oracle->parsed()) {
      std::cout << cp::FormatReport(cp::RunPolicy(instance, "opt-oracle", options),
                                    flags.timing);
    }
  } catch (const cp::ProbingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
