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

// Problem instance, the threshold coupon-adoption model, the action space of
// per-user coupon sequences, and single-user probing semantics.

#ifndef COUPON_PROBING_MODEL_H_
#define COUPON_PROBING_MODEL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coupon_probing/influence.h"
#include "coupon_probing/random.h"

namespace coupon_probing {

// Relative slack used when comparing budget sums built from coupon values.
inline constexpr double kBudgetSlack = 1e-12;

class Instance {
 public:
  Instance() = default;

  // `attractiveness[v][c]` is the probability that user v accepts coupon c.
  Instance(Graph graph, std::vector<double> coupons,
           std::vector<std::vector<double>> attractiveness, int probe_cap,
           double budget, std::optional<int> user_cap = std::nullopt)
      : graph_(std::move(graph)),
        coupons_(std::move(coupons)),
        attractiveness_(std::move(attractiveness)),
        probe_cap_(probe_cap),
        budget_(budget),
        user_cap_(user_cap) {
    Validate();
  }

  const Graph& graph() const { return graph_; }
  int user_count() const { return graph_.node_count(); }
  int coupon_count() const { return static_cast<int>(coupons_.size()); }

  // Coupon values, strictly increasing.
  const std::vector<double>& coupons() const { return coupons_; }
  double coupon(int c) const { return coupons_[c]; }
  double attractiveness(NodeId v, int c) const { return attractiveness_[v][c]; }
  const std::vector<std::vector<double>>& attractiveness() const {
    return attractiveness_;
  }

  // K: maximum number of offers to one user.
  int probe_cap() const { return probe_cap_; }
  // B: maximum total value of redeemed coupons.
  double budget() const { return budget_; }
  // W: maximum number of distinct users probed (extended model).
  const std::optional<int>& user_cap() const { return user_cap_; }

  int max_coupon() const { return coupon_count() - 1; }

 private:
  void Validate() const {
    if (coupons_.empty()) throw ProbingError("instance needs at least one coupon");
    for (std::size_t c = 0; c < coupons_.size(); ++c) {
      if (!(coupons_[c] > 0.0)) {
        throw ProbingError("coupon " + std::to_string(c) +
                           " must have a positive value");
      }
      if (c > 0 && !(coupons_[c] > coupons_[c - 1])) {
        throw ProbingError("coupon values must be strictly increasing");
      }
    }
    if (static_cast<int>(attractiveness_.size()) != user_count()) {
      throw ProbingError("attractiveness needs one row per user");
    }
    for (int v = 0; v < user_count(); ++v) {
      const auto& row = attractiveness_[v];
      if (static_cast<int>(row.size()) != coupon_count()) {
        throw ProbingError("attractiveness row " + std::to_string(v) +
                           " needs one entry per coupon");
      }
      for (int c = 0; c < coupon_count(); ++c) {
        if (!(row[c] >= 0.0 && row[c] <= 1.0)) {
          throw ProbingError("attractiveness of coupon " + std::to_string(c) +
                             " to user " + std::to_string(v) +
                             " is outside [0, 1]");
        }
        if (c > 0 && row[c] < row[c - 1]) {
          std::ostringstream msg;
          msg << "user " << v << " is not rational: attractiveness "
              << row[c - 1] << " of coupon " << coupons_[c - 1]
              << " exceeds " << row[c] << " of larger coupon " << coupons_[c];
          throw ProbingError(msg.str());
        }
      }
    }
    if (probe_cap_ < 0) throw ProbingError("probe cap K must be non-negative");
    if (!(budget_ > 0.0)) throw ProbingError("budget B must be positive");
    if (user_cap_ && *user_cap_ < 0) {
      throw ProbingError("user cap W must be non-negative");
    }
  }

  Graph graph_;
  std::vector<double> coupons_;
  std::vector<std::vector<double>> attractiveness_;
  int probe_cap_ = 0;
  double budget_ = 0.0;
  std::optional<int> user_cap_;
};

// A joint realization: per-user adoption thresholds plus the live edges.
struct World {
  std::vector<double> thresholds;
  CascadeRealization cascade;
};

inline World SampleWorld(const Instance& instance, Rng& rng) {
  World world;
  world.thresholds.resize(instance.user_count());
  // (0, 1], so attractiveness 0 never accepts and 1 always accepts.
  for (double& t : world.thresholds) t = 1.0 - UniformUnit(rng);
  world.cascade = SampleCascade(instance.graph(), rng);
  return world;
}

inline bool Realize(const Instance& instance, const World& world, NodeId user,
                    int coupon) {
  return instance.attractiveness(user, coupon) >= world.thresholds[user];
}

// Indices of coupons with value at most B/2, in increasing order.
inline std::vector<int> LowValueCoupons(const Instance& instance) {
  std::vector<int> low;
  for (int c = 0; c < instance.coupon_count(); ++c) {
    if (instance.coupon(c) <= instance.budget() / 2) low.push_back(c);
  }
  return low;
}

// Strictly increasing coupon indices offered to one user in order.
using ProbeSequence = std::vector<int>;

struct Action {
  NodeId user = 0;
  ProbeSequence sequence;

  friend bool operator==(const Action&, const Action&) = default;
};

// S = V x Psi, where Psi holds every increasing subsequence of the
// low-value coupons with length 1..K. Action id = user * |Psi| + sequence id.
class ActionSpace {
 public:
  explicit ActionSpace(const Instance& instance)
      : user_count_(instance.user_count()) {
    const std::vector<int> low = LowValueCoupons(instance);
    const int max_len = std::min<int>(instance.probe_cap(), low.size());
    ProbeSequence current;
    for (int len = 1; len <= max_len; ++len) Enumerate(low, 0, len, current);
  }

  int user_count() const { return user_count_; }
  int sequence_count() const { return static_cast<int>(sequences_.size()); }
  int size() const { return user_count_ * sequence_count(); }
  bool empty() const { return size() == 0; }

  const std::vector<ProbeSequence>& sequences() const { return sequences_; }
  const ProbeSequence& sequence(int s) const { return sequences_[s]; }

  int id(NodeId user, int sequence_index) const {
    return user * sequence_count() + sequence_index;
  }
  NodeId user_of(int action) const { return action / sequence_count(); }
  int sequence_of(int action) const { return action % sequence_count(); }
  Action action(int id) const { return {user_of(id), sequence(sequence_of(id))}; }

  std::vector<Action> actions() const {
    std::vector<Action> result;
    result.reserve(size());
    for (int a = 0; a < size(); ++a) result.push_back(action(a));
    return result;
  }

 private:
  void Enumerate(const std::vector<int>& low, std::size_t start, int len,
                 ProbeSequence& current) {
    if (static_cast<int>(current.size()) == len) {
      sequences_.push_back(current);
      return;
    }
    for (std::size_t i = start; i < low.size(); ++i) {
      current.push_back(low[i]);
      Enumerate(low, i + 1, len, current);
      current.pop_back();
    }
  }

  int user_count_ = 0;
  std::vector<ProbeSequence> sequences_;
};

inline void CheckSequence(const Instance& instance, const Action& action) {
  if (action.user < 0 || action.user >= instance.user_count()) {
    throw ProbingError("action references unknown user " +
                       std::to_string(action.user));
  }
  if (action.sequence.empty()) throw ProbingError("empty probe sequence");
  for (std::size_t i = 0; i < action.sequence.size(); ++i) {
    const int c = action.sequence[i];
    if (c < 0 || c >= instance.coupon_count()) {
      throw ProbingError("probe sequence references unknown coupon " +
                         std::to_string(c));
    }
    if (i > 0 && c <= action.sequence[i - 1]) {
      throw ProbingError("probe sequence must be strictly increasing");
    }
  }
}

enum class CostMode {
  // Exact expected spend under the shared-threshold model.
  kThresholdConsistent,
  // Independent-rejection product form.
  kPaperLiteral,
};

// Expected value redeemed when `action.user` is probed through the sequence.
inline double ExpectedCost(const Instance& instance, const Action& action,
                           CostMode mode = CostMode::kThresholdConsistent) {
  double cost = 0.0;
  double prev = 0.0;
  double all_rejected = 1.0;
  for (int c : action.sequence) {
    const double p = instance.attractiveness(action.user, c);
    if (mode == CostMode::kThresholdConsistent) {
      cost += (p - prev) * instance.coupon(c);
      prev = p;
    } else {
      cost += all_rejected * p * instance.coupon(c);
      all_rejected *= 1.0 - p;
    }
  }
  return cost;
}

struct ProbeStep {
  NodeId user = 0;
  int coupon = 0;
  double value = 0.0;
  bool accepted = false;
  double budget_after = 0.0;

  friend bool operator==(const ProbeStep&, const ProbeStep&) = default;
};

enum class Branch { kNone, kRounding, kSequencing };

struct PolicyTrace {
  std::vector<ProbeStep> steps;
  SeedSet seeds;
  double redeemed = 0.0;
  // Which stoch-CP branch produced the trace, if any.
  Branch branch = Branch::kNone;
  // Set when the rounding branch had no low-value coupons to work with.
  bool vacuous = false;
  int discarded = 0;
};

// Offers the sequence in increasing value until the first accept. Steps are
// appended to `trace`; accepted users join trace->seeds.
inline std::optional<int> ProbeUser(const Instance& instance, const World& world,
                                    const Action& action, double remaining_budget,
                                    PolicyTrace* trace) {
  if (remaining_budget < 0.0) throw ProbingError("negative remaining budget");
  for (int c : action.sequence) {
    const bool accepted = Realize(instance, world, action.user, c);
    if (accepted) remaining_budget -= instance.coupon(c);
    if (trace != nullptr) {
      trace->steps.push_back({action.user, c, instance.coupon(c), accepted,
                              remaining_budget});
      if (accepted) {
        trace->redeemed += instance.coupon(c);
        trace->seeds.insert(std::lower_bound(trace->seeds.begin(),
                                             trace->seeds.end(), action.user),
                            action.user);
      }
    }
    if (accepted) return c;
  }
  return std::nullopt;
}

struct FeasibilityReport {
  int budget = 0;        // redeemed > B
  int probe_cap = 0;     // some user offered more than K coupons
  int consecutive = 0;   // some user probed in non-contiguous rounds
  int user_cap = 0;      // more than W distinct users probed
  int bookkeeping = 0;   // budget trajectory or seed set inconsistent

  int total() const {
    return budget + probe_cap + consecutive + user_cap + bookkeeping;
  }
  FeasibilityReport& operator+=(const FeasibilityReport& o) {
    budget += o.budget;
    probe_cap += o.probe_cap;
    consecutive += o.consecutive;
    user_cap += o.user_cap;
    bookkeeping += o.bookkeeping;
    return *this;
  }
};

// Checks a trace against the inner and (restricted) outer constraints.
// Each category counts at most one violation per trace.
inline FeasibilityReport CheckFeasibility(const Instance& instance,
                                          const PolicyTrace& trace,
                                          bool check_user_cap) {
  FeasibilityReport report;
  const double slack = kBudgetSlack * instance.budget();
  const int n = instance.user_count();
  std::vector<int> offers(n, 0);
  std::vector<uint8_t> closed(n, 0);
  NodeId current = -1;
  double redeemed = 0.0;
  double last_budget = instance.budget();
  SeedSet seeds;
  bool bad_consecutive = false;
  bool bad_bookkeeping = false;
  for (const ProbeStep& step : trace.steps) {
    if (step.user != current) {
      if (current >= 0) closed[current] = 1;
      if (closed[step.user]) bad_consecutive = true;
      current = step.user;
    }
    ++offers[step.user];
    if (step.accepted) {
      redeemed += step.value;
      seeds.push_back(step.user);
    }
    const double expected_budget = instance.budget() - redeemed;
    if (std::abs(step.budget_after - expected_budget) > slack ||
        step.budget_after > last_budget + slack) {
      bad_bookkeeping = true;
    }
    last_budget = step.budget_after;
  }
  std::sort(seeds.begin(), seeds.end());
  if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end() ||
      seeds != trace.seeds || std::abs(redeemed - trace.redeemed) > slack) {
    bad_bookkeeping = true;
  }
  if (redeemed > instance.budget() + slack) report.budget = 1;
  if (std::any_of(offers.begin(), offers.end(),
                  [&](int k) { return k > instance.probe_cap(); })) {
    report.probe_cap = 1;
  }
  if (bad_consecutive) report.consecutive = 1;
  if (check_user_cap && instance.user_cap()) {
    const auto probed = std::count_if(offers.begin(), offers.end(),
                                      [](int k) { return k > 0; });
    if (probed > *instance.user_cap()) report.user_cap = 1;
  }
  if (bad_bookkeeping) report.bookkeeping = 1;
  return report;
}

}  // namespace coupon_probing

#endif  // COUPON_PROBING_MODEL_H_
