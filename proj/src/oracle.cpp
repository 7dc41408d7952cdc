#include "evcrp/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "evcrp/errors.hpp"
#include "evcrp/feasibility.hpp"
#include "evcrp/greedy.hpp"
#include "evcrp/relaxation.hpp"
#include "evcrp/simplex.hpp"

namespace evcrp::oracle {

namespace {

using Clock = std::chrono::steady_clock;

struct OptionView {
  int option_index;
  double gain;
};

struct UserView {
  int request_index;
  double max_gain = 0.0;
  std::vector<OptionView> options; // descending gain, ties by station id
};

bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  // both sorted ascending
  std::size_t i = 0;
  for (const int x : b) {
    if (i < a.size() && a[i] == x) ++i;
  }
  return i == a.size();
}

// An option is dominated only by a same-user option with at least its
// gain, a subset of its slots, no higher rate, and either the same station
// or one whose EVSE count can never bind.
bool dominated_option(const Instance& instance, const Request& req,
                      const std::vector<double>& gains, std::size_t j,
                      const std::vector<bool>& dropped) {
  const int num_users = static_cast<int>(instance.requests.size());
  const ChargingOption& oj = req.options[j];
  const Station& sj = *instance.find_station(oj.station);
  for (std::size_t k = 0; k < req.options.size(); ++k) {
    if (k == j || dropped[k]) continue;
    const ChargingOption& ok = req.options[k];
    const Station& sk = *instance.find_station(ok.station);
    if (gains[k] < gains[j] - 1e-12) continue;
    if (!is_subset(ok.slots, oj.slots)) continue;
    if (sk.rate_kw > sj.rate_kw + 1e-12) continue;
    if (ok.station != oj.station && sk.num_evse < num_users) continue;
    const bool tie = gains[k] <= gains[j] + 1e-12 && ok.slots == oj.slots &&
                     std::abs(sk.rate_kw - sj.rate_kw) <= 1e-12;
    if (!tie || ok.station < oj.station) return true;
  }
  return false;
}

class ExactSearch {
 public:
  ExactSearch(const Instance& instance, const SearchLimits& limits)
      : instance_(instance), limits_(limits), state_(instance),
        start_(Clock::now()) {}

  Solution run() {
    // Warm start: the greedy sweep is cheap and typically strong.
    {
      const Solution greedy = greedy::greedy_u(instance_);
      best_gain_ = greedy.objective;
      best_schedule_ = greedy.schedule;
    }

    // Options provably absent from every improving solution are dropped;
    // options provably present in all of them are pinned up front.
    std::vector<std::vector<bool>> drop(instance_.requests.size());
    for (std::size_t r = 0; r < instance_.requests.size(); ++r)
      drop[r].assign(instance_.requests[r].options.size(), false);
    std::vector<lp::VarKey> pinned;
    bool proven = false;
    if (limits_.use_lp_bound)
      proven = reduced_cost_fixing(&drop, &pinned);

    if (!proven) {
      double base_gain = 0.0;
      bool pins_clash = false;
      for (const lp::VarKey& pin : pinned) {
        const Request& req =
            instance_.requests[static_cast<std::size_t>(pin.request_index)];
        const ChargingOption& opt =
            req.options[static_cast<std::size_t>(pin.option_index)];
        if (!try_assign(state_, instance_, req, opt)) {
          // jointly infeasible pins mean no improving solution exists
          pins_clash = true;
          break;
        }
        partial_.assign(req.user_id, opt.station);
        fixed_.push_back(pin);
        base_gain += conditional_gain(req, opt, instance_);
      }
      if (!pins_clash) {
        build_views(drop, pinned);
        dfs(0, base_gain);
      }
    }

    Solution solution;
    solution.schedule = best_schedule_;
    solution.objective = evaluate_objective(instance_, best_schedule_);
    solution.method = "exact";
    if (!aborted_) {
      solution.optimal = true;
    } else {
      solution.optimal =
          root_ub_ - best_gain_ <=
          limits_.gap_tolerance * std::max(1.0, std::abs(best_gain_));
    }
    solution.wall_time_s =
        std::chrono::duration<double>(Clock::now() - start_).count();
    return solution;
  }

 private:
  // Root relaxation plus variable fixing. Returns true when the root bound
  // already proves the incumbent optimal.
  bool reduced_cost_fixing(std::vector<std::vector<bool>>* drop,
                           std::vector<lp::VarKey>* pinned) {
    lp::RelaxationLp rel;
    lp::SimplexResult result;
    try {
      rel = lp::build_relaxation_lp(instance_, {},
                                    lp::all_option_vars(instance_));
      if (rel.vars.empty()) return true; // nothing to assign at all
      result = lp::solve(rel.lp);
    } catch (const std::exception&) {
      return false;
    }
    if (result.status != lp::SimplexStatus::Optimal) return false;
    root_ub_ = result.objective + rel.pinned_gain;

    const double eps = 1e-9 * std::max(1.0, std::abs(best_gain_));
    if (root_ub_ <= best_gain_ + eps) return true;

    const Eigen::VectorXd d = lp::reduced_costs(rel.lp, result);
    for (std::size_t j = 0; j < rel.vars.size(); ++j) {
      const auto state = result.var_state[j];
      const lp::VarKey key = rel.vars[j];
      if (state == lp::VarState::AtLower &&
          root_ub_ + d(static_cast<Eigen::Index>(j)) < best_gain_ - eps) {
        (*drop)[static_cast<std::size_t>(key.request_index)]
               [static_cast<std::size_t>(key.option_index)] = true;
      } else if (state == lp::VarState::AtUpper &&
                 root_ub_ - d(static_cast<Eigen::Index>(j)) <
                     best_gain_ - eps) {
        pinned->push_back(key);
      }
    }
    return false;
  }

  void build_views(const std::vector<std::vector<bool>>& drop,
                   const std::vector<lp::VarKey>& pinned) {
    std::vector<bool> is_pinned(instance_.requests.size(), false);
    for (const lp::VarKey& pin : pinned)
      is_pinned[static_cast<std::size_t>(pin.request_index)] = true;

    for (std::size_t r = 0; r < instance_.requests.size(); ++r) {
      if (is_pinned[r]) continue;
      const Request& req = instance_.requests[r];
      UserView view;
      view.request_index = static_cast<int>(r);
      std::vector<double> gains(req.options.size());
      for (std::size_t o = 0; o < req.options.size(); ++o)
        gains[o] = conditional_gain(req, req.options[o], instance_);
      for (std::size_t o = 0; o < req.options.size(); ++o) {
        if (drop[r][o]) continue;
        if (dominated_option(instance_, req, gains, o, drop[r])) continue;
        view.options.push_back({static_cast<int>(o), gains[o]});
      }
      std::sort(view.options.begin(), view.options.end(),
                [&](const OptionView& a, const OptionView& b) {
                  if (a.gain != b.gain) return a.gain > b.gain;
                  return req.options[static_cast<std::size_t>(a.option_index)]
                             .station <
                         req.options[static_cast<std::size_t>(b.option_index)]
                             .station;
                });
      view.max_gain = view.options.empty() ? 0.0 : view.options.front().gain;
      views_.push_back(std::move(view));
    }
    std::sort(views_.begin(), views_.end(),
              [&](const UserView& a, const UserView& b) {
                if (a.max_gain != b.max_gain) return a.max_gain > b.max_gain;
                return instance_.requests[static_cast<std::size_t>(
                           a.request_index)].user_id <
                       instance_.requests[static_cast<std::size_t>(
                           b.request_index)].user_id;
              });
    suffix_gain_.assign(views_.size() + 1, 0.0);
    for (std::size_t d = views_.size(); d-- > 0;)
      suffix_gain_[d] = suffix_gain_[d + 1] + views_[d].max_gain;
  }

  bool out_of_budget() {
    if (aborted_) return true;
    if (nodes_ >= limits_.node_budget) {
      aborted_ = true;
      return true;
    }
    if ((nodes_ & 0xff) == 0 &&
        std::chrono::duration<double>(Clock::now() - start_).count() >
            limits_.time_budget_s) {
      aborted_ = true;
      return true;
    }
    return false;
  }

  double lp_node_bound(std::size_t depth, double current_gain) {
    std::vector<lp::VarKey> allowed;
    for (std::size_t d = depth; d < views_.size(); ++d)
      for (const OptionView& o : views_[d].options)
        allowed.push_back({views_[d].request_index, o.option_index});
    try {
      return lp::solve_lp_relaxation(instance_, fixed_, allowed).objective;
    } catch (const std::exception&) {
      return current_gain + suffix_gain_[depth];
    }
  }

  void dfs(std::size_t depth, double current_gain) {
    ++nodes_;
    if (out_of_budget()) return;
    if (current_gain > best_gain_ + 1e-12) {
      best_gain_ = current_gain;
      best_schedule_ = partial_;
    }
    if (depth == views_.size()) return;

    const double prune_eps = 1e-12 * std::max(1.0, std::abs(best_gain_));
    if (current_gain + suffix_gain_[depth] <= best_gain_ + prune_eps) return;
    if (limits_.use_lp_bound &&
        depth <= static_cast<std::size_t>(limits_.lp_bound_max_depth) &&
        lp_node_bound(depth, current_gain) <= best_gain_ + prune_eps)
      return;

    const UserView& user = views_[depth];
    const Request& req =
        instance_.requests[static_cast<std::size_t>(user.request_index)];
    for (const OptionView& o : user.options) {
      const ChargingOption& opt =
          req.options[static_cast<std::size_t>(o.option_index)];
      if (!try_assign(state_, instance_, req, opt)) continue;
      partial_.assign(req.user_id, opt.station);
      fixed_.push_back({user.request_index, o.option_index});
      dfs(depth + 1, current_gain + o.gain);
      fixed_.pop_back();
      partial_.unassign(req.user_id);
      unassign(state_, instance_, req, opt);
      if (aborted_) return;
    }
    dfs(depth + 1, current_gain); // reject this user
  }

  const Instance& instance_;
  const SearchLimits limits_;
  std::vector<UserView> views_;
  std::vector<double> suffix_gain_;
  LoadState state_;
  Schedule partial_;
  std::vector<lp::VarKey> fixed_;
  Schedule best_schedule_;
  double best_gain_ = 0.0;
  double root_ub_ = std::numeric_limits<double>::infinity();
  std::int64_t nodes_ = 0;
  bool aborted_ = false;
  Clock::time_point start_;
};

}  // namespace

Solution enumerate_exhaustive(const Instance& instance) {
  double combos = 1.0;
  for (const Request& r : instance.requests) {
    combos *= static_cast<double>(r.options.size() + 1);
    if (combos > 1e7)
      throw std::invalid_argument(
          "instance too large for exhaustive enumeration");
  }

  const auto start = Clock::now();
  LoadState state(instance);
  Schedule partial, best;
  double best_gain = 0.0;

  // Plain depth-first sweep; packing constraints are downward closed, so
  // filtering infeasible prefixes loses no feasible completion.
  auto recurse = [&](auto&& self, std::size_t depth, double gain) -> void {
    if (depth == instance.requests.size()) {
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best = partial;
      }
      return;
    }
    const Request& req = instance.requests[depth];
    for (const ChargingOption& opt : req.options) {
      if (!try_assign(state, instance, req, opt)) continue;
      partial.assign(req.user_id, opt.station);
      self(self, depth + 1, gain + conditional_gain(req, opt, instance));
      partial.unassign(req.user_id);
      unassign(state, instance, req, opt);
    }
    self(self, depth + 1, gain);
  };
  recurse(recurse, 0, 0.0);

  Solution solution;
  solution.schedule = best;
  solution.objective = evaluate_objective(instance, best);
  solution.method = "exhaustive";
  solution.optimal = true;
  solution.wall_time_s =
      std::chrono::duration<double>(Clock::now() - start).count();
  return solution;
}

Solution solve_exact(const Instance& instance, const SearchLimits& limits) {
  ExactSearch search(instance, limits);
  return search.run();
}

}  // namespace evcrp::oracle
