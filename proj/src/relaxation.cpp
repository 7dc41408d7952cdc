#include "evcrp/relaxation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "evcrp/errors.hpp"
#include "evcrp/feasibility.hpp"
#include "evcrp/rng.hpp"

namespace evcrp::lp {

namespace {

constexpr double kFeasTol = 1e-7;
constexpr double kRoundTol = 1e-7;

}  // namespace

std::vector<VarKey> all_option_vars(const Instance& instance) {
  std::vector<VarKey> vars;
  for (std::size_t r = 0; r < instance.requests.size(); ++r)
    for (std::size_t o = 0; o < instance.requests[r].options.size(); ++o)
      vars.push_back({static_cast<int>(r), static_cast<int>(o)});
  return vars;
}

FractionalSolution solve_lp_relaxation(const Instance& instance,
                                       PivotRule rule) {
  return solve_lp_relaxation(instance, {}, all_option_vars(instance), rule);
}

RelaxationLp build_relaxation_lp(const Instance& instance,
                                 const std::vector<VarKey>& fixed,
                                 const std::vector<VarKey>& allowed) {
  const int T = instance.num_slots();
  const std::size_t C = instance.stations.size();

  // Residual right-hand sides once the pins are charged.
  std::vector<double> cap_rhs(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t)
    cap_rhs[static_cast<std::size_t>(t)] =
        instance.capacity_kw -
        instance.base_load_kw[static_cast<std::size_t>(t)];
  std::vector<double> occ_rhs(C * static_cast<std::size_t>(T));
  for (std::size_t c = 0; c < C; ++c)
    for (int t = 0; t < T; ++t)
      occ_rhs[c * T + t] = instance.stations[c].num_evse;

  RelaxationLp rel;
  std::unordered_set<int> pinned_users;
  for (const VarKey& v : fixed) {
    const Request& req =
        instance.requests[static_cast<std::size_t>(v.request_index)];
    const ChargingOption& opt =
        req.options[static_cast<std::size_t>(v.option_index)];
    if (!pinned_users.insert(req.user_id).second)
      throw solve_error("two pinned options for one user");
    const int c = instance.station_index(opt.station);
    const double rate = instance.stations[static_cast<std::size_t>(c)].rate_kw;
    for (const int t : opt.slots) {
      cap_rhs[static_cast<std::size_t>(t)] -= rate;
      occ_rhs[static_cast<std::size_t>(c) * T + t] -= 1.0;
      if (cap_rhs[static_cast<std::size_t>(t)] < -kFeasTol ||
          occ_rhs[static_cast<std::size_t>(c) * T + t] < -kFeasTol)
        throw solve_error("pinned assignments violate the constraints");
    }
    rel.pinned_gain += conditional_gain(req, opt, instance);
  }

  // Variables: allowed options of unpinned users.
  struct Var {
    int station_index;
    double rate;
  };
  std::vector<Var> vars;
  std::vector<double> gains;
  for (const VarKey& v : allowed) {
    const Request& req =
        instance.requests[static_cast<std::size_t>(v.request_index)];
    if (pinned_users.count(req.user_id)) continue;
    const ChargingOption& opt =
        req.options[static_cast<std::size_t>(v.option_index)];
    const int c = instance.station_index(opt.station);
    rel.vars.push_back(v);
    vars.push_back({c, instance.stations[static_cast<std::size_t>(c)].rate_kw});
    gains.push_back(conditional_gain(req, opt, instance));
  }

  const int n = static_cast<int>(rel.vars.size());
  if (n == 0) return rel;

  // Row pruning: keep a row only if the involved variables could overload
  // its residual right-hand side.
  std::vector<double> cap_weight(static_cast<std::size_t>(T), 0.0);
  std::vector<int> occ_count(C * static_cast<std::size_t>(T), 0);
  std::vector<int> user_var_count(instance.requests.size(), 0);
  for (int j = 0; j < n; ++j) {
    const VarKey& key = rel.vars[static_cast<std::size_t>(j)];
    const Request& req =
        instance.requests[static_cast<std::size_t>(key.request_index)];
    const ChargingOption& opt =
        req.options[static_cast<std::size_t>(key.option_index)];
    for (const int t : opt.slots) {
      cap_weight[static_cast<std::size_t>(t)] +=
          vars[static_cast<std::size_t>(j)].rate;
      occ_count[static_cast<std::size_t>(
                    vars[static_cast<std::size_t>(j)].station_index) *
                    T +
                t] += 1;
    }
    user_var_count[static_cast<std::size_t>(key.request_index)] += 1;
  }

  std::vector<int> cap_rows, occ_rows, user_rows;
  for (int t = 0; t < T; ++t)
    if (cap_weight[static_cast<std::size_t>(t)] >
        cap_rhs[static_cast<std::size_t>(t)] + kFeasTol)
      cap_rows.push_back(t);
  for (std::size_t ct = 0; ct < occ_rhs.size(); ++ct)
    if (static_cast<double>(occ_count[ct]) > occ_rhs[ct] + kFeasTol)
      occ_rows.push_back(static_cast<int>(ct));
  for (std::size_t r = 0; r < user_var_count.size(); ++r)
    if (user_var_count[r] >= 2) user_rows.push_back(static_cast<int>(r));

  const int m =
      static_cast<int>(cap_rows.size() + occ_rows.size() + user_rows.size());
  std::unordered_map<int, int> cap_row_of, occ_row_of, user_row_of;
  {
    int row = 0;
    for (const int t : cap_rows) cap_row_of[t] = row++;
    for (const int ct : occ_rows) occ_row_of[ct] = row++;
    for (const int r : user_rows) user_row_of[r] = row++;
  }

  LpProblem& lp = rel.lp;
  lp.A = Eigen::MatrixXd::Zero(m, n);
  lp.b = Eigen::VectorXd::Zero(m);
  lp.c = Eigen::VectorXd::Zero(n);
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Ones(n);
  for (const int t : cap_rows)
    lp.b(cap_row_of[t]) = cap_rhs[static_cast<std::size_t>(t)];
  for (const int ct : occ_rows)
    lp.b(occ_row_of[ct]) = occ_rhs[static_cast<std::size_t>(ct)];
  for (const int r : user_rows) lp.b(user_row_of[r]) = 1.0;

  for (int j = 0; j < n; ++j) {
    const VarKey& key = rel.vars[static_cast<std::size_t>(j)];
    lp.c(j) = gains[static_cast<std::size_t>(j)];
    const Request& req =
        instance.requests[static_cast<std::size_t>(key.request_index)];
    const ChargingOption& opt =
        req.options[static_cast<std::size_t>(key.option_index)];
    for (const int t : opt.slots) {
      if (const auto it = cap_row_of.find(t); it != cap_row_of.end())
        lp.A(it->second, j) = vars[static_cast<std::size_t>(j)].rate;
      if (const auto it = occ_row_of.find(
              vars[static_cast<std::size_t>(j)].station_index * T + t);
          it != occ_row_of.end())
        lp.A(it->second, j) = 1.0;
    }
    if (const auto it = user_row_of.find(key.request_index);
        it != user_row_of.end())
      lp.A(it->second, j) = 1.0;
  }
  return rel;
}

FractionalSolution solve_lp_relaxation(const Instance& instance,
                                       const std::vector<VarKey>& fixed,
                                       const std::vector<VarKey>& allowed,
                                       PivotRule rule) {
  const RelaxationLp rel = build_relaxation_lp(instance, fixed, allowed);

  FractionalSolution out;
  for (const VarKey& v : fixed) {
    const Request& req =
        instance.requests[static_cast<std::size_t>(v.request_index)];
    out.values[{req.user_id,
                req.options[static_cast<std::size_t>(v.option_index)].station}] =
        1.0;
  }
  if (rel.vars.empty()) {
    out.objective = rel.pinned_gain;
    return out;
  }

  SimplexOptions options;
  options.rule = rule;
  const SimplexResult result = lp::solve(rel.lp, options);
  if (result.status == SimplexStatus::Infeasible)
    throw solve_error("relaxation reported infeasible despite residual rhs");
  if (result.status == SimplexStatus::IterationLimit)
    throw solve_error("simplex hit its iteration limit");

  for (std::size_t j = 0; j < rel.vars.size(); ++j) {
    const VarKey& key = rel.vars[j];
    const Request& req =
        instance.requests[static_cast<std::size_t>(key.request_index)];
    out.values[{req.user_id,
                req.options[static_cast<std::size_t>(key.option_index)].station}] =
        std::clamp(result.x(static_cast<Eigen::Index>(j)), 0.0, 1.0);
  }
  out.objective = result.objective + rel.pinned_gain;
  return out;
}

Schedule floor_round(const FractionalSolution& fractional,
                     const Instance& instance) {
  std::unordered_map<int, const Request*> by_id;
  for (const Request& r : instance.requests) by_id.emplace(r.user_id, &r);

  Schedule schedule;
  std::unordered_map<int, double> kept_gain;
  for (const auto& [key, value] : fractional.values) {
    if (value < 1.0 - kRoundTol) continue;
    const auto [user_id, station_id] = key;
    const auto it = by_id.find(user_id);
    if (it == by_id.end()) continue;
    double gain = 0.0;
    for (const ChargingOption& o : it->second->options)
      if (o.station == station_id) {
        gain = conditional_gain(*it->second, o, instance);
        break;
      }
    const auto kept = kept_gain.find(user_id);
    if (kept != kept_gain.end() && kept->second >= gain) continue;
    kept_gain[user_id] = gain;
    schedule.assign(user_id, station_id);
  }
  return schedule;
}

namespace {

struct GuessSampler {
  const Instance& instance;
  // options with at least one entry, for sampling pins
  std::vector<int> requests_with_options;

  explicit GuessSampler(const Instance& ins) : instance(ins) {
    for (std::size_t r = 0; r < ins.requests.size(); ++r)
      if (!ins.requests[r].options.empty())
        requests_with_options.push_back(static_cast<int>(r));
  }

  // A jointly feasible set of pinned options, or empty on repeated failure.
  std::vector<VarKey> sample(int size, Rng& rng) const {
    if (size == 0 || requests_with_options.empty()) return {};
    const int pool = static_cast<int>(requests_with_options.size());
    const int want = std::min(size, pool);
    for (int attempt = 0; attempt < 50; ++attempt) {
      std::vector<int> picks(requests_with_options);
      // partial Fisher-Yates for the first `want` entries
      for (int k = 0; k < want; ++k) {
        const auto j =
            k + static_cast<int>(rng.bounded(
                    static_cast<std::uint64_t>(pool - k)));
        std::swap(picks[static_cast<std::size_t>(k)],
                  picks[static_cast<std::size_t>(j)]);
      }
      std::vector<VarKey> guess;
      LoadState state(instance);
      bool ok = true;
      for (int k = 0; k < want && ok; ++k) {
        const int r = picks[static_cast<std::size_t>(k)];
        const Request& req = instance.requests[static_cast<std::size_t>(r)];
        const int o = static_cast<int>(
            rng.bounded(static_cast<std::uint64_t>(req.options.size())));
        ok = try_assign(state, instance, req,
                        req.options[static_cast<std::size_t>(o)]);
        if (ok) guess.push_back({r, o});
      }
      if (ok) return guess;
    }
    return {};
  }
};

}  // namespace

Solution ptas_star(const Instance& instance, int num_guesses,
                   int max_guess_size, std::uint64_t seed) {
  if (num_guesses < 1)
    throw std::invalid_argument("num_guesses must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  const Rng root(seed);
  const GuessSampler sampler(instance);
  const std::vector<VarKey> every_var = all_option_vars(instance);

  // Per-option gains, reused by the threshold filter of each round.
  std::vector<std::vector<double>> gains(instance.requests.size());
  for (std::size_t r = 0; r < instance.requests.size(); ++r) {
    const Request& req = instance.requests[r];
    gains[r].resize(req.options.size());
    for (std::size_t o = 0; o < req.options.size(); ++o)
      gains[r][o] = conditional_gain(req, req.options[o], instance);
  }

  Schedule best;
  double best_objective = 0.0; // the empty schedule is always feasible

  for (int g = 0; g < num_guesses; ++g) {
    Rng rng = root.child(static_cast<std::uint64_t>(g));
    std::vector<VarKey> guess;
    if (g > 0) {
      const int size =
          static_cast<int>(rng.uniform_int(0, std::max(0, max_guess_size)));
      guess = sampler.sample(size, rng);
    }

    double min_gain = -std::numeric_limits<double>::infinity();
    if (!guess.empty()) {
      min_gain = std::numeric_limits<double>::infinity();
      for (const VarKey& v : guess)
        min_gain = std::min(
            min_gain, gains[static_cast<std::size_t>(v.request_index)]
                           [static_cast<std::size_t>(v.option_index)]);
    }

    std::vector<VarKey> allowed;
    allowed.reserve(every_var.size());
    for (const VarKey& v : every_var)
      if (gains[static_cast<std::size_t>(v.request_index)]
               [static_cast<std::size_t>(v.option_index)] >=
          min_gain - 1e-12)
        allowed.push_back(v);

    const FractionalSolution frac =
        solve_lp_relaxation(instance, guess, allowed);
    Schedule rounded = floor_round(frac, instance);
    const double objective = evaluate_objective(instance, rounded);
    if (objective > best_objective + 1e-12) {
      best_objective = objective;
      best = std::move(rounded);
    }
  }

  Solution solution;
  solution.schedule = std::move(best);
  solution.objective = best_objective;
  solution.method = "ptas-star";
  solution.optimal = false;
  solution.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return solution;
}

}  // namespace evcrp::lp
