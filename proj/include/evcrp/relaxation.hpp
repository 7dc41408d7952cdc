#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "evcrp/instance.hpp"
#include "evcrp/simplex.hpp"
#include "evcrp/solution.hpp"

namespace evcrp::lp {

// A (request, option) pair addressed by position in the instance.
struct VarKey {
  int request_index = 0;
  int option_index = 0;
  bool operator==(const VarKey&) const = default;
};

struct FractionalSolution {
  // (user_id, station_id) -> fraction in [0, 1]; pinned pairs appear as 1.
  std::map<std::pair<int, int>, double> values;
  double objective = 0.0;
};

// Continuous relaxation of the assignment problem: maximize the summed
// per-option gains subject to capacity, one-station-per-user and occupancy
// rows with x in [0, 1]. `fixed` pins options at 1 (their users get no
// other variables); `allowed` restricts which variables exist. Rows that
// cannot bind are dropped before the simplex runs.
// Throws evcrp::solve_error when the pins alone violate a constraint.
FractionalSolution solve_lp_relaxation(const Instance& instance,
                                       const std::vector<VarKey>& fixed,
                                       const std::vector<VarKey>& allowed,
                                       PivotRule rule = PivotRule::Bland);

// All options, nothing pinned.
FractionalSolution solve_lp_relaxation(const Instance& instance,
                                       PivotRule rule = PivotRule::Bland);

// The raw LP behind the relaxation, for callers that need simplex-level
// artifacts (reduced costs for variable fixing, certificates). vars[j]
// names the (request, option) pair of column j; pinned_gain is the
// objective contribution of the fixed assignments, which have no columns.
struct RelaxationLp {
  LpProblem lp;
  std::vector<VarKey> vars;
  double pinned_gain = 0.0;
};

RelaxationLp build_relaxation_lp(const Instance& instance,
                                 const std::vector<VarKey>& fixed,
                                 const std::vector<VarKey>& allowed);

// Every (request, option) pair of the instance.
std::vector<VarKey> all_option_vars(const Instance& instance);

// Keeps a variable iff its fraction is within 1e-7 of 1; a user with two
// near-1 values keeps the higher-gain one. Never produces an infeasible
// schedule from a feasible fractional input.
Schedule floor_round(const FractionalSolution& fractional,
                     const Instance& instance);

// Randomized-guess variant of the approximation scheme: each round pins a
// small feasible set of options, filters the remaining options to gains at
// least the smallest pinned gain, solves the relaxation and floor-rounds.
// The empty guess is always round 0, so the result is never worse than
// plain LP rounding. Deterministic per (instance, seed).
Solution ptas_star(const Instance& instance, int num_guesses = 250,
                   int max_guess_size = 3, std::uint64_t seed = 0);

}  // namespace evcrp::lp
