#pragma once

#include <cstdint>
#include <limits>

#include "evcrp/instance.hpp"
#include "evcrp/solution.hpp"

namespace evcrp::oracle {

struct SearchLimits {
  double time_budget_s = std::numeric_limits<double>::infinity();
  std::int64_t node_budget = std::numeric_limits<std::int64_t>::max();
  double gap_tolerance = 0.0; // relative; 0 proves optimality
  bool use_lp_bound = true;
  int lp_bound_max_depth = 3; // relaxation bounds near the root only
};

// Full enumeration over per-user choices with feasibility filtering; the
// test oracle for small instances. Requires prod(|options| + 1) <= 1e7 and
// throws std::invalid_argument beyond that.
Solution enumerate_exhaustive(const Instance& instance);

// Depth-first branch and bound over per-user option choices. Node bounds
// are the partial objective plus either the LP-relaxation value of the
// residual problem or, deeper in the tree and when LP bounding is off, the
// sum of remaining best gains. Budget exhaustion degrades the optimal
// flag, never correctness of the returned schedule.
Solution solve_exact(const Instance& instance, const SearchLimits& limits = {});

}  // namespace evcrp::oracle
