#pragma once

#include <string>

#include "evcrp/instance.hpp"

namespace evcrp {

// Result of any solve path. objective always equals
// evaluate_objective(instance, schedule) and the schedule is feasible.
struct Solution {
  Schedule schedule;
  double objective = 0.0;
  double wall_time_s = 0.0;
  std::string method;
  bool optimal = false;
};

}  // namespace evcrp
