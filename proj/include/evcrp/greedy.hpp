#pragma once

#include "evcrp/instance.hpp"
#include "evcrp/solution.hpp"

namespace evcrp::greedy {

// Gain-greedy baseline: users in descending order of their best option's
// conditional gain (ties by user id), each taking the first of their
// options, tried by descending gain, that fits. O(|A| log |A|) for the
// sort plus O(|A| * |C| * |T|) for the sweep.
Solution greedy_u(const Instance& instance);

}  // namespace evcrp::greedy
