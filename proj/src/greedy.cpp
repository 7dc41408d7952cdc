#include "evcrp/greedy.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include "evcrp/feasibility.hpp"

namespace evcrp::greedy {

namespace {

struct RankedRequest {
  int request_index;
  double max_gain;
  std::vector<int> option_order; // descending gain, ties by station id
  std::vector<double> gains;
};

}  // namespace

Solution greedy_u(const Instance& instance) {
  const auto start = std::chrono::steady_clock::now();

  std::vector<RankedRequest> ranked;
  ranked.reserve(instance.requests.size());
  for (std::size_t r = 0; r < instance.requests.size(); ++r) {
    const Request& req = instance.requests[r];
    RankedRequest item;
    item.request_index = static_cast<int>(r);
    item.gains.resize(req.options.size());
    item.option_order.resize(req.options.size());
    for (std::size_t o = 0; o < req.options.size(); ++o) {
      item.gains[o] = conditional_gain(req, req.options[o], instance);
      item.option_order[o] = static_cast<int>(o);
    }
    std::sort(item.option_order.begin(), item.option_order.end(),
              [&](int a, int b) {
                const double ga = item.gains[static_cast<std::size_t>(a)];
                const double gb = item.gains[static_cast<std::size_t>(b)];
                if (ga != gb) return ga > gb;
                return req.options[static_cast<std::size_t>(a)].station <
                       req.options[static_cast<std::size_t>(b)].station;
              });
    item.max_gain = item.option_order.empty()
                        ? 0.0
                        : item.gains[static_cast<std::size_t>(
                              item.option_order.front())];
    ranked.push_back(std::move(item));
  }
  std::sort(ranked.begin(), ranked.end(),
            [&](const RankedRequest& a, const RankedRequest& b) {
              if (a.max_gain != b.max_gain) return a.max_gain > b.max_gain;
              return instance.requests[static_cast<std::size_t>(
                         a.request_index)].user_id <
                     instance.requests[static_cast<std::size_t>(
                         b.request_index)].user_id;
            });

  Solution solution;
  solution.method = "greedy-u";
  LoadState state(instance);
  for (const RankedRequest& item : ranked) {
    const Request& req =
        instance.requests[static_cast<std::size_t>(item.request_index)];
    for (const int o : item.option_order) {
      const ChargingOption& opt = req.options[static_cast<std::size_t>(o)];
      if (try_assign(state, instance, req, opt)) {
        solution.schedule.assign(req.user_id, opt.station);
        break;
      }
    }
  }
  solution.objective = evaluate_objective(instance, solution.schedule);
  solution.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return solution;
}

}  // namespace evcrp::greedy
