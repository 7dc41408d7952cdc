#include "evcrp/postproc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <vector>

#include "evcrp/errors.hpp"
#include "evcrp/feasibility.hpp"

namespace evcrp::postproc {

Solution extract_solution(const Instance& instance,
                          const Eigen::VectorXd& y_hat,
                          const codec::CodecParams& params,
                          const PostprocParams& postproc,
                          ExtractStats* stats) {
  const auto start = std::chrono::steady_clock::now();

  const codec::GroupIndex index = codec::build_group_index(instance, params);
  const int num_cells = index.num_cells();
  if (static_cast<int>(y_hat.size()) != num_cells) {
    std::ostringstream os;
    os << "prediction has " << y_hat.size() << " entries, the instance codec "
       << "has " << num_cells << " cells";
    throw codec_mismatch_error(os.str());
  }

  ExtractStats local_stats;

  // Bucket (request, option) pairs per output cell.
  std::vector<std::vector<const codec::GroupEntry*>> members(
      static_cast<std::size_t>(num_cells));
  for (const codec::GroupEntry& e : index.entries)
    members[static_cast<std::size_t>(index.cell_of(e))].push_back(&e);

  for (auto& cell : members) {
    std::sort(cell.begin(), cell.end(),
              [&](const codec::GroupEntry* a, const codec::GroupEntry* b) {
                const Request& ra =
                    instance.requests[static_cast<std::size_t>(
                        a->request_index)];
                const Request& rb =
                    instance.requests[static_cast<std::size_t>(
                        b->request_index)];
                const double ka = postproc.sort == SortKey::Gain
                                      ? a->gain
                                      : ra.utility;
                const double kb = postproc.sort == SortKey::Gain
                                      ? b->gain
                                      : rb.utility;
                if (ka != kb) return ka > kb;
                return ra.user_id < rb.user_id;
              });
  }

  Solution solution;
  solution.method = "dclevernet";
  LoadState state(instance);
  for (int cell = 0; cell < num_cells; ++cell) {
    const auto& candidates = members[static_cast<std::size_t>(cell)];
    double raw = y_hat(cell);
    if (std::isnan(raw)) {
      ++local_stats.nan_clamped;
      raw = 0.0;
    } else if (raw < 0.0) {
      ++local_stats.negative_clamped;
      raw = 0.0;
    }
    std::size_t budget = candidates.size();
    if (raw < static_cast<double>(candidates.size()))
      budget = static_cast<std::size_t>(std::floor(raw));

    for (const codec::GroupEntry* e : candidates) {
      if (budget == 0) break;
      const Request& req =
          instance.requests[static_cast<std::size_t>(e->request_index)];
      if (state.is_assigned(req.user_id)) continue; // admitted elsewhere
      const ChargingOption& opt =
          req.options[static_cast<std::size_t>(e->option_index)];
      if (!try_assign(state, instance, req, opt)) continue;
      solution.schedule.assign(req.user_id, opt.station);
      --budget;
    }
  }

  solution.objective = evaluate_objective(instance, solution.schedule);
  solution.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (stats != nullptr) *stats = local_stats;
  return solution;
}

}  // namespace evcrp::postproc
