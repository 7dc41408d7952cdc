#include "evcrp/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace evcrp {

namespace {

double capacity_tolerance(const Instance& ins) {
  return 1e-9 * std::max(1.0, ins.capacity_kw);
}

const ChargingOption* option_at_station(const Request& request,
                                        int station_id) {
  for (const ChargingOption& o : request.options)
    if (o.station == station_id) return &o;
  return nullptr;
}

std::unordered_map<int, const Request*> request_index(const Instance& ins) {
  std::unordered_map<int, const Request*> by_id;
  by_id.reserve(ins.requests.size());
  for (const Request& r : ins.requests) by_id.emplace(r.user_id, &r);
  return by_id;
}

}  // namespace

double conditional_gain(const Request& request, const ChargingOption& option,
                        const Instance& instance) {
  const ChargingOption* owned = option_at_station(request, option.station);
  if (owned == nullptr || owned->slots != option.slots) {
    std::ostringstream os;
    os << "option at station " << option.station << " not owned by user "
       << request.user_id;
    throw std::invalid_argument(os.str());
  }
  const Station* st = instance.find_station(option.station);
  if (st == nullptr) {
    std::ostringstream os;
    os << "unknown station " << option.station;
    throw std::invalid_argument(os.str());
  }
  const double per_slot_energy =
      instance.cost_mode == CostMode::PerKwh
          ? st->rate_kw * instance.horizon.slot_hours
          : 1.0;
  double cost = 0.0;
  for (const int t : option.slots) cost += instance.cost_per_kwh[t];
  return request.utility - cost * per_slot_energy;
}

double max_conditional_gain(const Request& request, const Instance& instance) {
  double best = 0.0;
  bool any = false;
  for (const ChargingOption& o : request.options) {
    const double g = conditional_gain(request, o, instance);
    if (!any || g > best) best = g;
    any = true;
  }
  return any ? best : 0.0;
}

double evaluate_objective(const Instance& instance, const Schedule& schedule) {
  double total = 0.0;
  const auto by_id = request_index(instance);
  for (const auto& [user_id, station_id] : schedule.assignment) {
    const auto it = by_id.find(user_id);
    const Request* req = it == by_id.end() ? nullptr : it->second;
    if (req == nullptr) {
      std::ostringstream os;
      os << "schedule references unknown user " << user_id;
      throw std::invalid_argument(os.str());
    }
    const ChargingOption* opt = option_at_station(*req, station_id);
    if (opt == nullptr) {
      std::ostringstream os;
      os << "user " << user_id << " assigned to station " << station_id
         << " which is not among their options";
      throw std::invalid_argument(os.str());
    }
    total += conditional_gain(*req, *opt, instance);
  }
  return total;
}

FeasibilityReport check_feasibility(const Instance& instance,
                                    const Schedule& schedule) {
  FeasibilityReport report;
  const int T = instance.num_slots();
  const std::size_t C = instance.stations.size();
  std::vector<double> ev_load(static_cast<std::size_t>(T), 0.0);
  std::vector<int> occupancy(C * static_cast<std::size_t>(T), 0);

  const auto by_id = request_index(instance);
  for (const auto& [user_id, station_id] : schedule.assignment) {
    const auto it = by_id.find(user_id);
    const Request* req = it == by_id.end() ? nullptr : it->second;
    const ChargingOption* opt =
        req ? option_at_station(*req, station_id) : nullptr;
    const int c = instance.station_index(station_id);
    if (req == nullptr || opt == nullptr || c < 0) {
      report.violations.push_back({ConstraintKind::SingleStation, -1,
                                   station_id, user_id, 1.0});
      continue;
    }
    const double rate = instance.stations[static_cast<std::size_t>(c)].rate_kw;
    for (const int t : opt->slots) {
      ev_load[static_cast<std::size_t>(t)] += rate;
      occupancy[static_cast<std::size_t>(c) * T + t] += 1;
    }
  }

  const double tol = capacity_tolerance(instance);
  for (int t = 0; t < T; ++t) {
    const double total =
        instance.base_load_kw[static_cast<std::size_t>(t)] +
        ev_load[static_cast<std::size_t>(t)];
    if (total > instance.capacity_kw + tol)
      report.violations.push_back({ConstraintKind::Capacity, t, -1, -1,
                                   total - instance.capacity_kw});
  }
  for (std::size_t c = 0; c < C; ++c) {
    for (int t = 0; t < T; ++t) {
      const int occ = occupancy[c * T + t];
      if (occ > instance.stations[c].num_evse)
        report.violations.push_back(
            {ConstraintKind::Occupancy, t, instance.stations[c].id, -1,
             static_cast<double>(occ - instance.stations[c].num_evse)});
    }
  }

  report.feasible = report.violations.empty();
  return report;
}

LoadState::LoadState(const Instance& instance)
    : num_slots_(static_cast<std::size_t>(instance.num_slots())),
      ev_load_kw_(num_slots_, 0.0),
      occupancy_(instance.stations.size() * num_slots_, 0) {}

LoadState LoadState::from_schedule(const Instance& instance,
                                   const Schedule& schedule) {
  LoadState state(instance);
  const auto by_id = request_index(instance);
  for (const auto& [user_id, station_id] : schedule.assignment) {
    const auto it = by_id.find(user_id);
    if (it == by_id.end()) continue;
    const ChargingOption* opt = option_at_station(*it->second, station_id);
    if (opt == nullptr) continue;
    const int c = instance.station_index(station_id);
    const double rate = instance.stations[static_cast<std::size_t>(c)].rate_kw;
    for (const int t : opt->slots) {
      state.ev_load_kw_[static_cast<std::size_t>(t)] += rate;
      state.occupancy_[static_cast<std::size_t>(c) * state.num_slots_ + t] += 1;
    }
    state.assigned_.insert(user_id);
  }
  return state;
}

bool try_assign(LoadState& state, const Instance& instance,
                const Request& request, const ChargingOption& option) {
  if (state.is_assigned(request.user_id)) {
    std::ostringstream os;
    os << "user " << request.user_id << " is already assigned";
    throw std::logic_error(os.str());
  }
  const int c = instance.station_index(option.station);
  if (c < 0) return false;
  const Station& st = instance.stations[static_cast<std::size_t>(c)];
  const double tol = capacity_tolerance(instance);
  for (const int t : option.slots) {
    const std::size_t ts = static_cast<std::size_t>(t);
    if (instance.base_load_kw[ts] + state.ev_load_kw_[ts] + st.rate_kw >
        instance.capacity_kw + tol)
      return false;
    if (state.occupancy_[static_cast<std::size_t>(c) * state.num_slots_ + ts] +
            1 >
        st.num_evse)
      return false;
  }
  for (const int t : option.slots) {
    state.ev_load_kw_[static_cast<std::size_t>(t)] += st.rate_kw;
    state.occupancy_[static_cast<std::size_t>(c) * state.num_slots_ + t] += 1;
  }
  state.assigned_.insert(request.user_id);
  return true;
}

void unassign(LoadState& state, const Instance& instance,
              const Request& request, const ChargingOption& option) {
  if (!state.is_assigned(request.user_id))
    throw std::logic_error("unassign of a user that is not assigned");
  const int c = instance.station_index(option.station);
  const Station& st = instance.stations[static_cast<std::size_t>(c)];
  for (const int t : option.slots) {
    state.ev_load_kw_[static_cast<std::size_t>(t)] -= st.rate_kw;
    state.occupancy_[static_cast<std::size_t>(c) * state.num_slots_ + t] -= 1;
  }
  state.assigned_.erase(request.user_id);
}

}  // namespace evcrp
