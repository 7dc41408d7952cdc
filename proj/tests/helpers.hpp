#pragma once

#include <vector>

#include "evcrp/feasibility.hpp"
#include "evcrp/gen.hpp"
#include "evcrp/instance.hpp"
#include "evcrp/rng.hpp"

namespace evcrp::testing {

// Blank instance: flat cost profile, zero base load.
inline Instance blank_instance(int num_slots, double slot_hours,
                               double capacity_kw,
                               std::vector<Station> stations,
                               double flat_cost = 0.0) {
  Instance ins;
  ins.horizon = {num_slots, slot_hours};
  ins.capacity_kw = capacity_kw;
  ins.base_load_kw.assign(static_cast<std::size_t>(num_slots), 0.0);
  ins.cost_per_kwh.assign(static_cast<std::size_t>(num_slots), flat_cost);
  ins.stations = std::move(stations);
  return ins;
}

// Request with one contiguous option per station id, starting at `arrival`,
// sized so the delivered energy covers the demand.
inline Request make_request(const Instance& ins, int user_id, double utility,
                            double demand_kwh, int arrival,
                            const std::vector<int>& station_ids) {
  Request r;
  r.user_id = user_id;
  r.utility = utility;
  r.demand_kwh = demand_kwh;
  for (const int sid : station_ids) {
    const Station* st = ins.find_station(sid);
    const int n = slots_needed(demand_kwh, st->rate_kw, ins.horizon.slot_hours);
    ChargingOption o;
    o.station = sid;
    for (int k = 0; k < n; ++k) o.slots.push_back(arrival + k);
    r.options.push_back(std::move(o));
  }
  return r;
}

// Randomized generator parameters for property sweeps. Small user counts,
// varied horizons, occupancy limits that sometimes bind.
inline gen::GenParams random_gen_params(Rng& rng, int max_users = 20) {
  gen::GenParams p;
  p.num_users = static_cast<int>(rng.uniform_int(1, max_users));
  const int horizon_pick = static_cast<int>(rng.uniform_int(0, 2));
  if (horizon_pick == 0)
    p.horizon = {24, 1.0};
  else if (horizon_pick == 1)
    p.horizon = {48, 0.5};
  else
    p.horizon = {96, 0.25};
  p.capacity_kw = rng.uniform(700.0, 1100.0);
  p.load_profile = static_cast<int>(rng.uniform_int(1, 3));
  p.utility_mode = rng.uniform() < 0.5 ? gen::UtilityMode::Linear
                                       : gen::UtilityMode::Random;
  p.stations.clear();
  const double rates[] = {1.5, 7.0, 50.0};
  const int num_stations = static_cast<int>(rng.uniform_int(1, 3));
  for (int c = 0; c < num_stations; ++c) {
    const int evse_pick = static_cast<int>(rng.uniform_int(0, 3));
    const int evse = evse_pick == 0   ? 1
                     : evse_pick == 1 ? 2
                     : evse_pick == 2 ? 5
                                      : 200;
    p.stations.push_back({c, rates[c], evse});
  }
  p.seed = rng.next_u64();
  return p;
}

inline Instance random_instance(Rng& rng, int max_users = 20) {
  return gen::generate_synthetic(random_gen_params(rng, max_users));
}

}  // namespace evcrp::testing
