#include "evcrp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "evcrp/feasibility.hpp"

namespace evcrp {

std::vector<int> Instance::stations_by_id() const {
  std::vector<int> order(stations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return stations[a].id < stations[b].id; });
  return order;
}

int slots_needed(double demand_kwh, double rate_kw, double slot_hours) {
  const double per_slot = rate_kw * slot_hours;
  const int n = static_cast<int>(std::ceil(demand_kwh / per_slot - 1e-9));
  return std::max(n, 1);
}

std::vector<std::string> instance_errors(const Instance& ins) {
  std::vector<std::string> errors;
  auto fail = [&](const std::string& msg) { errors.push_back(msg); };
  std::ostringstream os;

  const int T = ins.horizon.num_slots;
  if (T < 1) fail("horizon.num_slots must be >= 1");
  if (!(ins.horizon.slot_hours > 0.0)) fail("horizon.slot_hours must be > 0");
  if (!(ins.capacity_kw >= 0.0)) fail("capacity_kw must be >= 0");

  if (static_cast<int>(ins.base_load_kw.size()) != T)
    fail("base_load_kw must have exactly num_slots entries");
  if (static_cast<int>(ins.cost_per_kwh.size()) != T)
    fail("cost_per_kwh must have exactly num_slots entries");

  const double cap_tol = 1e-9 * std::max(1.0, ins.capacity_kw);
  for (std::size_t t = 0; t < ins.base_load_kw.size(); ++t) {
    const double d = ins.base_load_kw[t];
    if (!(d >= 0.0) || d > ins.capacity_kw + cap_tol) {
      os.str("");
      os << "base_load_kw[" << t << "]=" << d << " outside [0, capacity]";
      fail(os.str());
      break;
    }
  }
  for (std::size_t t = 0; t < ins.cost_per_kwh.size(); ++t) {
    if (!(ins.cost_per_kwh[t] >= 0.0)) {
      os.str("");
      os << "cost_per_kwh[" << t << "] must be >= 0";
      fail(os.str());
      break;
    }
  }

  std::set<int> station_ids;
  for (const Station& s : ins.stations) {
    if (!(s.rate_kw > 0.0)) {
      os.str("");
      os << "station " << s.id << ": rate_kw must be > 0";
      fail(os.str());
    }
    if (s.num_evse < 0) {
      os.str("");
      os << "station " << s.id << ": num_evse must be >= 0";
      fail(os.str());
    }
    if (!station_ids.insert(s.id).second) {
      os.str("");
      os << "duplicate station id " << s.id;
      fail(os.str());
    }
  }

  const bool profiles_ok = errors.empty();
  std::set<int> user_ids;
  for (const Request& r : ins.requests) {
    if (!user_ids.insert(r.user_id).second) {
      os.str("");
      os << "duplicate user_id " << r.user_id;
      fail(os.str());
      continue;
    }
    if (!(r.utility >= 0.0)) {
      os.str("");
      os << "user " << r.user_id << ": utility must be >= 0";
      fail(os.str());
    }
    if (!(r.demand_kwh > 0.0)) {
      os.str("");
      os << "user " << r.user_id << ": demand_kwh must be > 0";
      fail(os.str());
      continue;
    }
    std::set<int> opt_stations;
    for (const ChargingOption& o : r.options) {
      const Station* st = ins.find_station(o.station);
      if (st == nullptr) {
        os.str("");
        os << "user " << r.user_id << ": option references unknown station "
           << o.station;
        fail(os.str());
        continue;
      }
      if (!opt_stations.insert(o.station).second) {
        os.str("");
        os << "user " << r.user_id << ": more than one option at station "
           << o.station;
        fail(os.str());
      }
      if (o.slots.empty()) {
        os.str("");
        os << "user " << r.user_id << ": option at station " << o.station
           << " has no slots";
        fail(os.str());
        continue;
      }
      bool slots_ok = true;
      for (std::size_t k = 0; k < o.slots.size(); ++k) {
        if (o.slots[k] < 0 || o.slots[k] >= T) slots_ok = false;
        if (k > 0 && o.slots[k] <= o.slots[k - 1]) slots_ok = false;
      }
      if (!slots_ok) {
        os.str("");
        os << "user " << r.user_id << ": option at station " << o.station
           << " has slot indices not sorted/unique/in range";
        fail(os.str());
        continue;
      }
      if (!(st->rate_kw > 0.0)) continue;
      const int expected =
          slots_needed(r.demand_kwh, st->rate_kw, ins.horizon.slot_hours);
      if (static_cast<int>(o.slots.size()) != expected) {
        os.str("");
        os << "user " << r.user_id << ": option at station " << o.station
           << " occupies " << o.slots.size() << " slots, demand needs "
           << expected;
        fail(os.str());
      }
      if (profiles_ok) {
        const double g = conditional_gain(r, o, ins);
        if (g < -1e-9 * std::max(1.0, r.utility)) {
          os.str("");
          os << "user " << r.user_id << ": option at station " << o.station
             << " has negative conditional gain " << g;
          fail(os.str());
        }
      }
    }
  }
  return errors;
}

void validate_instance(const Instance& instance) {
  const auto errors = instance_errors(instance);
  if (errors.empty()) return;
  std::ostringstream os;
  os << "invalid instance:";
  const std::size_t shown = std::min<std::size_t>(errors.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) os << "\n  " << errors[i];
  if (errors.size() > shown)
    os << "\n  ... and " << (errors.size() - shown) << " more";
  throw std::invalid_argument(os.str());
}

}  // namespace evcrp
