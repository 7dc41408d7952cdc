#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace evcrp {

struct Horizon {
  int num_slots = 96;       // T
  double slot_hours = 0.25; // h
  double hours() const { return num_slots * slot_hours; }
};

struct Station {
  int id = 0;
  double rate_kw = 0.0; // r_c
  int num_evse = 0;     // N_c
};

// One admissible way of serving a request: a station plus the slots the
// charge would occupy there. Slots are sorted, unique and < num_slots.
struct ChargingOption {
  int station = 0;
  std::vector<int> slots;
};

struct Request {
  int user_id = 0;
  double utility = 0.0;    // u^a
  double demand_kwh = 0.0; // P^a
  std::vector<ChargingOption> options; // at most one per station
};

// Whether the per-slot electricity cost multiplies delivered energy (the
// default) or is charged once per occupied slot.
enum class CostMode { PerKwh, PerSlot };

struct Instance {
  Horizon horizon;
  double capacity_kw = 0.0;          // network cap, shared by all slots
  std::vector<double> base_load_kw;  // d(t), length num_slots
  std::vector<double> cost_per_kwh;  // cost(t), length num_slots
  std::vector<Station> stations;
  std::vector<Request> requests;
  CostMode cost_mode = CostMode::PerKwh;

  int num_slots() const { return horizon.num_slots; }

  // Index into stations, or -1 when the id is unknown.
  int station_index(int station_id) const {
    for (std::size_t i = 0; i < stations.size(); ++i)
      if (stations[i].id == station_id) return static_cast<int>(i);
    return -1;
  }

  const Station* find_station(int station_id) const {
    const int i = station_index(station_id);
    return i < 0 ? nullptr : &stations[i];
  }

  // Station indices sorted by station id; the canonical station order used
  // by the codec and the post-processing sweep.
  std::vector<int> stations_by_id() const;
};

// Accepted users mapped to the station they charge at. Absent users are
// unassigned; at most one station per user holds by construction.
struct Schedule {
  std::map<int, int> assignment; // user_id -> station id

  std::optional<int> station_of(int user_id) const {
    const auto it = assignment.find(user_id);
    if (it == assignment.end()) return std::nullopt;
    return it->second;
  }
  void assign(int user_id, int station_id) { assignment[user_id] = station_id; }
  void unassign(int user_id) { assignment.erase(user_id); }
  std::size_t size() const { return assignment.size(); }
  bool empty() const { return assignment.empty(); }
  bool operator==(const Schedule&) const = default;
};

// Number of slots an option needs to deliver demand_kwh at rate_kw; the
// last slot may overdeliver by less than one slot's energy.
int slots_needed(double demand_kwh, double rate_kw, double slot_hours);

// All violated instance invariants, as human-readable messages.
std::vector<std::string> instance_errors(const Instance& instance);

// Throws std::invalid_argument listing the first few violations.
void validate_instance(const Instance& instance);

}  // namespace evcrp
