#pragma once

#include <unordered_set>
#include <vector>

#include "evcrp/instance.hpp"

namespace evcrp {

// Welfare gain the user realizes if this option is accepted: utility minus
// the electricity cost over the option's slots.
double conditional_gain(const Request& request, const ChargingOption& option,
                        const Instance& instance);

// Largest conditional gain over a request's options (0 when it has none).
double max_conditional_gain(const Request& request, const Instance& instance);

// Sum of conditional gains of all assigned users; unassigned users add 0.
// Throws std::invalid_argument on dangling user or station ids.
double evaluate_objective(const Instance& instance, const Schedule& schedule);

enum class ConstraintKind { Capacity, SingleStation, Occupancy };

struct Violation {
  ConstraintKind kind = ConstraintKind::Capacity;
  int slot = -1;       // capacity / occupancy
  int station = -1;    // occupancy / single-station (station id)
  int user = -1;       // single-station
  double margin = 0.0; // amount by which the constraint is exceeded
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

// From-scratch check of the capacity, single-station and occupancy
// constraints. Malformed assignments (unknown user, station not among the
// user's options) are reported as single-station violations, not errors.
FeasibilityReport check_feasibility(const Instance& instance,
                                    const Schedule& schedule);

// Per-slot EV load and per-(station, slot) occupancy for a partial
// schedule. Confined to one worker at a time; everything else is
// immutable value data.
class LoadState {
 public:
  explicit LoadState(const Instance& instance);
  static LoadState from_schedule(const Instance& instance,
                                 const Schedule& schedule);

  const std::vector<double>& ev_load_kw() const { return ev_load_kw_; }
  int occupancy(int station_index, int slot) const {
    return occupancy_[static_cast<std::size_t>(station_index) * num_slots_ +
                      static_cast<std::size_t>(slot)];
  }
  bool is_assigned(int user_id) const { return assigned_.count(user_id) > 0; }
  std::size_t num_assigned() const { return assigned_.size(); }

  friend bool try_assign(LoadState&, const Instance&, const Request&,
                         const ChargingOption&);
  friend void unassign(LoadState&, const Instance&, const Request&,
                       const ChargingOption&);

 private:
  std::size_t num_slots_ = 0;
  std::vector<double> ev_load_kw_;
  std::vector<int> occupancy_;
  std::unordered_set<int> assigned_;
};

// Accepts the assignment iff capacity and occupancy stay satisfied at every
// slot of the option; on reject the state is untouched. Costs O(|slots|).
// Throws std::logic_error if the request is already assigned.
bool try_assign(LoadState& state, const Instance& instance,
                const Request& request, const ChargingOption& option);

// Reverses a previously accepted try_assign.
void unassign(LoadState& state, const Instance& instance,
              const Request& request, const ChargingOption& option);

}  // namespace evcrp
