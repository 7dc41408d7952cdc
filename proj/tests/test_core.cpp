#include <doctest.h>

#include <cmath>

#include "evcrp/errors.hpp"
#include "evcrp/feasibility.hpp"
#include "evcrp/instance.hpp"
#include "evcrp/json_io.hpp"
#include "evcrp/rng.hpp"
#include "helpers.hpp"

using namespace evcrp;
using evcrp::testing::blank_instance;
using evcrp::testing::make_request;
using evcrp::testing::random_instance;

TEST_SUITE_BEGIN("core");

TEST_CASE("conditional gain with a zero cost profile equals the utility") {
  Instance ins = blank_instance(8, 1.0, 100.0, {{0, 5.0, 2}});
  ins.requests.push_back(make_request(ins, 0, 7.5, 10.0, 1, {0}));
  CHECK(conditional_gain(ins.requests[0], ins.requests[0].options[0], ins) ==
        doctest::Approx(7.5));
}

TEST_CASE("per-kwh gain: linear utility 4.32 minus flat 0.10 cost on 12 kWh") {
  // 1.5 kW for 8 one-hour slots delivers exactly 12 kWh.
  Instance ins = blank_instance(24, 1.0, 100.0, {{0, 1.5, 5}}, 0.10);
  const double demand = 12.0;
  const double utility = 0.36 * demand; // 4.32
  ins.requests.push_back(make_request(ins, 0, utility, demand, 2, {0}));
  REQUIRE(ins.requests[0].options[0].slots.size() == 8);
  const double gain =
      conditional_gain(ins.requests[0], ins.requests[0].options[0], ins);
  CHECK(gain == doctest::Approx(4.32 - 12.0 * 0.10)); // 3.12
}

TEST_CASE("per-slot mode reproduces the rate-free cost sum") {
  Instance ins = blank_instance(24, 1.0, 100.0, {{0, 1.5, 5}}, 0.10);
  ins.cost_mode = CostMode::PerSlot;
  ins.requests.push_back(make_request(ins, 0, 4.32, 12.0, 2, {0}));
  const double gain =
      conditional_gain(ins.requests[0], ins.requests[0].options[0], ins);
  CHECK(gain == doctest::Approx(4.32 - 8 * 0.10));
}

TEST_CASE("equal delivered energy gives equal gains across rates") {
  // Rates 1.5 and 6 at 15-minute slots both deliver exactly 12 kWh
  // (32 and 8 slots), so a flat tariff prices them identically.
  Instance ins = blank_instance(96, 0.25, 100.0, {{0, 1.5, 5}, {1, 6.0, 5}},
                                0.07);
  ins.requests.push_back(make_request(ins, 0, 9.0, 12.0, 10, {0, 1}));
  const Request& r = ins.requests[0];
  REQUIRE(r.options[0].slots.size() == 32);
  REQUIRE(r.options[1].slots.size() == 8);
  CHECK(conditional_gain(r, r.options[0], ins) ==
        doctest::Approx(conditional_gain(r, r.options[1], ins)));
}

TEST_CASE("gain rejects an option the request does not own") {
  Instance ins = blank_instance(8, 1.0, 100.0, {{0, 5.0, 2}, {1, 4.0, 2}});
  ins.requests.push_back(make_request(ins, 0, 5.0, 10.0, 1, {0}));
  ins.requests.push_back(make_request(ins, 1, 5.0, 8.0, 1, {1}));
  CHECK_THROWS_AS(conditional_gain(ins.requests[0], ins.requests[1].options[0],
                                   ins),
                  std::invalid_argument);
}

TEST_CASE("objective: empty schedule scores zero, single user scores its gain") {
  Instance ins = blank_instance(8, 1.0, 100.0, {{0, 5.0, 2}}, 0.02);
  ins.requests.push_back(make_request(ins, 0, 5.0, 10.0, 1, {0}));
  CHECK(evaluate_objective(ins, Schedule{}) == 0.0);
  Schedule s;
  s.assign(0, 0);
  CHECK(evaluate_objective(ins, s) ==
        doctest::Approx(
            conditional_gain(ins.requests[0], ins.requests[0].options[0], ins)));
}

TEST_CASE("objective on five users matches an independent term-by-term sum") {
  Instance ins = blank_instance(24, 0.5, 500.0, {{0, 4.0, 10}, {1, 8.0, 10}});
  for (int t = 0; t < 24; ++t)
    ins.cost_per_kwh[static_cast<std::size_t>(t)] = 0.01 * (t % 5);
  const double demands[5] = {6.0, 4.0, 8.0, 2.0, 10.0};
  for (int u = 0; u < 5; ++u)
    ins.requests.push_back(
        make_request(ins, u, 10.0 + u, demands[u], u, {0, 1}));
  Schedule s;
  s.assign(0, 0);
  s.assign(1, 1);
  s.assign(2, 0);
  s.assign(4, 1); // user 3 stays unassigned

  // independent arithmetic: utility minus sum of slot costs times per-slot
  // energy, straight from the instance data
  double expected = 0.0;
  for (const auto& [user, station] : s.assignment) {
    const Request& r = ins.requests[static_cast<std::size_t>(user)];
    const Station* st = ins.find_station(station);
    for (const ChargingOption& o : r.options) {
      if (o.station != station) continue;
      double cost = 0.0;
      for (const int t : o.slots)
        cost += ins.cost_per_kwh[static_cast<std::size_t>(t)] * st->rate_kw *
                ins.horizon.slot_hours;
      expected += r.utility - cost;
    }
  }
  CHECK(evaluate_objective(ins, s) == doctest::Approx(expected));
}

TEST_CASE("objective throws on dangling ids") {
  Instance ins = blank_instance(8, 1.0, 100.0, {{0, 5.0, 2}});
  ins.requests.push_back(make_request(ins, 0, 5.0, 10.0, 1, {0}));
  Schedule unknown_user;
  unknown_user.assign(42, 0);
  CHECK_THROWS_AS(evaluate_objective(ins, unknown_user), std::invalid_argument);
  Schedule wrong_station;
  wrong_station.assign(0, 9);
  CHECK_THROWS_AS(evaluate_objective(ins, wrong_station),
                  std::invalid_argument);
}

TEST_CASE("feasibility: empty schedule is feasible when base load fits") {
  Instance ins = blank_instance(8, 1.0, 100.0, {{0, 5.0, 2}});
  const auto report = check_feasibility(ins, Schedule{});
  CHECK(report.feasible);
  CHECK(report.violations.empty());
}

TEST_CASE("feasibility flags a capacity violation with margin 50") {
  Instance ins = blank_instance(4, 1.0, 200.0, {{0, 50.0, 2}});
  ins.base_load_kw.assign(4, 200.0); // base load pinned at capacity
  ins.requests.push_back(make_request(ins, 0, 100.0, 50.0, 1, {0}));
  Schedule s;
  s.assign(0, 0);
  const auto report = check_feasibility(ins, s);
  REQUIRE_FALSE(report.feasible);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == ConstraintKind::Capacity);
  CHECK(report.violations[0].slot == 1);
  CHECK(report.violations[0].margin == doctest::Approx(50.0));
}

TEST_CASE("feasibility flags occupancy when two users share a single EVSE") {
  Instance ins = blank_instance(4, 1.0, 1000.0, {{0, 10.0, 1}});
  ins.requests.push_back(make_request(ins, 0, 50.0, 10.0, 1, {0}));
  ins.requests.push_back(make_request(ins, 1, 50.0, 10.0, 1, {0}));
  Schedule s;
  s.assign(0, 0);
  s.assign(1, 0);
  const auto report = check_feasibility(ins, s);
  REQUIRE_FALSE(report.feasible);
  CHECK(report.violations[0].kind == ConstraintKind::Occupancy);
  CHECK(report.violations[0].station == 0);
  CHECK(report.violations[0].margin == doctest::Approx(1.0));
}

TEST_CASE("feasibility reports malformed assignments as violations") {
  Instance ins = blank_instance(4, 1.0, 1000.0, {{0, 10.0, 1}});
  ins.requests.push_back(make_request(ins, 0, 50.0, 10.0, 1, {0}));
  Schedule s;
  s.assign(7, 0); // unknown user
  const auto report = check_feasibility(ins, s);
  REQUIRE_FALSE(report.feasible);
  CHECK(report.violations[0].kind == ConstraintKind::SingleStation);
  CHECK(report.violations[0].user == 7);
}

TEST_CASE("try_assign accepts within capacity and rejects beyond it") {
  Instance ins = blank_instance(4, 1.0, 60.0, {{0, 50.0, 2}, {1, 25.0, 2}});
  ins.requests.push_back(make_request(ins, 0, 100.0, 50.0, 1, {0}));
  ins.requests.push_back(make_request(ins, 1, 100.0, 25.0, 1, {1}));
  LoadState state(ins);
  CHECK(try_assign(state, ins, ins.requests[0], ins.requests[0].options[0]));
  // residual at slot 1 is 10 kW; 25 kW cannot fit, state must not change
  const auto loads_before = state.ev_load_kw();
  CHECK_FALSE(
      try_assign(state, ins, ins.requests[1], ins.requests[1].options[0]));
  CHECK(state.ev_load_kw() == loads_before);
  CHECK_FALSE(state.is_assigned(1));
}

TEST_CASE("try_assign rejects the N_c+1-th concurrent user") {
  Instance ins = blank_instance(4, 1.0, 1000.0, {{0, 10.0, 2}});
  for (int u = 0; u < 3; ++u)
    ins.requests.push_back(make_request(ins, u, 50.0, 10.0, 1, {0}));
  LoadState state(ins);
  CHECK(try_assign(state, ins, ins.requests[0], ins.requests[0].options[0]));
  CHECK(try_assign(state, ins, ins.requests[1], ins.requests[1].options[0]));
  CHECK_FALSE(
      try_assign(state, ins, ins.requests[2], ins.requests[2].options[0]));
}

TEST_CASE("try_assign throws when the user is already assigned") {
  Instance ins = blank_instance(4, 1.0, 1000.0, {{0, 10.0, 2}, {1, 5.0, 2}});
  ins.requests.push_back(make_request(ins, 0, 50.0, 10.0, 0, {0, 1}));
  LoadState state(ins);
  CHECK(try_assign(state, ins, ins.requests[0], ins.requests[0].options[0]));
  CHECK_THROWS_AS(
      try_assign(state, ins, ins.requests[0], ins.requests[0].options[1]),
      std::logic_error);
}

TEST_CASE("accepted try_assign sequences agree with the batch check") {
  Rng rng(20240817);
  for (int round = 0; round < 40; ++round) {
    const Instance ins = random_instance(rng, 15);
    LoadState state(ins);
    Schedule schedule;
    Rng pick = rng.child(static_cast<std::uint64_t>(round));
    for (const Request& r : ins.requests) {
      if (r.options.empty() || pick.uniform() < 0.3) continue;
      const auto& opt = r.options[static_cast<std::size_t>(
          pick.uniform_int(0, static_cast<int>(r.options.size()) - 1))];
      if (try_assign(state, ins, r, opt)) schedule.assign(r.user_id, opt.station);
    }
    CHECK(check_feasibility(ins, schedule).feasible);

    // LoadState must agree with a from-scratch recomputation
    const LoadState rebuilt = LoadState::from_schedule(ins, schedule);
    REQUIRE(rebuilt.ev_load_kw().size() == state.ev_load_kw().size());
    for (std::size_t t = 0; t < state.ev_load_kw().size(); ++t)
      CHECK(state.ev_load_kw()[t] ==
            doctest::Approx(rebuilt.ev_load_kw()[t]).epsilon(1e-12));
  }
}

TEST_CASE("objective is additive over disjoint user sets") {
  Rng rng(77);
  const Instance ins = random_instance(rng, 12);
  LoadState state(ins);
  Schedule all, odd, even;
  for (std::size_t i = 0; i < ins.requests.size(); ++i) {
    const Request& r = ins.requests[i];
    if (r.options.empty()) continue;
    if (try_assign(state, ins, r, r.options[0])) {
      all.assign(r.user_id, r.options[0].station);
      (i % 2 == 0 ? even : odd).assign(r.user_id, r.options[0].station);
    }
  }
  CHECK(evaluate_objective(ins, all) ==
        doctest::Approx(evaluate_objective(ins, odd) +
                        evaluate_objective(ins, even)));
}

TEST_CASE("removing an assignment keeps a feasible schedule feasible") {
  Rng rng(4242);
  for (int round = 0; round < 20; ++round) {
    const Instance ins = random_instance(rng, 12);
    LoadState state(ins);
    Schedule schedule;
    for (const Request& r : ins.requests)
      if (!r.options.empty() &&
          try_assign(state, ins, r, r.options[0]))
        schedule.assign(r.user_id, r.options[0].station);
    REQUIRE(check_feasibility(ins, schedule).feasible);
    Schedule reduced = schedule;
    for (const auto& [user, station] : schedule.assignment) {
      reduced.unassign(user);
      CHECK(check_feasibility(ins, reduced).feasible);
      reduced.assign(user, station);
    }
  }
}

TEST_CASE("validation rejects malformed instances") {
  Instance good = blank_instance(4, 1.0, 100.0, {{0, 10.0, 2}});
  good.requests.push_back(make_request(good, 0, 50.0, 10.0, 0, {0}));
  CHECK(instance_errors(good).empty());

  SUBCASE("base load longer than the horizon") {
    Instance bad = good;
    bad.base_load_kw.push_back(0.0);
    CHECK_FALSE(instance_errors(bad).empty());
  }
  SUBCASE("base load above capacity") {
    Instance bad = good;
    bad.base_load_kw[0] = 200.0;
    CHECK_FALSE(instance_errors(bad).empty());
  }
  SUBCASE("dangling station id in an option") {
    Instance bad = good;
    bad.requests[0].options[0].station = 3;
    CHECK_FALSE(instance_errors(bad).empty());
  }
  SUBCASE("two options at one station") {
    Instance bad = good;
    bad.requests[0].options.push_back(bad.requests[0].options[0]);
    CHECK_FALSE(instance_errors(bad).empty());
  }
  SUBCASE("slot count inconsistent with the demand") {
    Instance bad = good;
    bad.requests[0].options[0].slots.push_back(2);
    CHECK_FALSE(instance_errors(bad).empty());
  }
  SUBCASE("negative demand") {
    Instance bad = good;
    bad.requests[0].demand_kwh = -1.0;
    CHECK_FALSE(instance_errors(bad).empty());
  }
  SUBCASE("duplicate user ids") {
    Instance bad = good;
    bad.requests.push_back(bad.requests[0]);
    CHECK_FALSE(instance_errors(bad).empty());
  }
  SUBCASE("negative conditional gain") {
    Instance bad = good;
    bad.cost_per_kwh.assign(4, 100.0);
    CHECK_FALSE(instance_errors(bad).empty());
  }
  SUBCASE("validate_instance throws with details") {
    Instance bad = good;
    bad.requests[0].demand_kwh = -1.0;
    CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
  }
}

TEST_CASE("instance and schedule JSON round-trips preserve every value") {
  Rng rng(9001);
  const Instance ins = random_instance(rng, 10);
  const auto j = instance_to_json(ins);
  const Instance back = instance_from_json(j);
  CHECK(instance_to_json(back) == j);
  CHECK(back.requests.size() == ins.requests.size());
  CHECK(back.capacity_kw == ins.capacity_kw);

  Schedule s;
  for (const Request& r : ins.requests)
    if (!r.options.empty() && r.user_id % 2 == 0)
      s.assign(r.user_id, r.options[0].station);
  const auto sj = schedule_to_json(s, ins);
  CHECK(schedule_from_json(sj) == s);
}

TEST_CASE("cost_mode is parsed and serialized") {
  Instance ins = blank_instance(4, 1.0, 100.0, {{0, 10.0, 2}});
  ins.cost_mode = CostMode::PerSlot;
  const Instance back = instance_from_json(instance_to_json(ins));
  CHECK(back.cost_mode == CostMode::PerSlot);
}

TEST_CASE("malformed instance JSON raises io_error") {
  CHECK_THROWS_AS(instance_from_json(nlohmann::json{{"horizon", 3}}),
                  evcrp::io_error);
  CHECK_THROWS_AS(schedule_from_json(nlohmann::json::array()),
                  evcrp::io_error);
}

TEST_SUITE_END();
