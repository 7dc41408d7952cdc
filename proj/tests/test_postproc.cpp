#include <doctest.h>

#include <cmath>
#include <limits>

#include "evcrp/codec.hpp"
#include "evcrp/errors.hpp"
#include "evcrp/feasibility.hpp"
#include "evcrp/greedy.hpp"
#include "evcrp/oracle.hpp"
#include "evcrp/postproc.hpp"
#include "evcrp/rng.hpp"
#include "helpers.hpp"

using namespace evcrp;
using namespace evcrp::postproc;
using evcrp::testing::blank_instance;
using evcrp::testing::make_request;
using evcrp::testing::random_instance;

TEST_SUITE_BEGIN("postproc");

TEST_CASE("a zero prediction extracts the empty schedule") {
  Rng rng(42);
  const Instance ins = random_instance(rng, 10);
  const codec::CodecParams params;
  const int cells = codec::label_length(
      static_cast<int>(ins.stations.size()), params);
  const Solution s =
      extract_solution(ins, Eigen::VectorXd::Zero(cells), params);
  CHECK(s.schedule.empty());
  CHECK(s.objective == 0.0);
}

TEST_CASE("the optimal label round-trips to the optimal objective") {
  // distinct gains, one user per cell, no constraint interactions
  Instance ins = blank_instance(8, 1.0, 1e6, {{0, 10.0, 50}});
  const double utilities[5] = {1.0, 2.0, 3.0, 4.0, 5.0};
  for (int u = 0; u < 5; ++u)
    ins.requests.push_back(
        make_request(ins, u, utilities[u], 10.0 * (u + 1), 0, {0}));
  const Solution opt = oracle::enumerate_exhaustive(ins);
  const codec::CodecParams params;
  const Eigen::VectorXd label = codec::encode_label(ins, opt.schedule, params);
  const Solution extracted = extract_solution(ins, label, params);
  CHECK(extracted.objective == doctest::Approx(opt.objective));
  CHECK(check_feasibility(ins, extracted.schedule).feasible);
}

TEST_CASE("saturated predictions reduce to a per-cell greedy and stay feasible") {
  Rng rng(111);
  for (int round = 0; round < 20; ++round) {
    const Instance ins = random_instance(rng, 20);
    const codec::CodecParams params;
    const int cells = codec::label_length(
        static_cast<int>(ins.stations.size()), params);
    const Eigen::VectorXd y_hat = Eigen::VectorXd::Constant(
        cells, std::numeric_limits<double>::infinity());
    const Solution s = extract_solution(ins, y_hat, params);
    CAPTURE(round);
    CHECK(check_feasibility(ins, s.schedule).feasible);
    // with every budget open the sweep is maximal, like a greedy pass
    LoadState state = LoadState::from_schedule(ins, s.schedule);
    for (const Request& r : ins.requests) {
      if (s.schedule.station_of(r.user_id).has_value()) continue;
      for (const ChargingOption& o : r.options)
        CHECK_FALSE(try_assign(state, ins, r, o));
    }
  }
}

TEST_CASE("arbitrary real predictions always yield feasible schedules") {
  Rng rng(2025);
  for (int round = 0; round < 300; ++round) {
    const Instance ins = random_instance(rng, 15);
    const codec::CodecParams params;
    const int cells = codec::label_length(
        static_cast<int>(ins.stations.size()), params);
    Eigen::VectorXd y_hat(cells);
    Rng noise = rng.child(static_cast<std::uint64_t>(round));
    for (int i = 0; i < cells; ++i) {
      const double pick = noise.uniform();
      if (pick < 0.1)
        y_hat(i) = std::numeric_limits<double>::quiet_NaN();
      else if (pick < 0.2)
        y_hat(i) = std::numeric_limits<double>::infinity();
      else
        y_hat(i) = noise.uniform(-5.0, 8.0);
    }
    const Solution s = extract_solution(ins, y_hat, params);
    CAPTURE(round);
    CHECK(check_feasibility(ins, s.schedule).feasible);
  }
}

TEST_CASE("per-cell admissions never exceed the floored budget") {
  Rng rng(3030);
  const Instance ins = random_instance(rng, 25);
  const codec::CodecParams params;
  const codec::GroupIndex gi = codec::build_group_index(ins, params);
  const int cells = gi.num_cells();
  Eigen::VectorXd y_hat(cells);
  Rng noise(4);
  for (int i = 0; i < cells; ++i) y_hat(i) = noise.uniform(0.0, 2.5);
  const Solution s = extract_solution(ins, y_hat, params);

  std::vector<int> admitted(static_cast<std::size_t>(cells), 0);
  for (const codec::GroupEntry& e : gi.entries) {
    const Request& r =
        ins.requests[static_cast<std::size_t>(e.request_index)];
    const auto st = s.schedule.station_of(r.user_id);
    if (st.has_value() &&
        *st == r.options[static_cast<std::size_t>(e.option_index)].station)
      admitted[static_cast<std::size_t>(gi.cell_of(e))] += 1;
  }
  for (int i = 0; i < cells; ++i)
    CHECK(admitted[static_cast<std::size_t>(i)] <=
          static_cast<int>(std::floor(y_hat(i))));
}

TEST_CASE("raising one cell budget never lowers that cell's admissions") {
  Rng rng(5050);
  const Instance ins = random_instance(rng, 18);
  const codec::CodecParams params;
  const codec::GroupIndex gi = codec::build_group_index(ins, params);
  const int cells = gi.num_cells();
  Eigen::VectorXd y_hat(cells);
  Rng noise(6);
  for (int i = 0; i < cells; ++i) y_hat(i) = noise.uniform(0.0, 2.0);

  auto admitted_in = [&](const Eigen::VectorXd& pred, int cell) {
    const Solution s = extract_solution(ins, pred, params);
    int count = 0;
    for (const codec::GroupEntry& e : gi.entries) {
      if (gi.cell_of(e) != cell) continue;
      const Request& r =
          ins.requests[static_cast<std::size_t>(e.request_index)];
      const auto st = s.schedule.station_of(r.user_id);
      if (st.has_value() &&
          *st == r.options[static_cast<std::size_t>(e.option_index)].station)
        ++count;
    }
    return count;
  };

  for (int cell = 0; cell < cells; cell += 17) {
    const int before = admitted_in(y_hat, cell);
    Eigen::VectorXd raised = y_hat;
    raised(cell) += 3.0;
    CHECK(admitted_in(raised, cell) >= before);
  }
}

TEST_CASE("users spanning several station cells are admitted once") {
  Instance ins = blank_instance(8, 1.0, 1e6, {{0, 10.0, 10}, {1, 5.0, 10}});
  ins.requests.push_back(make_request(ins, 0, 6.0, 10.0, 0, {0, 1}));
  const codec::CodecParams params;
  const int cells =
      codec::label_length(static_cast<int>(ins.stations.size()), params);
  const Eigen::VectorXd y_hat = Eigen::VectorXd::Constant(cells, 5.0);
  const Solution s = extract_solution(ins, y_hat, params);
  CHECK(s.schedule.size() == 1);
}

TEST_CASE("negative and NaN entries are clamped and counted") {
  Rng rng(7070);
  const Instance ins = random_instance(rng, 8);
  const codec::CodecParams params;
  const int cells =
      codec::label_length(static_cast<int>(ins.stations.size()), params);
  Eigen::VectorXd y_hat = Eigen::VectorXd::Constant(cells, -1.0);
  y_hat(0) = std::numeric_limits<double>::quiet_NaN();
  ExtractStats stats;
  const Solution s = extract_solution(ins, y_hat, params, {}, &stats);
  CHECK(s.schedule.empty());
  CHECK(stats.nan_clamped == 1);
  CHECK(stats.negative_clamped == cells - 1);
}

TEST_CASE("prediction length must match the instance codec") {
  Rng rng(8080);
  const Instance ins = random_instance(rng, 8);
  const codec::CodecParams params;
  CHECK_THROWS_AS(
      extract_solution(ins, Eigen::VectorXd::Zero(7), params),
      evcrp::codec_mismatch_error);
}

TEST_CASE("utility sort order is available behind the flag") {
  // V = 1 folds both users into one cell; only one fits at slot 0
  Instance ins = blank_instance(4, 1.0, 15.0, {{0, 10.0, 5}});
  ins.cost_per_kwh.assign(4, 0.02);
  ins.requests.push_back(make_request(ins, 0, 9.0, 10.0, 0, {0}));
  ins.requests.push_back(make_request(ins, 1, 9.05, 19.0, 0, {0}));
  // gains: user0 = 9 - 0.2 = 8.8; user1 = 9.05 - 0.4 = 8.65 -> gain order
  // prefers user0, utility order prefers user1
  codec::CodecParams params;
  params.V = 1;
  Eigen::VectorXd y_hat = Eigen::VectorXd::Constant(
      codec::label_length(1, params), 1.0);

  PostprocParams by_gain;
  const Solution gain_first = extract_solution(ins, y_hat, params, by_gain);
  PostprocParams by_utility;
  by_utility.sort = SortKey::Utility;
  const Solution utility_first =
      extract_solution(ins, y_hat, params, by_utility);
  CHECK(gain_first.schedule.station_of(0).has_value());
  CHECK_FALSE(gain_first.schedule.station_of(1).has_value());
  CHECK(utility_first.schedule.station_of(1).has_value());
  CHECK_FALSE(utility_first.schedule.station_of(0).has_value());
}

TEST_SUITE_END();
