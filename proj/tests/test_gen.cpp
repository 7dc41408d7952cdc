#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "evcrp/errors.hpp"
#include "evcrp/feasibility.hpp"
#include "evcrp/gen.hpp"
#include "evcrp/json_io.hpp"
#include "helpers.hpp"

using namespace evcrp;
using namespace evcrp::gen;

namespace {

std::string write_temp_csv(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/evcrp_test_" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_SUITE_BEGIN("gen");

TEST_CASE("truncated normal with zero stddev returns the mean") {
  Rng rng(1);
  CHECK(sample_truncated_normal(0.5, 0.0, 0.2, 0.8, rng) == 0.5);
}

TEST_CASE("truncated normal stays in bounds and keeps the symmetric mean") {
  Rng rng(123);
  double sum = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double x = sample_truncated_normal(0.5, 0.3, 0.2, 0.8, rng);
    REQUIRE(x >= 0.2);
    REQUIRE(x <= 0.8);
    sum += x;
  }
  // the interval is symmetric around the mean, so truncation cannot shift it
  CHECK(sum / draws == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(sum / draws - 0.5) < 0.01);
}

TEST_CASE("demand and linear utility arithmetic") {
  CHECK(demand_kwh(0.5, 24.0) == doctest::Approx(12.0));
  CHECK(linear_utility(12.0) == doctest::Approx(4.32));
}

TEST_CASE("same seed reproduces a byte-identical instance") {
  GenParams p;
  p.num_users = 40;
  p.seed = 7;
  const Instance a = generate_synthetic(p);
  const Instance b = generate_synthetic(p);
  CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());
}

TEST_CASE("generated users satisfy the sampler post-conditions") {
  GenParams p;
  p.num_users = 10000;
  p.seed = 99;
  const Instance ins = generate_synthetic(p);
  REQUIRE(static_cast<int>(ins.requests.size()) == p.num_users);
  for (const Request& r : ins.requests) {
    CHECK(r.demand_kwh > 0.0);
    // SOC >= 0.2 caps the demand at 80% of the battery actually drawn
    REQUIRE_FALSE(r.options.empty());
    for (const ChargingOption& o : r.options) {
      const Station* st = ins.find_station(o.station);
      const double delivered =
          st->rate_kw * ins.horizon.slot_hours * static_cast<double>(o.slots.size());
      CHECK(delivered >= r.demand_kwh - 1e-9);
      CHECK(o.slots.back() < ins.num_slots());
    }
  }
}

TEST_CASE("generated instances pass core validation across seeds") {
  Rng rng(31337);
  for (int i = 0; i < 200; ++i) {
    const Instance ins = evcrp::testing::random_instance(rng, 25);
    CAPTURE(i);
    CHECK(instance_errors(ins).empty());
  }
}

TEST_CASE("linear utilities keep every option's gain non-negative") {
  GenParams p;
  p.num_users = 500;
  p.utility_mode = UtilityMode::Linear;
  p.seed = 5;
  const Instance ins = generate_synthetic(p);
  for (const Request& r : ins.requests)
    for (const ChargingOption& o : r.options)
      CHECK(conditional_gain(r, o, ins) >= 0.0);
}

TEST_CASE("builtin load profiles: length, bounds, evening peak") {
  const Horizon def;
  for (int id = 1; id <= 3; ++id) {
    const LoadProfile profile = builtin_load_profile(id, def);
    REQUIRE(profile.values_kw.size() == 96);
    int argmax = 0;
    for (int t = 0; t < 96; ++t) {
      CHECK(profile.values_kw[static_cast<std::size_t>(t)] >= 0.0);
      CHECK(profile.values_kw[static_cast<std::size_t>(t)] <= 1000.0);
      if (profile.values_kw[static_cast<std::size_t>(t)] >
          profile.values_kw[static_cast<std::size_t>(argmax)])
        argmax = t;
    }
    const double peak_hour = (argmax + 0.5) * def.slot_hours;
    CHECK(peak_hour >= 17.0);
    CHECK(peak_hour <= 21.0);
  }
  CHECK_THROWS_AS(builtin_load_profile(4, def), std::invalid_argument);
}

TEST_CASE("profiles resample to shorter horizons") {
  const LoadProfile p = builtin_load_profile(1, {24, 1.0});
  REQUIRE(p.values_kw.size() == 24);
  for (const double v : p.values_kw) CHECK(v > 0.0);
}

TEST_CASE("bundled data files mirror the builtin profiles") {
  const Horizon def;
  for (int id = 1; id <= 3; ++id) {
    std::ifstream in(std::string(EVCRP_DATA_DIR) + "/load_profile_" +
                     std::to_string(id) + ".json");
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    const auto values = j.get<std::vector<double>>();
    const LoadProfile profile = builtin_load_profile(id, def);
    REQUIRE(values.size() == profile.values_kw.size());
    for (std::size_t t = 0; t < values.size(); ++t)
      CHECK(values[t] == profile.values_kw[t]);
  }
  std::ifstream in(std::string(EVCRP_DATA_DIR) + "/tou_tariff_per_kwh.json");
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  const auto tariff = j.get<std::vector<double>>();
  const auto builtin = builtin_cost_profile(def);
  REQUIRE(tariff.size() == builtin.size());
  for (std::size_t t = 0; t < tariff.size(); ++t)
    CHECK(tariff[t] == builtin[t]);
}

TEST_CASE("tariff peaks at 0.36 between 16:00 and 21:00") {
  const auto cost = builtin_cost_profile({96, 0.25});
  double peak = 0.0;
  for (const double c : cost) peak = std::max(peak, c);
  CHECK(peak == doctest::Approx(0.36));
  CHECK(cost[17 * 4] == doctest::Approx(0.36));
  CHECK(cost[4 * 4] < 0.36);   // off-peak night
  CHECK(cost[12 * 4] < 0.36);  // shoulder
}

TEST_CASE("impossible generator parameters raise errors") {
  GenParams p;
  p.capacity_kw = 0.0;
  CHECK_THROWS_AS(generate_synthetic(p), std::invalid_argument);
  GenParams q;
  q.capacity_kw = 100.0; // below the base profile peak
  CHECK_THROWS_AS(generate_synthetic(q), std::invalid_argument);
  GenParams r;
  r.num_users = 0;
  CHECK_THROWS_AS(generate_synthetic(r), std::invalid_argument);
}

TEST_CASE("ingest: empty CSV produces an instance with zero requests") {
  const auto path =
      write_temp_csv("empty.csv", "connection_time,kwh_delivered\n");
  const IngestReport report = ingest_acn(path, GenParams{});
  CHECK(report.instance.requests.empty());
  CHECK(report.rows_read == 0);
  std::remove(path.c_str());
}

TEST_CASE("ingest maps 08:15 at 15-minute slots to arrival slot 33") {
  const auto path = write_temp_csv(
      "one.csv",
      "connection_time,kwh_delivered\n2020-03-10T08:15:00,10.0\n");
  const IngestReport report = ingest_acn(path, GenParams{});
  REQUIRE(report.instance.requests.size() == 1);
  const Request& r = report.instance.requests[0];
  CHECK(r.demand_kwh == doctest::Approx(10.0));
  for (const ChargingOption& o : r.options) CHECK(o.slots.front() == 33);
  std::remove(path.c_str());
}

TEST_CASE("ingest accepts epoch seconds") {
  // 1583828100 = 2020-03-10T08:15:00 UTC
  const auto path = write_temp_csv(
      "epoch.csv", "connection_time,kwh_delivered\n1583828100,4.5\n");
  const IngestReport report = ingest_acn(path, GenParams{});
  REQUIRE(report.instance.requests.size() == 1);
  CHECK(report.instance.requests[0].options.front().slots.front() == 33);
  std::remove(path.c_str());
}

TEST_CASE("ingest keeps duplicated rows as distinct users") {
  const auto path = write_temp_csv(
      "dup.csv",
      "connection_time,kwh_delivered\n"
      "2020-03-10 10:00:00,8.0\n"
      "2020-03-10 10:00:00,8.0\n");
  const IngestReport report = ingest_acn(path, GenParams{});
  REQUIRE(report.instance.requests.size() == 2);
  CHECK(report.instance.requests[0].user_id !=
        report.instance.requests[1].user_id);
  std::remove(path.c_str());
}

TEST_CASE("ingest skips bad rows with line numbers and keeps counting") {
  const auto path = write_temp_csv(
      "bad.csv",
      "connection_time,kwh_delivered\n"
      "not-a-time,8.0\n"
      "2020-03-10T10:00:00,abc\n"
      "2020-03-10T10:00:00,-3\n"
      "2020-03-10T10:00:00,6.0\n");
  const IngestReport report = ingest_acn(path, GenParams{});
  CHECK(report.rows_read == 4);
  CHECK(report.rows_skipped == 3);
  REQUIRE(report.instance.requests.size() == 1);
  REQUIRE(report.warnings.size() == 3);
  CHECK(report.warnings[0].find("line 2") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("ingest refuses a CSV without the required header") {
  const auto path = write_temp_csv("noheader.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(ingest_acn(path, GenParams{}), evcrp::io_error);
  std::remove(path.c_str());
}

TEST_SUITE_END();
