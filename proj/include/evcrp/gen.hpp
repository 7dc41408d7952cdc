#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evcrp/instance.hpp"
#include "evcrp/rng.hpp"

namespace evcrp::gen {

enum class UtilityMode { Linear, Random };

struct GenParams {
  int num_users = 100;
  std::vector<Station> stations = default_stations();
  double capacity_kw = 1000.0; // 1 MW substation
  Horizon horizon;             // 96 x 15 min
  int load_profile = 1;        // 1..3
  UtilityMode utility_mode = UtilityMode::Linear;
  double utility_lo = 5000.0;
  double utility_hi = 8000.0;
  std::uint64_t seed = 0;

  static std::vector<Station> default_stations() {
    return {{0, 1.5, 200}, {1, 7.0, 200}, {2, 50.0, 200}};
  }
};

struct LoadProfile {
  std::vector<double> values_kw; // length num_slots
};

// One truncated-normal draw in [lo, hi] by rejection; stddev 0 returns the
// mean clamped into the interval.
double sample_truncated_normal(double mean, double stddev, double lo,
                               double hi, Rng& rng);

// Energy still needed given a state of charge (fraction) and battery size.
double demand_kwh(double soc, double battery_kwh);

// Peak-price linear utility for a demand (Eq.-of-use peak 0.36 $/kWh).
double linear_utility(double demand);

// Bundled household aggregate profiles (ids 1..3), stored at 15-minute
// resolution and resampled to the requested horizon by periodic linear
// interpolation. Mirrors the files under data/.
LoadProfile builtin_load_profile(int id, const Horizon& horizon);

// Bundled time-of-use tariff: 0.12 off-peak, 0.22 shoulder, 0.36 peak
// (16:00-21:00), per kWh.
std::vector<double> builtin_cost_profile(const Horizon& horizon);

// Synthetic instance sampler: SOC ~ truncated normal(0.5, 0.3) on
// [0.2, 0.8], battery ~ normal(24, 10) clamped at 5 kWh, arrival ~
// normal(18:00, 5 h) wrapped modulo the horizon. Each user gets one
// contiguous option per station starting at their arrival slot; options
// that cannot finish before the horizon end are dropped, and users left
// without options (or with a negative-gain option) are resampled.
Instance generate_synthetic(const GenParams& params);

struct IngestReport {
  Instance instance;
  int rows_read = 0;
  int rows_skipped = 0;
  std::vector<std::string> warnings; // one per skipped row, with line number
};

// Builds an instance from an ACN-style session log: a CSV with header
// columns connection_time (ISO-8601 or epoch seconds) and kwh_delivered.
// Bad rows are skipped and counted.
IngestReport ingest_acn(const std::string& csv_path, const GenParams& params);

}  // namespace evcrp::gen
