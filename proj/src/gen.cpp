#include "evcrp/gen.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "evcrp/errors.hpp"
#include "evcrp/feasibility.hpp"

namespace evcrp::gen {

namespace {

constexpr int kMaxResamples = 1000;
constexpr double kMinBatteryKwh = 5.0;
constexpr double kPeakPricePerKwh = 0.36;

int arrival_slot_from_hour(double hour, const Horizon& horizon) {
  const double span = horizon.hours();
  double wrapped = std::fmod(hour, span);
  if (wrapped < 0) wrapped += span;
  int slot = static_cast<int>(std::floor(wrapped / horizon.slot_hours));
  if (slot >= horizon.num_slots) slot = horizon.num_slots - 1;
  return slot;
}

// Contiguous option starting at arrival; empty when the demand cannot be
// delivered before the horizon ends.
std::vector<int> contiguous_slots(int arrival, int needed, int num_slots) {
  if (arrival + needed > num_slots) return {};
  std::vector<int> slots(static_cast<std::size_t>(needed));
  for (int k = 0; k < needed; ++k) slots[static_cast<std::size_t>(k)] =
      arrival + k;
  return slots;
}

std::vector<ChargingOption> build_options(const Instance& shell, int arrival,
                                          double demand) {
  std::vector<ChargingOption> options;
  for (const Station& st : shell.stations) {
    const int needed =
        slots_needed(demand, st.rate_kw, shell.horizon.slot_hours);
    auto slots = contiguous_slots(arrival, needed, shell.horizon.num_slots);
    if (slots.empty()) continue;
    options.push_back({st.id, std::move(slots)});
  }
  return options;
}

bool all_gains_non_negative(const Request& request, const Instance& shell) {
  // same tolerance as instance validation, so exact-zero gains survive
  const double tol = 1e-9 * std::max(1.0, request.utility);
  for (const ChargingOption& o : request.options)
    if (conditional_gain(request, o, shell) < -tol) return false;
  return true;
}

Instance instance_shell(const GenParams& p) {
  Instance ins;
  ins.horizon = p.horizon;
  ins.capacity_kw = p.capacity_kw;
  ins.stations = p.stations;
  ins.base_load_kw = builtin_load_profile(p.load_profile, p.horizon).values_kw;
  ins.cost_per_kwh = builtin_cost_profile(p.horizon);
  return ins;
}

void check_params(const GenParams& p) {
  if (p.num_users < 1)
    throw std::invalid_argument("num_users must be >= 1");
  if (!(p.capacity_kw > 0.0))
    throw std::invalid_argument("capacity_kw must be > 0");
  if (p.horizon.num_slots < 1 || !(p.horizon.slot_hours > 0.0))
    throw std::invalid_argument("invalid horizon");
  if (p.stations.empty())
    throw std::invalid_argument("at least one station is required");
  for (const Station& s : p.stations)
    if (!(s.rate_kw > 0.0))
      throw std::invalid_argument("station rates must be > 0");
  if (p.utility_mode == UtilityMode::Random && p.utility_lo > p.utility_hi)
    throw std::invalid_argument("utility_lo must be <= utility_hi");
}

}  // namespace

double sample_truncated_normal(double mean, double stddev, double lo,
                               double hi, Rng& rng) {
  if (!(lo < hi)) throw std::invalid_argument("need lo < hi");
  if (stddev <= 0.0) return std::clamp(mean, lo, hi);
  for (int i = 0; i < 1000000; ++i) {
    const double x = rng.normal(mean, stddev);
    if (x >= lo && x <= hi) return x;
  }
  // mean far outside the interval; the mass concentrates at the near bound
  return std::clamp(mean, lo, hi);
}

double demand_kwh(double soc, double battery_kwh) {
  return (1.0 - soc) * battery_kwh;
}

double linear_utility(double demand) { return kPeakPricePerKwh * demand; }

Instance generate_synthetic(const GenParams& params) {
  check_params(params);
  Instance ins = instance_shell(params);
  for (std::size_t t = 0; t < ins.base_load_kw.size(); ++t)
    if (ins.base_load_kw[t] > ins.capacity_kw)
      throw std::invalid_argument(
          "capacity_kw is below the base load profile peak");

  const Rng root(params.seed);
  ins.requests.reserve(static_cast<std::size_t>(params.num_users));
  for (int a = 0; a < params.num_users; ++a) {
    Rng rng = root.child(static_cast<std::uint64_t>(a));
    bool placed = false;
    for (int attempt = 0; attempt < kMaxResamples && !placed; ++attempt) {
      const double soc = sample_truncated_normal(0.5, 0.3, 0.2, 0.8, rng);
      const double battery =
          std::max(kMinBatteryKwh, rng.normal(24.0, 10.0));
      const double demand = demand_kwh(soc, battery);
      const int arrival =
          arrival_slot_from_hour(rng.normal(18.0, 5.0), params.horizon);

      Request req;
      req.user_id = a;
      req.demand_kwh = demand;
      req.options = build_options(ins, arrival, demand);
      if (req.options.empty()) continue;
      req.utility = params.utility_mode == UtilityMode::Linear
                        ? linear_utility(demand)
                        : rng.uniform(params.utility_lo, params.utility_hi);
      if (!all_gains_non_negative(req, ins)) continue;
      ins.requests.push_back(std::move(req));
      placed = true;
    }
    if (!placed) {
      std::ostringstream os;
      os << "could not generate user " << a << " after " << kMaxResamples
         << " attempts; parameters leave no room for feasible requests";
      throw std::invalid_argument(os.str());
    }
  }
  return ins;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Time of day in hours from an ISO-8601 timestamp or epoch seconds.
bool parse_time_of_day(const std::string& raw, double* hours_out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const std::size_t sep = s.find_first_of("T ");
  if (sep != std::string::npos && s.find(':') != std::string::npos) {
    int hh = 0, mm = 0;
    double ss_part = 0.0;
    char colon1 = 0, colon2 = 0;
    std::istringstream in(s.substr(sep + 1));
    in >> hh >> colon1 >> mm;
    if (!in || colon1 != ':') return false;
    if (in.peek() == ':') {
      in >> colon2 >> ss_part;
      if (!in) return false;
    }
    if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss_part < 0.0 ||
        ss_part >= 60.0)
      return false;
    *hours_out = hh + mm / 60.0 + ss_part / 3600.0;
    return true;
  }
  // epoch seconds
  double epoch = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, epoch);
  if (res.ec != std::errc() || res.ptr != end) return false;
  const double day_seconds = std::fmod(epoch, 86400.0);
  *hours_out = (day_seconds < 0 ? day_seconds + 86400.0 : day_seconds) / 3600.0;
  return true;
}

}  // namespace

IngestReport ingest_acn(const std::string& csv_path, const GenParams& params) {
  check_params(params);
  std::ifstream in(csv_path);
  if (!in) throw io_error("cannot open '" + csv_path + "'");

  IngestReport report;
  report.instance = instance_shell(params);
  Instance& ins = report.instance;

  std::string line;
  if (!std::getline(in, line)) throw io_error("'" + csv_path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  int time_col = -1, kwh_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name == "connection_time") time_col = static_cast<int>(i);
    if (name == "kwh_delivered") kwh_col = static_cast<int>(i);
  }
  if (time_col < 0 || kwh_col < 0)
    throw io_error("'" + csv_path +
                   "': header must contain connection_time and kwh_delivered");

  const Rng root(params.seed);
  int line_no = 1;
  int next_user = 0;
  auto skip = [&](const std::string& why) {
    ++report.rows_skipped;
    std::ostringstream os;
    os << "line " << line_no << ": " << why;
    report.warnings.push_back(os.str());
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++report.rows_read;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) <= std::max(time_col, kwh_col)) {
      skip("too few columns");
      continue;
    }
    double hours = 0.0;
    if (!parse_time_of_day(fields[static_cast<std::size_t>(time_col)],
                           &hours)) {
      skip("unparsable connection_time '" +
           trim(fields[static_cast<std::size_t>(time_col)]) + "'");
      continue;
    }
    double demand = 0.0;
    {
      const std::string raw = trim(fields[static_cast<std::size_t>(kwh_col)]);
      const auto res =
          std::from_chars(raw.data(), raw.data() + raw.size(), demand);
      if (res.ec != std::errc() || res.ptr != raw.data() + raw.size()) {
        skip("unparsable kwh_delivered '" + raw + "'");
        continue;
      }
    }
    if (!(demand > 0.0)) {
      skip("non-positive kwh_delivered");
      continue;
    }

    const int arrival = arrival_slot_from_hour(hours, params.horizon);
    Request req;
    req.user_id = next_user;
    req.demand_kwh = demand;
    req.options = build_options(ins, arrival, demand);
    if (req.options.empty()) {
      skip("demand cannot be delivered before the horizon end");
      continue;
    }
    Rng rng = root.child(static_cast<std::uint64_t>(report.rows_read));
    req.utility = params.utility_mode == UtilityMode::Linear
                      ? linear_utility(demand)
                      : rng.uniform(params.utility_lo, params.utility_hi);
    // a real log cannot be resampled; drop options the utility cannot cover
    const double gain_tol = 1e-9 * std::max(1.0, req.utility);
    std::erase_if(req.options, [&](const ChargingOption& o) {
      return conditional_gain(req, o, ins) < -gain_tol;
    });
    if (req.options.empty()) {
      skip("utility does not cover the electricity cost of any option");
      continue;
    }
    ins.requests.push_back(std::move(req));
    ++next_user;
  }
  return report;
}

}  // namespace evcrp::gen
