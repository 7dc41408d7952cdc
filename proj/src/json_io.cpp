#include "evcrp/json_io.hpp"

#include <fstream>
#include <sstream>

#include "evcrp/errors.hpp"

namespace evcrp {

using nlohmann::json;

namespace {

json require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    std::ostringstream os;
    os << "missing field '" << key << "'";
    throw io_error(os.str());
  }
  return j.at(key);
}

std::vector<double> number_vector(const json& j, const char* key) {
  const json arr = require(j, key);
  if (!arr.is_array()) throw io_error(std::string(key) + " must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw io_error(std::string(key) + " must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

json instance_to_json(const Instance& ins) {
  json j;
  j["horizon"] = {{"num_slots", ins.horizon.num_slots},
                  {"slot_hours", ins.horizon.slot_hours}};
  j["capacity_kw"] = ins.capacity_kw;
  j["base_load_kw"] = ins.base_load_kw;
  j["cost_per_kwh"] = ins.cost_per_kwh;
  j["cost_mode"] = ins.cost_mode == CostMode::PerKwh ? "per-kwh" : "per-slot";
  json stations = json::array();
  for (const Station& s : ins.stations)
    stations.push_back(
        {{"id", s.id}, {"rate_kw", s.rate_kw}, {"num_evse", s.num_evse}});
  j["stations"] = std::move(stations);
  json requests = json::array();
  for (const Request& r : ins.requests) {
    json options = json::array();
    for (const ChargingOption& o : r.options)
      options.push_back({{"station", o.station}, {"slots", o.slots}});
    requests.push_back({{"user_id", r.user_id},
                        {"utility", r.utility},
                        {"demand_kwh", r.demand_kwh},
                        {"options", std::move(options)}});
  }
  j["requests"] = std::move(requests);
  return j;
}

Instance instance_from_json(const json& j) {
  Instance ins;
  try {
    const json h = require(j, "horizon");
    ins.horizon.num_slots = require(h, "num_slots").get<int>();
    ins.horizon.slot_hours = require(h, "slot_hours").get<double>();
    ins.capacity_kw = require(j, "capacity_kw").get<double>();
    ins.base_load_kw = number_vector(j, "base_load_kw");
    ins.cost_per_kwh = number_vector(j, "cost_per_kwh");
    if (j.contains("cost_mode")) {
      const std::string mode = j.at("cost_mode").get<std::string>();
      if (mode == "per-kwh")
        ins.cost_mode = CostMode::PerKwh;
      else if (mode == "per-slot")
        ins.cost_mode = CostMode::PerSlot;
      else
        throw io_error("cost_mode must be 'per-kwh' or 'per-slot'");
    }
    for (const json& s : require(j, "stations")) {
      Station st;
      st.id = require(s, "id").get<int>();
      st.rate_kw = require(s, "rate_kw").get<double>();
      st.num_evse = require(s, "num_evse").get<int>();
      ins.stations.push_back(st);
    }
    for (const json& r : require(j, "requests")) {
      Request req;
      req.user_id = require(r, "user_id").get<int>();
      req.utility = require(r, "utility").get<double>();
      req.demand_kwh = require(r, "demand_kwh").get<double>();
      for (const json& o : require(r, "options")) {
        ChargingOption opt;
        opt.station = require(o, "station").get<int>();
        opt.slots = require(o, "slots").get<std::vector<int>>();
        req.options.push_back(std::move(opt));
      }
      ins.requests.push_back(std::move(req));
    }
  } catch (const json::exception& e) {
    throw io_error(std::string("malformed instance JSON: ") + e.what());
  }
  return ins;
}

json schedule_to_json(const Schedule& schedule, const Instance& instance) {
  json j = json::object();
  for (const Request& r : instance.requests) {
    const auto s = schedule.station_of(r.user_id);
    const std::string key = std::to_string(r.user_id);
    if (s.has_value())
      j[key] = *s;
    else
      j[key] = nullptr;
  }
  // keep assignments of users the instance does not know about visible
  for (const auto& [user_id, station_id] : schedule.assignment) {
    const std::string key = std::to_string(user_id);
    if (!j.contains(key)) j[key] = station_id;
  }
  return j;
}

Schedule schedule_from_json(const json& j) {
  if (!j.is_object()) throw io_error("schedule JSON must be an object");
  Schedule s;
  for (const auto& [key, value] : j.items()) {
    if (value.is_null()) continue;
    if (!value.is_number_integer())
      throw io_error("schedule values must be station ids or null");
    try {
      s.assign(std::stoi(key), value.get<int>());
    } catch (const std::exception&) {
      throw io_error("schedule keys must be integer user ids");
    }
  }
  return s;
}

json solution_to_json(const Solution& solution, const Instance& instance) {
  json j;
  j["method"] = solution.method;
  j["objective"] = solution.objective;
  j["optimal"] = solution.optimal;
  j["schedule"] = schedule_to_json(solution.schedule, instance);
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw io_error("short write to '" + path + "'");
}

Instance load_instance(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw io_error("cannot parse '" + path + "': " + e.what());
  }
  Instance ins = instance_from_json(j);
  const auto errors = instance_errors(ins);
  if (!errors.empty())
    throw io_error("'" + path + "': " + errors.front());
  return ins;
}

void save_instance(const Instance& instance, const std::string& path) {
  write_text_file(path, instance_to_json(instance).dump(2) + "\n");
}

Schedule load_schedule(const std::string& path) {
  try {
    return schedule_from_json(json::parse(read_text_file(path)));
  } catch (const json::exception& e) {
    throw io_error("cannot parse '" + path + "': " + e.what());
  }
}

void save_schedule(const Schedule& schedule, const Instance& instance,
                   const std::string& path) {
  write_text_file(path, schedule_to_json(schedule, instance).dump(2) + "\n");
}

}  // namespace evcrp
