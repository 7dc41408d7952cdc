#include "evcrp/codec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "evcrp/errors.hpp"
#include "evcrp/feasibility.hpp"

namespace evcrp::codec {

using nlohmann::json;

int band_of(double normalized, int bands) {
  if (!(normalized > 0.0)) return 1;
  const int band =
      static_cast<int>(std::ceil(normalized * bands - 1e-9));
  return std::clamp(band, 1, bands);
}

GroupIndex build_group_index(const Instance& instance,
                             const CodecParams& params) {
  GroupIndex index;
  index.params = params;
  index.station_order = instance.stations_by_id();
  const std::size_t C = index.station_order.size();
  index.station_max_gain.assign(C, 0.0);
  index.station_max_ratio.assign(C, 0.0);
  index.station_max_demand.assign(C, 0.0);

  std::vector<int> pos_of_station(instance.stations.size(), 0);
  for (std::size_t p = 0; p < C; ++p)
    pos_of_station[static_cast<std::size_t>(index.station_order[p])] =
        static_cast<int>(p);

  for (std::size_t r = 0; r < instance.requests.size(); ++r) {
    const Request& req = instance.requests[r];
    for (std::size_t o = 0; o < req.options.size(); ++o) {
      const ChargingOption& opt = req.options[o];
      GroupEntry e;
      e.request_index = static_cast<int>(r);
      e.option_index = static_cast<int>(o);
      e.station_pos = pos_of_station[static_cast<std::size_t>(
          instance.station_index(opt.station))];
      e.gain = conditional_gain(req, opt, instance);
      index.entries.push_back(e);

      auto& max_gain = index.station_max_gain[
          static_cast<std::size_t>(e.station_pos)];
      max_gain = std::max(max_gain, e.gain);
      auto& max_ratio = index.station_max_ratio[
          static_cast<std::size_t>(e.station_pos)];
      max_ratio = std::max(max_ratio, e.gain / req.demand_kwh);
      auto& max_demand = index.station_max_demand[
          static_cast<std::size_t>(e.station_pos)];
      max_demand = std::max(max_demand, req.demand_kwh);
    }
  }

  for (GroupEntry& e : index.entries) {
    const Request& req =
        instance.requests[static_cast<std::size_t>(e.request_index)];
    const std::size_t p = static_cast<std::size_t>(e.station_pos);
    const double gmax = index.station_max_gain[p];
    const double rmax = index.station_max_ratio[p];
    e.norm_gain = gmax > 0.0 ? e.gain / gmax : 0.0;
    e.norm_ratio = rmax > 0.0 ? (e.gain / req.demand_kwh) / rmax : 0.0;
    const double demand_base = params.demand_norm == DemandNorm::GroupMax
                                   ? index.station_max_demand[p]
                                   : instance.capacity_kw;
    e.norm_demand =
        demand_base > 0.0
            ? std::clamp(req.demand_kwh / demand_base, 0.0, 1.0)
            : 0.0;
    e.q_band = band_of(e.norm_gain, params.Q);
    e.l_band = band_of(e.norm_gain, params.L);
    e.v_band = params.V - band_of(e.norm_demand, params.V) + 1;
  }

  // Canonical entry order: user id then station. Downstream accumulations
  // then sum in a fixed order, which keeps encodings bit-identical under
  // request permutations.
  std::sort(index.entries.begin(), index.entries.end(),
            [&](const GroupEntry& a, const GroupEntry& b) {
              const int ua = instance.requests[static_cast<std::size_t>(
                  a.request_index)].user_id;
              const int ub = instance.requests[static_cast<std::size_t>(
                  b.request_index)].user_id;
              if (ua != ub) return ua < ub;
              return a.station_pos < b.station_pos;
            });
  return index;
}

GroupIndex build_input_groups(const Instance& instance, int Q) {
  CodecParams params;
  params.Q = Q;
  return build_group_index(instance, params);
}

GroupIndex build_output_groups(const Instance& instance, int L, int V,
                               DemandNorm demand_norm) {
  CodecParams params;
  params.L = L;
  params.V = V;
  params.demand_norm = demand_norm;
  return build_group_index(instance, params);
}

int feature_length(int num_slots, int num_stations, int Q) {
  return num_slots + num_stations * (4 * Q + num_slots);
}

int label_length(int num_stations, const CodecParams& params) {
  return num_stations * params.L * params.V;
}

Eigen::VectorXd encode_features(const Instance& instance,
                                const CodecParams& params) {
  const int T = instance.num_slots();
  const int C = static_cast<int>(instance.stations.size());
  const GroupIndex index = build_group_index(instance, params);
  const double num_users = static_cast<double>(instance.requests.size());

  Eigen::VectorXd features =
      Eigen::VectorXd::Zero(feature_length(T, C, params.Q));

  for (int t = 0; t < T; ++t)
    features(t) = std::clamp(
        instance.capacity_kw > 0.0
            ? instance.base_load_kw[static_cast<std::size_t>(t)] /
                  instance.capacity_kw
            : 0.0,
        0.0, 1.0);

  // Per (station, band) accumulators for the four summary entities.
  const std::size_t nbands = static_cast<std::size_t>(C) * params.Q;
  std::vector<double> sum_demand(nbands, 0.0), sum_gain(nbands, 0.0),
      sum_ratio(nbands, 0.0);
  std::vector<int> count(nbands, 0);
  std::vector<int> slot_count(static_cast<std::size_t>(C) * T, 0);

  for (const GroupEntry& e : index.entries) {
    const Request& req =
        instance.requests[static_cast<std::size_t>(e.request_index)];
    const std::size_t band =
        static_cast<std::size_t>(e.station_pos) * params.Q +
        static_cast<std::size_t>(e.q_band - 1);
    const double capacity_demand =
        instance.capacity_kw > 0.0
            ? std::clamp(req.demand_kwh / instance.capacity_kw, 0.0, 1.0)
            : 0.0;
    sum_demand[band] += capacity_demand;
    sum_gain[band] += e.norm_gain;
    sum_ratio[band] += e.norm_ratio;
    count[band] += 1;
    const ChargingOption& opt =
        req.options[static_cast<std::size_t>(e.option_index)];
    for (const int t : opt.slots)
      slot_count[static_cast<std::size_t>(e.station_pos) * T + t] += 1;
  }

  for (int p = 0; p < C; ++p) {
    const int base = T + p * (4 * params.Q + T);
    for (int q = 0; q < params.Q; ++q) {
      const std::size_t band =
          static_cast<std::size_t>(p) * params.Q + static_cast<std::size_t>(q);
      const int k = count[band];
      const int at = base + 4 * q;
      if (k > 0) {
        features(at + 0) = sum_demand[band] / k;
        features(at + 1) = num_users > 0 ? k / num_users : 0.0;
        features(at + 2) = sum_gain[band] / k;
        features(at + 3) = sum_ratio[band] / k;
      }
    }
    int max_count = 0;
    for (int t = 0; t < T; ++t)
      max_count = std::max(
          max_count, slot_count[static_cast<std::size_t>(p) * T + t]);
    if (max_count > 0)
      for (int t = 0; t < T; ++t)
        features(base + 4 * params.Q + t) =
            static_cast<double>(
                slot_count[static_cast<std::size_t>(p) * T + t]) /
            max_count;
  }
  return features;
}

Eigen::VectorXd encode_label(const Instance& instance,
                             const Schedule& schedule,
                             const CodecParams& params) {
  const GroupIndex index = build_group_index(instance, params);
  Eigen::VectorXd label = Eigen::VectorXd::Zero(
      label_length(static_cast<int>(instance.stations.size()), params));

  for (const GroupEntry& e : index.entries) {
    const Request& req =
        instance.requests[static_cast<std::size_t>(e.request_index)];
    const auto assigned = schedule.station_of(req.user_id);
    if (!assigned.has_value()) continue;
    const ChargingOption& opt =
        req.options[static_cast<std::size_t>(e.option_index)];
    if (*assigned != opt.station) continue;
    label(index.cell_of(e)) += 1.0;
  }
  return label;
}

CodecSidecar sidecar_for(const Instance& instance, const CodecParams& params) {
  CodecSidecar sidecar;
  sidecar.num_slots = instance.num_slots();
  sidecar.num_stations = static_cast<int>(instance.stations.size());
  sidecar.params = params;
  sidecar.feature_len =
      feature_length(sidecar.num_slots, sidecar.num_stations, params.Q);
  sidecar.label_len = label_length(sidecar.num_stations, params);
  return sidecar;
}

namespace {

std::string demand_norm_name(DemandNorm norm) {
  return norm == DemandNorm::GroupMax ? "group-max" : "capacity";
}

DemandNorm demand_norm_from(const std::string& name) {
  if (name == "group-max") return DemandNorm::GroupMax;
  if (name == "capacity") return DemandNorm::Capacity;
  throw io_error("unknown demand_norm '" + name + "'");
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw io_error("bad numeric field '" + s + "'");
  return v;
}

}  // namespace

json sidecar_to_json(const CodecSidecar& s) {
  return json{{"format_version", s.format_version},
              {"num_slots", s.num_slots},
              {"num_stations", s.num_stations},
              {"Q", s.params.Q},
              {"L", s.params.L},
              {"V", s.params.V},
              {"demand_norm", demand_norm_name(s.params.demand_norm)},
              {"feature_len", s.feature_len},
              {"label_len", s.label_len}};
}

CodecSidecar sidecar_from_json(const json& j) {
  CodecSidecar s;
  try {
    s.format_version = j.at("format_version").get<int>();
    s.num_slots = j.at("num_slots").get<int>();
    s.num_stations = j.at("num_stations").get<int>();
    s.params.Q = j.at("Q").get<int>();
    s.params.L = j.at("L").get<int>();
    s.params.V = j.at("V").get<int>();
    s.params.demand_norm =
        demand_norm_from(j.at("demand_norm").get<std::string>());
    s.feature_len = j.at("feature_len").get<int>();
    s.label_len = j.at("label_len").get<int>();
  } catch (const json::exception& e) {
    throw io_error(std::string("malformed codec sidecar: ") + e.what());
  }
  if (s.format_version != 1) throw io_error("unsupported sidecar version");
  return s;
}

std::string sidecar_path_for(const std::string& dataset_path) {
  const std::size_t dot = dataset_path.find_last_of('.');
  const std::size_t slash = dataset_path.find_last_of("/\\");
  const bool has_ext =
      dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? dataset_path.substr(0, dot) : dataset_path) +
         ".sidecar.json";
}

void write_dataset(const Dataset& dataset, const std::string& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + csv_path + "'");
  out << "instance_path,label_method";
  for (int i = 0; i < dataset.sidecar.feature_len; ++i) out << ",f" << i;
  for (int i = 0; i < dataset.sidecar.label_len; ++i) out << ",y" << i;
  out << "\n";
  for (int s = 0; s < dataset.size(); ++s) {
    out << dataset.instance_paths[static_cast<std::size_t>(s)] << ','
        << dataset.label_methods[static_cast<std::size_t>(s)];
    for (int i = 0; i < dataset.sidecar.feature_len; ++i)
      out << ',' << format_double(dataset.features(i, s));
    for (int i = 0; i < dataset.sidecar.label_len; ++i)
      out << ',' << format_double(dataset.labels(i, s));
    out << "\n";
  }
  if (!out) throw io_error("short write to '" + csv_path + "'");

  std::ofstream side(sidecar_path_for(csv_path), std::ios::binary);
  if (!side)
    throw io_error("cannot write '" + sidecar_path_for(csv_path) + "'");
  side << sidecar_to_json(dataset.sidecar).dump(2) << "\n";
}

Dataset read_dataset(const std::string& csv_path) {
  Dataset dataset;
  {
    std::ifstream side(sidecar_path_for(csv_path));
    if (!side)
      throw io_error("missing sidecar '" + sidecar_path_for(csv_path) + "'");
    json j;
    try {
      side >> j;
    } catch (const json::exception& e) {
      throw io_error(std::string("malformed sidecar JSON: ") + e.what());
    }
    dataset.sidecar = sidecar_from_json(j);
  }

  std::ifstream in(csv_path);
  if (!in) throw io_error("cannot open '" + csv_path + "'");
  std::string line;
  if (!std::getline(in, line)) throw io_error("'" + csv_path + "' is empty");

  const int F = dataset.sidecar.feature_len;
  const int K = dataset.sidecar.label_len;
  std::vector<std::vector<double>> feature_rows, label_rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (static_cast<int>(fields.size()) != 2 + F + K)
      throw io_error("dataset row has wrong number of columns");
    dataset.instance_paths.push_back(fields[0]);
    dataset.label_methods.push_back(fields[1]);
    std::vector<double> f(static_cast<std::size_t>(F)),
        y(static_cast<std::size_t>(K));
    for (int i = 0; i < F; ++i)
      f[static_cast<std::size_t>(i)] =
          parse_double(fields[static_cast<std::size_t>(2 + i)]);
    for (int i = 0; i < K; ++i)
      y[static_cast<std::size_t>(i)] =
          parse_double(fields[static_cast<std::size_t>(2 + F + i)]);
    feature_rows.push_back(std::move(f));
    label_rows.push_back(std::move(y));
  }

  const int N = static_cast<int>(feature_rows.size());
  dataset.features.resize(F, N);
  dataset.labels.resize(K, N);
  for (int s = 0; s < N; ++s) {
    for (int i = 0; i < F; ++i)
      dataset.features(i, s) =
          feature_rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
    for (int i = 0; i < K; ++i)
      dataset.labels(i, s) =
          label_rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
  }
  return dataset;
}

}  // namespace evcrp::codec
