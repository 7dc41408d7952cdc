#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <string>
#include <vector>

#include "evcrp/instance.hpp"

namespace evcrp::codec {

// Demand normalization for the output v-bands: relative to the largest
// demand in the station group (default) or to the network capacity.
enum class DemandNorm { GroupMax, Capacity };

struct CodecParams {
  int Q = 4;  // input gain bands per station
  int L = 10; // output gain bands per station
  int V = 10; // output demand bands per station
  DemandNorm demand_norm = DemandNorm::GroupMax;
  bool operator==(const CodecParams&) const = default;
};

// Band index in 1..bands for a normalized value: (i-1)/n < x <= i/n, with
// x <= 0 landing in band 1.
int band_of(double normalized, int bands);

// One row per (request, option): the input band and output cell the pair
// belongs to, with the normalizations that produced them.
struct GroupEntry {
  int request_index = 0;
  int option_index = 0;
  int station_pos = 0;    // position in the id-sorted station order
  double gain = 0.0;      // per-option conditional gain
  double norm_gain = 0.0; // gain / station group max
  double norm_ratio = 0.0;
  double norm_demand = 0.0; // per demand_norm mode
  int q_band = 1;           // 1..Q
  int l_band = 1;           // 1..L, L holds the highest normalized gains
  int v_band = 1;           // 1..V, 1 holds the largest normalized demands
};

struct GroupIndex {
  CodecParams params;
  std::vector<int> station_order; // station indices sorted by station id
  std::vector<GroupEntry> entries;
  std::vector<double> station_max_gain;   // indexed by station_pos
  std::vector<double> station_max_ratio;
  std::vector<double> station_max_demand;

  // Flat output cell, enumerated per station with gain bands descending
  // and demand bands ascending: cell 0 of a station holds the highest-gain
  // lowest-demand users.
  int cell_of(const GroupEntry& e) const {
    return e.station_pos * params.L * params.V +
           (params.L - e.l_band) * params.V + (params.V - e.v_band);
  }
  int num_cells() const {
    return static_cast<int>(station_order.size()) * params.L * params.V;
  }
};

GroupIndex build_group_index(const Instance& instance,
                             const CodecParams& params);

// Input-side grouping only (Eq.-style Q bands on normalized gains).
GroupIndex build_input_groups(const Instance& instance, int Q);

// Output-side grouping only (L gain bands crossed with V demand bands).
GroupIndex build_output_groups(const Instance& instance, int L, int V,
                               DemandNorm demand_norm);

// T + |C| * (4Q + T): base-load profile, four summary entries per gain
// band per station, and a per-slot request count per station. Never
// depends on the number of requests.
int feature_length(int num_slots, int num_stations, int Q);
int label_length(int num_stations, const CodecParams& params);

// Fixed-length, permutation- and scale-invariant instance encoding; every
// entry lies in [0, 1].
Eigen::VectorXd encode_features(const Instance& instance,
                                const CodecParams& params);

// Per-cell counts of accepted users in the schedule; raw counts.
Eigen::VectorXd encode_label(const Instance& instance,
                             const Schedule& schedule,
                             const CodecParams& params);

// Describes the codec a dataset or model was built against; mismatched
// sidecars must be refused.
struct CodecSidecar {
  int format_version = 1;
  int num_slots = 0;
  int num_stations = 0;
  CodecParams params;
  int feature_len = 0;
  int label_len = 0;
  bool operator==(const CodecSidecar&) const = default;
};

CodecSidecar sidecar_for(const Instance& instance, const CodecParams& params);
nlohmann::json sidecar_to_json(const CodecSidecar& sidecar);
CodecSidecar sidecar_from_json(const nlohmann::json& j);

struct Dataset {
  CodecSidecar sidecar;
  std::vector<std::string> instance_paths;
  std::vector<std::string> label_methods;
  Eigen::MatrixXd features; // feature_len x N
  Eigen::MatrixXd labels;   // label_len x N

  int size() const { return static_cast<int>(features.cols()); }
};

// CSV with one row per instance plus a JSON sidecar next to it. Doubles
// are written in shortest round-trip form, so write/read is bit-exact.
std::string sidecar_path_for(const std::string& dataset_path);
void write_dataset(const Dataset& dataset, const std::string& csv_path);
Dataset read_dataset(const std::string& csv_path);

}  // namespace evcrp::codec
