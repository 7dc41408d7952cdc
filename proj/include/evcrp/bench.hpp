#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evcrp/codec.hpp"
#include "evcrp/gen.hpp"
#include "evcrp/instance.hpp"
#include "evcrp/network.hpp"
#include "evcrp/oracle.hpp"
#include "evcrp/solution.hpp"

namespace evcrp::bench {

enum class Method { Exact, GreedyU, PtasStar, DcleverNet };

std::string method_name(Method method);
std::optional<Method> method_from_name(const std::string& name);

enum class Reference { Exact, BestKnown };

struct BenchConfig {
  // Instance source: generated per seed, or loaded from files.
  bool use_generator = true;
  gen::GenParams gen_params;
  int num_instances = 10;
  std::vector<std::string> instance_files;

  std::vector<Method> methods;
  // Exact references divide each objective by the proven optimum; at
  // scales where that is out of budget, BestKnown divides by the best
  // objective across methods and reports the LP upper bound alongside.
  Reference reference = Reference::Exact;
  int repetitions = 3; // timing repetitions per (instance, method), median
  std::uint64_t seed = 0;

  oracle::SearchLimits exact_limits = bench_limits();
  int ptas_guesses = 250;
  int ptas_max_guess_size = 3;
  std::string model_path; // required when DcleverNet is requested
  int workers = 0;        // 0 -> hardware concurrency

  static oracle::SearchLimits bench_limits() {
    oracle::SearchLimits limits;
    limits.gap_tolerance = 1e-6;
    return limits;
  }
};

struct RunRow {
  int instance_index = 0;
  std::string instance_id;
  Method method = Method::GreedyU;
  double objective = 0.0;
  bool ratio_defined = false;
  double ratio = 0.0;
  double wall_s = 0.0;
  bool feasible = false;
  bool optimal = false;
};

struct MethodAggregate {
  int count = 0;
  double mean_ratio = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double mean_wall_s = 0.0;
};

struct BenchReport {
  std::vector<RunRow> rows; // instance-major, then method order
  std::map<std::string, MethodAggregate> aggregates;
  std::vector<std::string> instance_ids;
  std::vector<double> reference_objectives;
  std::vector<double> lp_upper_bounds; // filled for BestKnown references
};

// objective / reference objective. Throws std::invalid_argument when the
// reference objective is not positive; the harness reports such ratios as
// undefined and leaves them out of aggregates.
double approx_ratio(const Solution& solution, const Solution& reference);

BenchReport run_benchmark(const BenchConfig& config);

// One row per instance x method; wall times in milliseconds.
void write_report_csv(const BenchReport& report, const std::string& path);
void write_report_json(const BenchReport& report, const std::string& path);

}  // namespace evcrp::bench
