#include "evcrp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "evcrp/errors.hpp"
#include "evcrp/feasibility.hpp"
#include "evcrp/greedy.hpp"
#include "evcrp/json_io.hpp"
#include "evcrp/postproc.hpp"
#include "evcrp/relaxation.hpp"
#include "evcrp/rng.hpp"

namespace evcrp::bench {

using nlohmann::json;

std::string method_name(Method method) {
  switch (method) {
    case Method::Exact: return "exact";
    case Method::GreedyU: return "greedy-u";
    case Method::PtasStar: return "ptas-star";
    case Method::DcleverNet: return "dclevernet";
  }
  return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "exact") return Method::Exact;
  if (name == "greedy-u") return Method::GreedyU;
  if (name == "ptas-star") return Method::PtasStar;
  if (name == "dclevernet") return Method::DcleverNet;
  return std::nullopt;
}

double approx_ratio(const Solution& solution, const Solution& reference) {
  if (!(reference.objective > 0.0))
    throw std::invalid_argument(
        "approximation ratio undefined for non-positive reference");
  return solution.objective / reference.objective;
}

namespace {

struct InstanceResult {
  std::vector<Solution> solutions; // one per config method
  std::vector<RunRow> rows;
  double reference_objective = 0.0;
  double lp_upper_bound = 0.0;
};

Solution run_method(const Instance& instance, Method method,
                    const BenchConfig& config, const nn::LoadedModel* model,
                    std::uint64_t method_seed) {
  switch (method) {
    case Method::Exact:
      return oracle::solve_exact(instance, config.exact_limits);
    case Method::GreedyU:
      return greedy::greedy_u(instance);
    case Method::PtasStar:
      return lp::ptas_star(instance, config.ptas_guesses,
                           config.ptas_max_guess_size, method_seed);
    case Method::DcleverNet: {
      if (model == nullptr)
        throw solve_error("dclevernet requested without a model");
      const auto start = std::chrono::steady_clock::now();
      const codec::CodecSidecar want =
          codec::sidecar_for(instance, model->sidecar.params);
      if (!(want == model->sidecar))
        throw codec_mismatch_error(
            "instance does not match the model's codec sidecar");
      const Eigen::VectorXd features =
          codec::encode_features(instance, model->sidecar.params);
      const Eigen::VectorXd prediction = nn::forward(model->network, features);
      Solution solution = postproc::extract_solution(
          instance, prediction, model->sidecar.params);
      solution.wall_time_s = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
      return solution;
    }
  }
  throw std::logic_error("unreachable");
}

// Median-of-repetitions timing; objectives are deterministic so the first
// run's solution is kept.
Solution timed_method(const Instance& instance, Method method,
                      const BenchConfig& config, const nn::LoadedModel* model,
                      std::uint64_t method_seed) {
  Solution kept = run_method(instance, method, config, model, method_seed);
  if (config.repetitions > 1) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(config.repetitions));
    times.push_back(kept.wall_time_s);
    for (int r = 1; r < config.repetitions; ++r)
      times.push_back(
          run_method(instance, method, config, model, method_seed)
              .wall_time_s);
    std::sort(times.begin(), times.end());
    kept.wall_time_s = times[times.size() / 2];
  }
  return kept;
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& config) {
  if (config.methods.empty())
    throw std::invalid_argument("no methods requested");

  const bool wants_dclevernet =
      std::find(config.methods.begin(), config.methods.end(),
                Method::DcleverNet) != config.methods.end();
  nn::LoadedModel model;
  if (wants_dclevernet) {
    if (config.model_path.empty())
      throw solve_error("dclevernet requires a trained model file");
    model = nn::load_model(config.model_path);
  }

  // Materialize instance descriptors up front so workers stay independent.
  const int count = config.use_generator
                        ? config.num_instances
                        : static_cast<int>(config.instance_files.size());
  if (count <= 0) throw std::invalid_argument("no instances to benchmark");

  BenchReport report;
  report.instance_ids.resize(static_cast<std::size_t>(count));
  report.reference_objectives.assign(static_cast<std::size_t>(count), 0.0);
  if (config.reference == Reference::BestKnown)
    report.lp_upper_bounds.assign(static_cast<std::size_t>(count), 0.0);

  std::vector<InstanceResult> results(static_cast<std::size_t>(count));
  const Rng root(config.seed);

  auto process_instance = [&](int idx) {
    Instance instance;
    if (config.use_generator) {
      gen::GenParams params = config.gen_params;
      params.seed = root.child(static_cast<std::uint64_t>(idx)).seed();
      instance = gen::generate_synthetic(params);
      std::ostringstream id;
      id << "gen-" << config.gen_params.seed << "-" << idx;
      report.instance_ids[static_cast<std::size_t>(idx)] = id.str();
    } else {
      instance =
          load_instance(config.instance_files[static_cast<std::size_t>(idx)]);
      report.instance_ids[static_cast<std::size_t>(idx)] =
          config.instance_files[static_cast<std::size_t>(idx)];
    }

    InstanceResult& result = results[static_cast<std::size_t>(idx)];
    const nn::LoadedModel* model_ptr = wants_dclevernet ? &model : nullptr;
    for (const Method method : config.methods) {
      const std::uint64_t method_seed =
          root.child(0x517e0000ULL + static_cast<std::uint64_t>(idx)).seed();
      result.solutions.push_back(
          timed_method(instance, method, config, model_ptr, method_seed));
    }

    if (config.reference == Reference::Exact) {
      const Solution* exact = nullptr;
      for (std::size_t m = 0; m < config.methods.size(); ++m)
        if (config.methods[m] == Method::Exact)
          exact = &result.solutions[m];
      if (exact != nullptr) {
        result.reference_objective = exact->objective;
      } else {
        result.reference_objective =
            oracle::solve_exact(instance, config.exact_limits).objective;
      }
    } else {
      double best = 0.0;
      for (const Solution& s : result.solutions)
        best = std::max(best, s.objective);
      result.reference_objective = best;
      result.lp_upper_bound = lp::solve_lp_relaxation(instance).objective;
    }

    // Every benchmarked schedule must stand a from-scratch feasibility
    // check; record it in the rows.
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      RunRow row;
      row.instance_index = idx;
      row.instance_id = report.instance_ids[static_cast<std::size_t>(idx)];
      row.method = config.methods[m];
      const Solution& s = result.solutions[m];
      row.objective = s.objective;
      row.wall_s = s.wall_time_s;
      row.optimal = s.optimal;
      row.feasible = check_feasibility(instance, s.schedule).feasible;
      if (result.reference_objective > 0.0) {
        row.ratio = s.objective / result.reference_objective;
        row.ratio_defined = true;
      }
      result.rows.push_back(row);
    }
  };

  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, count);

  if (workers == 1) {
    for (int i = 0; i < count; ++i) process_instance(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(
        static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          while (true) {
            const int idx = next.fetch_add(1);
            if (idx >= count) break;
            process_instance(idx);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
          next.store(count); // drain remaining work
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Stitch rows back in instance order so reruns compare bit-for-bit.
  for (int i = 0; i < count; ++i) {
    const InstanceResult& result = results[static_cast<std::size_t>(i)];
    report.reference_objectives[static_cast<std::size_t>(i)] =
        result.reference_objective;
    if (config.reference == Reference::BestKnown)
      report.lp_upper_bounds[static_cast<std::size_t>(i)] =
          result.lp_upper_bound;
    for (const RunRow& row : result.rows) report.rows.push_back(row);
  }

  for (const Method method : config.methods) {
    MethodAggregate agg;
    agg.min_ratio = std::numeric_limits<double>::infinity();
    agg.max_ratio = -std::numeric_limits<double>::infinity();
    double ratio_sum = 0.0, wall_sum = 0.0;
    int ratio_count = 0, wall_count = 0;
    for (const RunRow& row : report.rows) {
      if (row.method != method) continue;
      wall_sum += row.wall_s;
      ++wall_count;
      if (!row.ratio_defined) continue;
      ratio_sum += row.ratio;
      agg.min_ratio = std::min(agg.min_ratio, row.ratio);
      agg.max_ratio = std::max(agg.max_ratio, row.ratio);
      ++ratio_count;
    }
    agg.count = wall_count;
    agg.mean_ratio = ratio_count > 0 ? ratio_sum / ratio_count : 0.0;
    if (ratio_count == 0) {
      agg.min_ratio = 0.0;
      agg.max_ratio = 0.0;
    }
    agg.mean_wall_s = wall_count > 0 ? wall_sum / wall_count : 0.0;
    report.aggregates[method_name(method)] = agg;
  }
  return report;
}

void write_report_csv(const BenchReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "instance,method,objective,ratio,feasible,optimal,wall_ms\n";
  out.precision(12);
  for (const RunRow& row : report.rows) {
    out << row.instance_id << ',' << method_name(row.method) << ','
        << row.objective << ',';
    if (row.ratio_defined) out << row.ratio;
    out << ',' << (row.feasible ? 1 : 0) << ',' << (row.optimal ? 1 : 0)
        << ',' << row.wall_s * 1e3 << "\n";
  }
  if (!out) throw io_error("short write to '" + path + "'");
}

void write_report_json(const BenchReport& report, const std::string& path) {
  json j;
  json aggregates = json::object();
  for (const auto& [name, agg] : report.aggregates)
    aggregates[name] = {{"count", agg.count},
                        {"mean_ratio", agg.mean_ratio},
                        {"min_ratio", agg.min_ratio},
                        {"max_ratio", agg.max_ratio},
                        {"mean_wall_ms", agg.mean_wall_s * 1e3}};
  j["aggregates"] = std::move(aggregates);
  j["instances"] = report.instance_ids;
  j["reference_objectives"] = report.reference_objectives;
  if (!report.lp_upper_bounds.empty())
    j["lp_upper_bounds"] = report.lp_upper_bounds;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace evcrp::bench
