// Command-line front end: generate | ingest-acn | label | encode | train |
// solve | bench. Every subcommand accepts --seed and --config and prints a
// single machine-readable JSON summary line on success.
//
// Exit codes: 0 success, 1 usage, 2 malformed input, 3 infeasible or failed
// solve, 4 codec/model mismatch.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "evcrp/bench.hpp"
#include "evcrp/codec.hpp"
#include "evcrp/errors.hpp"
#include "evcrp/feasibility.hpp"
#include "evcrp/gen.hpp"
#include "evcrp/greedy.hpp"
#include "evcrp/json_io.hpp"
#include "evcrp/network.hpp"
#include "evcrp/oracle.hpp"
#include "evcrp/postproc.hpp"
#include "evcrp/relaxation.hpp"
#include "evcrp/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace evcrp;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitFailedSolve = 3;
constexpr int kExitCodecMismatch = 4;

// Configuration file overlay: flags wins over config, config over defaults.
class Config {
 public:
  void load(const std::string& path) {
    try {
      root_ = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
      throw io_error("cannot parse config '" + path + "': " + e.what());
    }
    if (!root_.is_object()) throw io_error("config must be a JSON object");
  }

  template <typename T>
  void overlay(const CLI::Option* opt, const std::string& section,
               const std::string& key, T& value) const {
    if (opt != nullptr && opt->count() > 0) return; // explicit flag wins
    const json* node = find(section, key);
    if (node == nullptr) return;
    try {
      value = node->get<T>();
    } catch (const json::exception& e) {
      throw io_error("config field " + section + "." + key + ": " + e.what());
    }
  }

  const json* find(const std::string& section, const std::string& key) const {
    if (!root_.contains(section)) return nullptr;
    const json& s = root_.at(section);
    if (!s.is_object() || !s.contains(key)) return nullptr;
    return &s.at(key);
  }

  bool has(const std::string& section) const { return root_.contains(section); }
  const json& section(const std::string& name) const { return root_.at(name); }

 private:
  json root_ = json::object();
};

// Instance sources are a directory, a single file, or a glob with '*' in
// the basename. Results are sorted for reproducible ordering.
std::vector<std::string> expand_instances(const std::string& pattern) {
  std::vector<std::string> files;
  const fs::path p(pattern);
  if (fs::is_directory(p)) {
    for (const auto& entry : fs::directory_iterator(p))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path().string());
  } else if (pattern.find('*') != std::string::npos) {
    const fs::path dir =
        p.parent_path().empty() ? fs::path(".") : p.parent_path();
    const std::string pat = p.filename().string();
    const std::size_t star = pat.find('*');
    const std::string prefix = pat.substr(0, star);
    const std::string suffix = pat.substr(star + 1);
    if (!fs::is_directory(dir))
      throw io_error("no such directory: '" + dir.string() + "'");
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (name.size() >= prefix.size() + suffix.size() &&
          name.compare(0, prefix.size(), prefix) == 0 &&
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) ==
              0)
        files.push_back(entry.path().string());
    }
  } else if (fs::is_regular_file(p)) {
    files.push_back(pattern);
  }
  if (files.empty())
    throw io_error("no instance files match '" + pattern + "'");
  std::sort(files.begin(), files.end());
  return files;
}

std::string apply_out_dir_override(const std::string& path) {
  const char* base = std::getenv("EVCRP_OUT_DIR");
  if (base == nullptr || *base == '\0') return path;
  return (fs::path(base) / fs::path(path).filename()).string();
}

std::string prepared_out_path(const std::string& path) {
  const std::string redirected = apply_out_dir_override(path);
  const fs::path parent = fs::path(redirected).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  return redirected;
}

int env_workers(int fallback) {
  const char* w = std::getenv("EVCRP_WORKERS");
  if (w == nullptr || *w == '\0') return fallback;
  return std::max(1, std::atoi(w));
}

void print_summary(const json& j) { std::cout << j.dump() << std::endl; }

gen::UtilityMode utility_mode_from(const std::string& name) {
  if (name == "linear") return gen::UtilityMode::Linear;
  if (name == "random") return gen::UtilityMode::Random;
  throw io_error("utility mode must be 'linear' or 'random'");
}

codec::DemandNorm demand_norm_from(const std::string& name) {
  if (name == "group-max") return codec::DemandNorm::GroupMax;
  if (name == "capacity") return codec::DemandNorm::Capacity;
  throw io_error("demand norm must be 'group-max' or 'capacity'");
}

// Shared generator flag block, reused by generate / ingest-acn / bench.
struct GenFlags {
  int num_users = 100;
  double capacity_kw = 1000.0;
  int num_slots = 96;
  double slot_hours = 0.25;
  int load_profile = 1;
  std::string utility_mode = "linear";
  double utility_lo = 5000.0;
  double utility_hi = 8000.0;
  int num_evse = 200;
  std::vector<double> rates = {1.5, 7.0, 50.0};

  struct Opts {
    CLI::Option* users;
    CLI::Option* capacity;
    CLI::Option* slots;
    CLI::Option* slot_hours;
    CLI::Option* profile;
    CLI::Option* utility_mode;
    CLI::Option* utility_lo;
    CLI::Option* utility_hi;
    CLI::Option* num_evse;
    CLI::Option* rates;
  } opts{};

  void attach(CLI::App* cmd) {
    opts.users = cmd->add_option("--users", num_users, "users per instance");
    opts.capacity =
        cmd->add_option("--capacity", capacity_kw, "network capacity in kW");
    opts.slots = cmd->add_option("--slots", num_slots, "slots in the horizon");
    opts.slot_hours =
        cmd->add_option("--slot-hours", slot_hours, "slot length in hours");
    opts.profile =
        cmd->add_option("--profile", load_profile, "base load profile id");
    opts.utility_mode = cmd->add_option("--utility-mode", utility_mode,
                                        "'linear' or 'random'");
    opts.utility_lo = cmd->add_option("--utility-lo", utility_lo,
                                      "random utility lower bound");
    opts.utility_hi = cmd->add_option("--utility-hi", utility_hi,
                                      "random utility upper bound");
    opts.num_evse =
        cmd->add_option("--nc", num_evse, "EVSE count per station");
    opts.rates = cmd->add_option("--rates", rates,
                                 "station charging rates in kW")
                     ->delimiter(',');
  }

  void overlay(const Config& config, const std::string& section) {
    config.overlay(opts.users, section, "num_users", num_users);
    config.overlay(opts.capacity, section, "capacity_kw", capacity_kw);
    config.overlay(opts.slots, section, "num_slots", num_slots);
    config.overlay(opts.slot_hours, section, "slot_hours", slot_hours);
    config.overlay(opts.profile, section, "load_profile", load_profile);
    config.overlay(opts.utility_mode, section, "utility_mode", utility_mode);
    config.overlay(opts.utility_lo, section, "utility_lo", utility_lo);
    config.overlay(opts.utility_hi, section, "utility_hi", utility_hi);
    config.overlay(opts.num_evse, section, "num_evse", num_evse);
    config.overlay(opts.rates, section, "rates", rates);
  }

  gen::GenParams params(std::uint64_t seed) const {
    gen::GenParams p;
    p.num_users = num_users;
    p.capacity_kw = capacity_kw;
    p.horizon = {num_slots, slot_hours};
    p.load_profile = load_profile;
    p.utility_mode = utility_mode_from(utility_mode);
    p.utility_lo = utility_lo;
    p.utility_hi = utility_hi;
    p.seed = seed;
    p.stations.clear();
    for (std::size_t i = 0; i < rates.size(); ++i)
      p.stations.push_back(
          {static_cast<int>(i), rates[i], num_evse});
    return p;
  }
};

struct CodecFlags {
  int Q = 4, L = 10, V = 10;
  std::string demand_norm = "group-max";

  struct Opts {
    CLI::Option* q;
    CLI::Option* l;
    CLI::Option* v;
    CLI::Option* norm;
  } opts{};

  void attach(CLI::App* cmd) {
    opts.q = cmd->add_option("--Q", Q, "input gain bands per station");
    opts.l = cmd->add_option("--L", L, "output gain bands per station");
    opts.v = cmd->add_option("--V", V, "output demand bands per station");
    opts.norm = cmd->add_option("--demand-norm", demand_norm,
                                "'group-max' or 'capacity'");
  }

  void overlay(const Config& config) {
    config.overlay(opts.q, "codec", "Q", Q);
    config.overlay(opts.l, "codec", "L", L);
    config.overlay(opts.v, "codec", "V", V);
    config.overlay(opts.norm, "codec", "demand_norm", demand_norm);
  }

  codec::CodecParams params() const {
    codec::CodecParams p;
    p.Q = Q;
    p.L = L;
    p.V = V;
    p.demand_norm = demand_norm_from(demand_norm);
    return p;
  }
};

std::string label_path_for(const std::string& label_dir,
                           const std::string& instance_path) {
  return (fs::path(label_dir) / fs::path(instance_path).stem())
             .string() +
         ".schedule.json";
}

Solution solve_with_method(const Instance& instance, const std::string& method,
                           const oracle::SearchLimits& limits, int guesses,
                           int max_guess_size, const std::string& model_path,
                           std::uint64_t seed) {
  if (method == "exact") return oracle::solve_exact(instance, limits);
  if (method == "greedy-u") return greedy::greedy_u(instance);
  if (method == "ptas-star")
    return lp::ptas_star(instance, guesses, max_guess_size, seed);
  if (method == "dclevernet") {
    if (model_path.empty())
      throw solve_error("dclevernet needs --model <file>");
    const nn::LoadedModel model = nn::load_model(model_path);
    const codec::CodecSidecar want =
        codec::sidecar_for(instance, model.sidecar.params);
    if (!(want == model.sidecar))
      throw codec_mismatch_error(
          "instance codec does not match the model (check T, stations, "
          "Q/L/V, demand norm)");
    const Eigen::VectorXd features =
        codec::encode_features(instance, model.sidecar.params);
    const Eigen::VectorXd prediction = nn::forward(model.network, features);
    return postproc::extract_solution(instance, prediction,
                                      model.sidecar.params);
  }
  throw io_error("unknown method '" + method + "'");
}

int run(int argc, char** argv) {
  CLI::App app{"EVCRP toolkit: instance generation, exact labeling, "
               "LP/greedy baselines, learned scheduling, benchmarking"};
  app.require_subcommand(1);
  app.fallthrough(); // --seed/--config may follow the subcommand name

  std::string config_path;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config file")
      ->configurable(false);
  CLI::Option* seed_opt = app.add_option("--seed", seed, "root RNG seed");

  Config config;

  // ---- generate ----
  auto* cmd_generate =
      app.add_subcommand("generate", "write synthetic instance files");
  GenFlags gen_flags;
  gen_flags.attach(cmd_generate);
  int gen_count = 1;
  std::string gen_out;
  CLI::Option* gen_count_opt =
      cmd_generate->add_option("--count", gen_count, "instances to generate");
  CLI::Option* gen_out_opt =
      cmd_generate->add_option("--out", gen_out, "output directory");

  // ---- ingest-acn ----
  auto* cmd_ingest =
      app.add_subcommand("ingest-acn", "build an instance from an ACN CSV");
  GenFlags ingest_flags;
  ingest_flags.attach(cmd_ingest);
  std::string ingest_csv, ingest_out;
  CLI::Option* ingest_csv_opt =
      cmd_ingest->add_option("--csv", ingest_csv, "session log CSV");
  CLI::Option* ingest_out_opt =
      cmd_ingest->add_option("--out", ingest_out, "output instance file");

  // ---- label ----
  auto* cmd_label = app.add_subcommand(
      "label", "solve instances exactly and write schedule labels");
  std::string label_instances, label_out;
  double label_time_budget = 0.0; // 0 = unlimited
  std::int64_t label_node_budget = 0;
  bool label_no_lp = false;
  CLI::Option* label_in_opt = cmd_label->add_option(
      "--instances", label_instances, "instance dir or glob");
  CLI::Option* label_out_opt =
      cmd_label->add_option("--out", label_out, "label output directory");
  CLI::Option* label_tb_opt = cmd_label->add_option(
      "--time-budget", label_time_budget, "seconds per instance, 0 = off");
  CLI::Option* label_nb_opt = cmd_label->add_option(
      "--node-budget", label_node_budget, "search nodes per instance, 0 = off");
  cmd_label->add_flag("--no-lp-bound", label_no_lp,
                      "bound with gain sums only");

  // ---- encode ----
  auto* cmd_encode = app.add_subcommand(
      "encode", "turn labeled instances into a training dataset");
  CodecFlags encode_codec;
  encode_codec.attach(cmd_encode);
  std::string encode_instances, encode_labels, encode_out;
  CLI::Option* encode_in_opt = cmd_encode->add_option(
      "--instances", encode_instances, "instance dir or glob");
  CLI::Option* encode_labels_opt =
      cmd_encode->add_option("--labels", encode_labels, "label directory");
  CLI::Option* encode_out_opt =
      cmd_encode->add_option("--out", encode_out, "dataset CSV path");

  // ---- train ----
  auto* cmd_train =
      app.add_subcommand("train", "fit the network on a dataset");
  std::string train_dataset, train_out, train_arch = "paper",
              train_report_path;
  int train_epochs = 200, train_batch = 32;
  double train_lr = 1e-3, train_val_fraction = 0.2, train_clip = 10.0;
  std::vector<int> train_hidden;
  CLI::Option* train_ds_opt =
      cmd_train->add_option("--dataset", train_dataset, "dataset CSV");
  CLI::Option* train_out_opt =
      cmd_train->add_option("--out", train_out, "model output path");
  CLI::Option* train_arch_opt = cmd_train->add_option(
      "--arch", train_arch, "'paper' (800..50) or 'desk' (256..32)");
  CLI::Option* train_hidden_opt =
      cmd_train->add_option("--hidden", train_hidden,
                            "explicit hidden layer widths")
          ->delimiter(',');
  CLI::Option* train_epochs_opt =
      cmd_train->add_option("--epochs", train_epochs, "training epochs");
  CLI::Option* train_batch_opt =
      cmd_train->add_option("--batch-size", train_batch, "minibatch size");
  CLI::Option* train_lr_opt =
      cmd_train->add_option("--learning-rate", train_lr, "Adam step size");
  CLI::Option* train_val_opt = cmd_train->add_option(
      "--val-fraction", train_val_fraction, "validation share of the data");
  CLI::Option* train_clip_opt = cmd_train->add_option(
      "--clip-norm", train_clip, "global gradient norm cap");
  CLI::Option* train_report_opt = cmd_train->add_option(
      "--report", train_report_path, "write per-epoch losses to this JSON");

  // ---- solve ----
  auto* cmd_solve = app.add_subcommand("solve", "solve one instance file");
  std::string solve_instance, solve_method = "greedy-u", solve_out,
              solve_model;
  int solve_guesses = 250, solve_max_guess = 3;
  double solve_time_budget = 0.0, solve_gap = 1e-6;
  CLI::Option* solve_in_opt =
      cmd_solve->add_option("--instance", solve_instance, "instance file");
  CLI::Option* solve_method_opt = cmd_solve->add_option(
      "--method", solve_method, "exact | greedy-u | ptas-star | dclevernet");
  CLI::Option* solve_out_opt =
      cmd_solve->add_option("--out", solve_out, "schedule output file");
  CLI::Option* solve_model_opt =
      cmd_solve->add_option("--model", solve_model, "model for dclevernet");
  CLI::Option* solve_guesses_opt = cmd_solve->add_option(
      "--guesses", solve_guesses, "ptas-star guess count");
  CLI::Option* solve_max_guess_opt = cmd_solve->add_option(
      "--max-guess-size", solve_max_guess, "ptas-star pins per guess");
  CLI::Option* solve_tb_opt = cmd_solve->add_option(
      "--time-budget", solve_time_budget, "exact time budget, 0 = off");
  CLI::Option* solve_gap_opt =
      cmd_solve->add_option("--gap", solve_gap, "exact gap tolerance");

  // ---- bench ----
  auto* cmd_bench = app.add_subcommand(
      "bench", "compare methods over generated or stored instances");
  GenFlags bench_flags;
  bench_flags.attach(cmd_bench);
  std::vector<std::string> bench_methods = {"exact", "greedy-u"};
  std::string bench_reference = "exact", bench_out, bench_instances,
              bench_model;
  int bench_count = 10, bench_reps = 3, bench_guesses = 250,
      bench_workers = 0;
  CLI::Option* bench_methods_opt =
      cmd_bench->add_option("--methods", bench_methods, "methods to run")
          ->delimiter(',');
  CLI::Option* bench_ref_opt = cmd_bench->add_option(
      "--reference", bench_reference, "'exact' or 'best-known'");
  CLI::Option* bench_out_opt = cmd_bench->add_option(
      "--out", bench_out, "report path prefix (.csv/.json appended)");
  CLI::Option* bench_in_opt = cmd_bench->add_option(
      "--instances", bench_instances, "instance files instead of generation");
  CLI::Option* bench_count_opt = cmd_bench->add_option(
      "--count", bench_count, "generated instances to benchmark");
  CLI::Option* bench_reps_opt = cmd_bench->add_option(
      "--reps", bench_reps, "timing repetitions per cell");
  CLI::Option* bench_model_opt =
      cmd_bench->add_option("--model", bench_model, "model for dclevernet");
  CLI::Option* bench_guesses_opt = cmd_bench->add_option(
      "--guesses", bench_guesses, "ptas-star guess count");
  CLI::Option* bench_workers_opt = cmd_bench->add_option(
      "--workers", bench_workers, "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  if (!config_path.empty()) config.load(config_path);
  config.overlay(seed_opt, "root", "seed", seed);

  if (cmd_generate->parsed()) {
    gen_flags.overlay(config, "generate");
    config.overlay(gen_count_opt, "generate", "count", gen_count);
    config.overlay(gen_out_opt, "generate", "out_dir", gen_out);
    if (gen_out.empty()) throw io_error("generate needs --out");
    gen_out = apply_out_dir_override(gen_out);
    fs::create_directories(gen_out);
    const Rng root(seed);
    for (int i = 0; i < gen_count; ++i) {
      const Instance ins = gen::generate_synthetic(
          gen_flags.params(root.child(static_cast<std::uint64_t>(i)).seed()));
      char name[32];
      std::snprintf(name, sizeof(name), "instance_%05d.json", i);
      save_instance(ins, (fs::path(gen_out) / name).string());
    }
    print_summary({{"command", "generate"},
                   {"instances", gen_count},
                   {"users", gen_flags.num_users},
                   {"out_dir", gen_out},
                   {"seed", seed}});
    return 0;
  }

  if (cmd_ingest->parsed()) {
    ingest_flags.overlay(config, "ingest");
    config.overlay(ingest_csv_opt, "ingest", "csv", ingest_csv);
    config.overlay(ingest_out_opt, "ingest", "out", ingest_out);
    if (ingest_csv.empty() || ingest_out.empty())
      throw io_error("ingest-acn needs --csv and --out");
    ingest_out = prepared_out_path(ingest_out);
    const gen::IngestReport report =
        gen::ingest_acn(ingest_csv, ingest_flags.params(seed));
    for (const std::string& w : report.warnings) std::cerr << w << "\n";
    save_instance(report.instance, ingest_out);
    print_summary({{"command", "ingest-acn"},
                   {"rows", report.rows_read},
                   {"skipped", report.rows_skipped},
                   {"requests", report.instance.requests.size()},
                   {"out", ingest_out}});
    return 0;
  }

  if (cmd_label->parsed()) {
    config.overlay(label_in_opt, "label", "instances", label_instances);
    config.overlay(label_out_opt, "label", "out_dir", label_out);
    config.overlay(label_tb_opt, "label", "time_budget_s", label_time_budget);
    config.overlay(label_nb_opt, "label", "node_budget", label_node_budget);
    if (label_instances.empty() || label_out.empty())
      throw io_error("label needs --instances and --out");
    label_out = apply_out_dir_override(label_out);
    fs::create_directories(label_out);
    oracle::SearchLimits limits; // gap 0: labels must be proven optima
    if (label_time_budget > 0.0) limits.time_budget_s = label_time_budget;
    if (label_node_budget > 0) limits.node_budget = label_node_budget;
    limits.use_lp_bound = !label_no_lp;

    int optimal = 0;
    const auto files = expand_instances(label_instances);
    for (const std::string& file : files) {
      const Instance ins = load_instance(file);
      const Solution s = oracle::solve_exact(ins, limits);
      if (s.optimal) ++optimal;
      write_text_file(label_path_for(label_out, file),
                      solution_to_json(s, ins).dump(2) + "\n");
    }
    print_summary({{"command", "label"},
                   {"instances", files.size()},
                   {"optimal", optimal},
                   {"out_dir", label_out}});
    return 0;
  }

  if (cmd_encode->parsed()) {
    encode_codec.overlay(config);
    config.overlay(encode_in_opt, "encode", "instances", encode_instances);
    config.overlay(encode_labels_opt, "encode", "labels", encode_labels);
    config.overlay(encode_out_opt, "encode", "out", encode_out);
    if (encode_instances.empty() || encode_labels.empty() ||
        encode_out.empty())
      throw io_error("encode needs --instances, --labels and --out");
    encode_out = prepared_out_path(encode_out);

    const codec::CodecParams params = encode_codec.params();
    const auto files = expand_instances(encode_instances);
    codec::Dataset dataset;
    bool first = true;
    std::vector<Eigen::VectorXd> features, labels;
    for (const std::string& file : files) {
      const Instance ins = load_instance(file);
      const codec::CodecSidecar sidecar = codec::sidecar_for(ins, params);
      if (first) {
        dataset.sidecar = sidecar;
        first = false;
      } else if (!(sidecar == dataset.sidecar)) {
        throw codec_mismatch_error(
            "instance '" + file + "' disagrees with the dataset codec");
      }
      const std::string lpath = label_path_for(encode_labels, file);
      json lj;
      try {
        lj = json::parse(read_text_file(lpath));
      } catch (const json::exception& e) {
        throw io_error("cannot parse label '" + lpath + "': " + e.what());
      }
      const Schedule schedule = schedule_from_json(lj.at("schedule"));
      features.push_back(codec::encode_features(ins, params));
      labels.push_back(codec::encode_label(ins, schedule, params));
      dataset.instance_paths.push_back(file);
      dataset.label_methods.push_back(
          lj.value("method", std::string("exact")));
    }
    dataset.features.resize(dataset.sidecar.feature_len,
                            static_cast<Eigen::Index>(features.size()));
    dataset.labels.resize(dataset.sidecar.label_len,
                          static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < features.size(); ++i) {
      dataset.features.col(static_cast<Eigen::Index>(i)) = features[i];
      dataset.labels.col(static_cast<Eigen::Index>(i)) = labels[i];
    }
    codec::write_dataset(dataset, encode_out);
    print_summary({{"command", "encode"},
                   {"samples", features.size()},
                   {"feature_len", dataset.sidecar.feature_len},
                   {"label_len", dataset.sidecar.label_len},
                   {"out", encode_out}});
    return 0;
  }

  if (cmd_train->parsed()) {
    config.overlay(train_ds_opt, "train", "dataset", train_dataset);
    config.overlay(train_out_opt, "train", "out", train_out);
    config.overlay(train_arch_opt, "train", "arch", train_arch);
    config.overlay(train_hidden_opt, "train", "hidden", train_hidden);
    config.overlay(train_epochs_opt, "train", "epochs", train_epochs);
    config.overlay(train_batch_opt, "train", "batch_size", train_batch);
    config.overlay(train_lr_opt, "train", "learning_rate", train_lr);
    config.overlay(train_val_opt, "train", "validation_fraction",
                   train_val_fraction);
    config.overlay(train_clip_opt, "train", "clip_norm", train_clip);
    config.overlay(train_report_opt, "train", "report", train_report_path);
    if (train_dataset.empty() || train_out.empty())
      throw io_error("train needs --dataset and --out");
    train_out = prepared_out_path(train_out);

    const codec::Dataset dataset = codec::read_dataset(train_dataset);
    std::vector<int> hidden = train_hidden;
    if (hidden.empty())
      hidden = train_arch == "desk" ? nn::desk_hidden_dims()
               : train_arch == "paper"
                   ? nn::paper_hidden_dims()
                   : throw io_error("arch must be 'paper' or 'desk'");
    std::vector<int> dims;
    dims.push_back(dataset.sidecar.feature_len);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(dataset.sidecar.label_len);

    const Rng root(seed);
    nn::Network net = nn::init_network(dims, root.child(1).seed());
    nn::Hyperparams hyper;
    hyper.epochs = train_epochs;
    hyper.batch_size = train_batch;
    hyper.learning_rate = train_lr;
    hyper.validation_fraction = train_val_fraction;
    hyper.clip_norm = train_clip;
    hyper.seed = root.child(2).seed();
    const nn::TrainReport report = nn::train(net, dataset, hyper);
    nn::save_model(net, dataset.sidecar, train_out);
    if (!train_report_path.empty())
      write_text_file(train_report_path,
                      json{{"train_loss", report.train_loss},
                           {"validation_loss", report.validation_loss},
                           {"checksum", report.weights_checksum}}
                              .dump(2) +
                          "\n");
    print_summary({{"command", "train"},
                   {"samples", dataset.size()},
                   {"epochs", train_epochs},
                   {"final_train_loss", report.train_loss.back()},
                   {"final_validation_loss", report.validation_loss.back()},
                   {"checksum", report.weights_checksum},
                   {"out", train_out}});
    return 0;
  }

  if (cmd_solve->parsed()) {
    config.overlay(solve_in_opt, "solve", "instance", solve_instance);
    config.overlay(solve_method_opt, "solve", "method", solve_method);
    config.overlay(solve_out_opt, "solve", "out", solve_out);
    config.overlay(solve_model_opt, "solve", "model", solve_model);
    config.overlay(solve_guesses_opt, "solve", "guesses", solve_guesses);
    config.overlay(solve_max_guess_opt, "solve", "max_guess_size",
                   solve_max_guess);
    config.overlay(solve_tb_opt, "solve", "time_budget_s", solve_time_budget);
    config.overlay(solve_gap_opt, "solve", "gap_tolerance", solve_gap);
    if (solve_instance.empty()) throw io_error("solve needs --instance");

    const Instance ins = load_instance(solve_instance);
    oracle::SearchLimits limits;
    limits.gap_tolerance = solve_gap;
    if (solve_time_budget > 0.0) limits.time_budget_s = solve_time_budget;
    const Solution s =
        solve_with_method(ins, solve_method, limits, solve_guesses,
                          solve_max_guess, solve_model, Rng(seed).seed());
    const bool feasible = check_feasibility(ins, s.schedule).feasible;
    if (!feasible) throw solve_error("solver produced an infeasible schedule");
    if (!solve_out.empty()) {
      write_text_file(prepared_out_path(solve_out),
                      solution_to_json(s, ins).dump(2) + "\n");
    }
    print_summary({{"command", "solve"},
                   {"method", s.method},
                   {"objective", s.objective},
                   {"optimal", s.optimal},
                   {"accepted", s.schedule.size()},
                   {"wall_ms", s.wall_time_s * 1e3}});
    return 0;
  }

  if (cmd_bench->parsed()) {
    bench_flags.overlay(config, "bench");
    config.overlay(bench_methods_opt, "bench", "methods", bench_methods);
    config.overlay(bench_ref_opt, "bench", "reference", bench_reference);
    config.overlay(bench_out_opt, "bench", "out", bench_out);
    config.overlay(bench_in_opt, "bench", "instances", bench_instances);
    config.overlay(bench_count_opt, "bench", "count", bench_count);
    config.overlay(bench_reps_opt, "bench", "repetitions", bench_reps);
    config.overlay(bench_model_opt, "bench", "model", bench_model);
    config.overlay(bench_guesses_opt, "bench", "guesses", bench_guesses);
    config.overlay(bench_workers_opt, "bench", "workers", bench_workers);
    if (bench_out.empty()) throw io_error("bench needs --out");
    bench_out = prepared_out_path(bench_out);

    bench::BenchConfig bc;
    bc.seed = seed;
    if (!bench_instances.empty()) {
      bc.use_generator = false;
      bc.instance_files = expand_instances(bench_instances);
    } else {
      bc.use_generator = true;
      bc.gen_params = bench_flags.params(seed);
      bc.num_instances = bench_count;
    }
    for (const std::string& name : bench_methods) {
      const auto m = bench::method_from_name(name);
      if (!m.has_value()) throw io_error("unknown method '" + name + "'");
      bc.methods.push_back(*m);
    }
    if (bench_reference == "exact")
      bc.reference = bench::Reference::Exact;
    else if (bench_reference == "best-known")
      bc.reference = bench::Reference::BestKnown;
    else
      throw io_error("reference must be 'exact' or 'best-known'");
    bc.repetitions = bench_reps;
    bc.model_path = bench_model;
    bc.ptas_guesses = bench_guesses;
    bc.workers = env_workers(bench_workers);

    const bench::BenchReport report = bench::run_benchmark(bc);
    bench::write_report_csv(report, bench_out + ".csv");
    bench::write_report_json(report, bench_out + ".json");

    json summary{{"command", "bench"},
                 {"instances", report.instance_ids.size()},
                 {"out", bench_out}};
    for (const auto& [name, agg] : report.aggregates)
      summary["mean_ratio_" + name] = agg.mean_ratio;
    print_summary(summary);
    return 0;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const codec_mismatch_error& e) {
    std::cerr << "codec mismatch: " << e.what() << "\n";
    return kExitCodecMismatch;
  } catch (const solve_error& e) {
    std::cerr << "solve failed: " << e.what() << "\n";
    return kExitFailedSolve;
  } catch (const io_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailedSolve;
  }
}
