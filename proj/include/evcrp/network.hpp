#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "evcrp/codec.hpp"

namespace evcrp::nn {

// Dense feed-forward network: ReLU hidden layers, identity output.
struct Network {
  std::vector<int> dims; // input, hidden..., output
  std::vector<Eigen::MatrixXd> weights; // layer i maps dims[i] -> dims[i+1]
  std::vector<Eigen::VectorXd> biases;

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
};

// Nine hidden layers tapering 800 -> 50, the full-scale default.
std::vector<int> paper_hidden_dims();
// Four hidden layers 256 -> 32 for desk-scale runs.
std::vector<int> desk_hidden_dims();

// He fan-in scaled weights, zero biases, deterministic per seed.
Network init_network(const std::vector<int>& dims, std::uint64_t seed);

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x);
// Columns are samples.
Eigen::MatrixXd forward_batch(const Network& net, const Eigen::MatrixXd& x);

// Mean squared error averaged over samples and output entries.
double loss_mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& label);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Exact gradients of loss_mse(forward_batch(x), y); the ReLU subgradient
// at 0 is taken as 0.
Gradients backward(const Network& net, const Eigen::MatrixXd& x,
                   const Eigen::MatrixXd& y);

struct Hyperparams {
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9; // Adam moments
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double clip_norm = 10.0; // global gradient norm
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct TrainReport {
  std::vector<double> train_loss;      // per epoch, mean of batch losses
  std::vector<double> validation_loss; // per epoch
  std::uint64_t weights_checksum = 0;
};

// Mini-batch Adam with epoch-level shuffling; deterministic per seed.
// Refuses datasets whose codec does not match the network dimensions.
TrainReport train(Network& net, const codec::Dataset& dataset,
                  const Hyperparams& hyper);

std::uint64_t weights_checksum(const Network& net);

// Versioned JSON container embedding the codec sidecar and a checksum;
// save -> load round-trips bit-exactly.
void save_model(const Network& net, const codec::CodecSidecar& sidecar,
                const std::string& path);

struct LoadedModel {
  Network network;
  codec::CodecSidecar sidecar;
};

LoadedModel load_model(const std::string& path);

}  // namespace evcrp::nn
