#include "evcrp/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <stdexcept>

#include "evcrp/errors.hpp"
#include "evcrp/rng.hpp"

namespace evcrp::nn {

using nlohmann::json;

std::vector<int> paper_hidden_dims() {
  return {800, 573, 410, 294, 210, 151, 108, 77, 50};
}

std::vector<int> desk_hidden_dims() { return {256, 128, 64, 32}; }

Network init_network(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2)
    throw std::invalid_argument("need at least input and output dims");
  for (const int d : dims)
    if (d < 1) throw std::invalid_argument("layer dims must be >= 1");

  Network net;
  net.dims = dims;
  Rng root(seed);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    Rng rng = root.child(i);
    const int fan_in = dims[i];
    const int fan_out = dims[i + 1];
    const double stddev = std::sqrt(2.0 / fan_in);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.normal(0.0, stddev);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x) {
  if (x.size() != net.input_dim())
    throw std::invalid_argument("input dimension mismatch");
  Eigen::VectorXd a = x;
  for (int i = 0; i < net.num_layers(); ++i) {
    Eigen::VectorXd z = net.weights[static_cast<std::size_t>(i)] * a +
                        net.biases[static_cast<std::size_t>(i)];
    a = i + 1 < net.num_layers() ? z.cwiseMax(0.0).eval() : z;
  }
  return a;
}

Eigen::MatrixXd forward_batch(const Network& net, const Eigen::MatrixXd& x) {
  if (x.rows() != net.input_dim())
    throw std::invalid_argument("input dimension mismatch");
  Eigen::MatrixXd a = x;
  for (int i = 0; i < net.num_layers(); ++i) {
    Eigen::MatrixXd z =
        (net.weights[static_cast<std::size_t>(i)] * a).colwise() +
        net.biases[static_cast<std::size_t>(i)];
    a = i + 1 < net.num_layers() ? z.cwiseMax(0.0).eval() : z;
  }
  return a;
}

double loss_mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& label) {
  if (pred.rows() != label.rows() || pred.cols() != label.cols())
    throw std::invalid_argument("prediction/label shape mismatch");
  const double n = static_cast<double>(pred.rows() * pred.cols());
  return (pred - label).squaredNorm() / n;
}

Gradients backward(const Network& net, const Eigen::MatrixXd& x,
                   const Eigen::MatrixXd& y) {
  if (x.cols() == 0) throw std::invalid_argument("empty batch");
  if (x.rows() != net.input_dim() || y.rows() != net.output_dim() ||
      x.cols() != y.cols())
    throw std::invalid_argument("batch shape mismatch");

  const int layers = net.num_layers();
  std::vector<Eigen::MatrixXd> activations; // a_0 .. a_layers
  activations.reserve(static_cast<std::size_t>(layers) + 1);
  activations.push_back(x);
  for (int i = 0; i < layers; ++i) {
    Eigen::MatrixXd z =
        (net.weights[static_cast<std::size_t>(i)] * activations.back())
            .colwise() +
        net.biases[static_cast<std::size_t>(i)];
    activations.push_back(i + 1 < layers ? z.cwiseMax(0.0).eval()
                                         : std::move(z));
  }

  Gradients grads;
  grads.weights.resize(static_cast<std::size_t>(layers));
  grads.biases.resize(static_cast<std::size_t>(layers));

  const double scale =
      static_cast<double>(y.rows()) * static_cast<double>(y.cols());
  Eigen::MatrixXd delta = 2.0 * (activations.back() - y) / scale;
  for (int i = layers - 1; i >= 0; --i) {
    grads.weights[static_cast<std::size_t>(i)].noalias() =
        delta * activations[static_cast<std::size_t>(i)].transpose();
    grads.biases[static_cast<std::size_t>(i)] = delta.rowwise().sum();
    if (i > 0) {
      // post-activation > 0 iff pre-activation > 0 for ReLU layers
      const Eigen::MatrixXd mask =
          (activations[static_cast<std::size_t>(i)].array() > 0.0)
              .cast<double>();
      delta = (net.weights[static_cast<std::size_t>(i)].transpose() * delta)
                  .cwiseProduct(mask);
    }
  }
  return grads;
}

TrainReport train(Network& net, const codec::Dataset& dataset,
                  const Hyperparams& hyper) {
  if (hyper.epochs < 1 || hyper.batch_size < 1 ||
      !(hyper.learning_rate >= 0.0))
    throw std::invalid_argument("invalid hyperparameters");
  if (dataset.sidecar.feature_len != net.input_dim() ||
      dataset.sidecar.label_len != net.output_dim())
    throw codec_mismatch_error(
        "dataset codec does not match the network dimensions");
  if (dataset.size() == 0) throw std::invalid_argument("empty dataset");

  const int N = dataset.size();
  Rng root(hyper.seed);

  // Deterministic split: one shuffle, validation takes the tail.
  std::vector<int> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  {
    Rng split_rng = root.child(0);
    split_rng.shuffle(order);
  }
  int val_count = static_cast<int>(
      std::lround(hyper.validation_fraction * static_cast<double>(N)));
  val_count = std::clamp(val_count, 0, N - 1);
  std::vector<int> train_idx(order.begin(), order.end() - val_count);
  std::vector<int> val_idx(order.end() - val_count, order.end());

  Eigen::MatrixXd val_x(net.input_dim(), val_count);
  Eigen::MatrixXd val_y(net.output_dim(), val_count);
  for (int i = 0; i < val_count; ++i) {
    val_x.col(i) = dataset.features.col(val_idx[static_cast<std::size_t>(i)]);
    val_y.col(i) = dataset.labels.col(val_idx[static_cast<std::size_t>(i)]);
  }

  // Adam state.
  const int layers = net.num_layers();
  std::vector<Eigen::MatrixXd> mw(static_cast<std::size_t>(layers)),
      vw(static_cast<std::size_t>(layers));
  std::vector<Eigen::VectorXd> mb(static_cast<std::size_t>(layers)),
      vb(static_cast<std::size_t>(layers));
  for (int i = 0; i < layers; ++i) {
    mw[static_cast<std::size_t>(i)] = Eigen::MatrixXd::Zero(
        net.weights[static_cast<std::size_t>(i)].rows(),
        net.weights[static_cast<std::size_t>(i)].cols());
    vw[static_cast<std::size_t>(i)] = mw[static_cast<std::size_t>(i)];
    mb[static_cast<std::size_t>(i)] = Eigen::VectorXd::Zero(
        net.biases[static_cast<std::size_t>(i)].size());
    vb[static_cast<std::size_t>(i)] = mb[static_cast<std::size_t>(i)];
  }

  TrainReport report;
  std::int64_t step = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng epoch_rng = root.child(static_cast<std::uint64_t>(epoch) + 1);
    epoch_rng.shuffle(train_idx);

    double epoch_loss = 0.0;
    int batches = 0;
    for (std::size_t begin = 0; begin < train_idx.size();
         begin += static_cast<std::size_t>(hyper.batch_size)) {
      const std::size_t end = std::min(
          begin + static_cast<std::size_t>(hyper.batch_size),
          train_idx.size());
      const int bs = static_cast<int>(end - begin);
      Eigen::MatrixXd bx(net.input_dim(), bs);
      Eigen::MatrixXd by(net.output_dim(), bs);
      for (int i = 0; i < bs; ++i) {
        bx.col(i) = dataset.features.col(train_idx[begin + i]);
        by.col(i) = dataset.labels.col(train_idx[begin + i]);
      }

      epoch_loss += loss_mse(forward_batch(net, bx), by);
      ++batches;

      Gradients grads = backward(net, bx, by);

      double norm_sq = 0.0;
      for (int i = 0; i < layers; ++i) {
        norm_sq += grads.weights[static_cast<std::size_t>(i)].squaredNorm();
        norm_sq += grads.biases[static_cast<std::size_t>(i)].squaredNorm();
      }
      const double norm = std::sqrt(norm_sq);
      if (hyper.clip_norm > 0.0 && norm > hyper.clip_norm) {
        const double f = hyper.clip_norm / norm;
        for (int i = 0; i < layers; ++i) {
          grads.weights[static_cast<std::size_t>(i)] *= f;
          grads.biases[static_cast<std::size_t>(i)] *= f;
        }
      }

      ++step;
      const double bias1 =
          1.0 - std::pow(hyper.beta1, static_cast<double>(step));
      const double bias2 =
          1.0 - std::pow(hyper.beta2, static_cast<double>(step));
      for (int i = 0; i < layers; ++i) {
        const std::size_t li = static_cast<std::size_t>(i);
        mw[li] = hyper.beta1 * mw[li] + (1.0 - hyper.beta1) * grads.weights[li];
        vw[li] = hyper.beta2 * vw[li] +
                 (1.0 - hyper.beta2) * grads.weights[li].cwiseAbs2();
        mb[li] = hyper.beta1 * mb[li] + (1.0 - hyper.beta1) * grads.biases[li];
        vb[li] = hyper.beta2 * vb[li] +
                 (1.0 - hyper.beta2) * grads.biases[li].cwiseAbs2();
        net.weights[li].array() -=
            hyper.learning_rate * (mw[li].array() / bias1) /
            ((vw[li].array() / bias2).sqrt() + hyper.adam_eps);
        net.biases[li].array() -=
            hyper.learning_rate * (mb[li].array() / bias1) /
            ((vb[li].array() / bias2).sqrt() + hyper.adam_eps);
      }
    }

    report.train_loss.push_back(batches > 0 ? epoch_loss / batches : 0.0);
    report.validation_loss.push_back(
        val_count > 0 ? loss_mse(forward_batch(net, val_x), val_y)
                      : report.train_loss.back());
  }

  report.weights_checksum = weights_checksum(net);
  return report;
}

namespace {

void fnv1a_mix(std::uint64_t& h, const double* data, std::size_t count) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::uint64_t weights_checksum(const Network& net) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int i = 0; i < net.num_layers(); ++i) {
    const auto& w = net.weights[static_cast<std::size_t>(i)];
    const auto& b = net.biases[static_cast<std::size_t>(i)];
    fnv1a_mix(h, w.data(), static_cast<std::size_t>(w.size()));
    fnv1a_mix(h, b.data(), static_cast<std::size_t>(b.size()));
  }
  return h;
}

void save_model(const Network& net, const codec::CodecSidecar& sidecar,
                const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["dims"] = net.dims;
  j["codec"] = codec::sidecar_to_json(sidecar);
  json weights = json::array();
  json biases = json::array();
  for (int i = 0; i < net.num_layers(); ++i) {
    const auto& w = net.weights[static_cast<std::size_t>(i)];
    std::vector<double> flat(static_cast<std::size_t>(w.size()));
    // row-major flattening
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c)
        flat[static_cast<std::size_t>(r * w.cols() + c)] = w(r, c);
    weights.push_back(flat);
    const auto& b = net.biases[static_cast<std::size_t>(i)];
    biases.push_back(std::vector<double>(b.data(), b.data() + b.size()));
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  j["checksum"] = weights_checksum(net);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << j.dump() << "\n";
  if (!out) throw io_error("short write to '" + path + "'");
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error("cannot parse model '" + path + "': " + e.what());
  }

  LoadedModel model;
  try {
    if (j.at("format_version").get<int>() != 1)
      throw io_error("unsupported model format version");
    model.sidecar = codec::sidecar_from_json(j.at("codec"));
    model.network.dims = j.at("dims").get<std::vector<int>>();
    const json& weights = j.at("weights");
    const json& biases = j.at("biases");
    if (model.network.dims.size() < 2 ||
        weights.size() != model.network.dims.size() - 1 ||
        biases.size() != weights.size())
      throw io_error("model layer structure is inconsistent");
    for (std::size_t i = 0; i + 1 < model.network.dims.size(); ++i) {
      const int rows = model.network.dims[i + 1];
      const int cols = model.network.dims[i];
      const auto flat = weights.at(i).get<std::vector<double>>();
      if (static_cast<int>(flat.size()) != rows * cols)
        throw io_error("model weight block has wrong size");
      Eigen::MatrixXd w(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
          w(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
      model.network.weights.push_back(std::move(w));
      const auto bias = biases.at(i).get<std::vector<double>>();
      if (static_cast<int>(bias.size()) != rows)
        throw io_error("model bias block has wrong size");
      model.network.biases.push_back(Eigen::Map<const Eigen::VectorXd>(
          bias.data(), static_cast<Eigen::Index>(bias.size())));
    }
    const auto stored = j.at("checksum").get<std::uint64_t>();
    if (stored != weights_checksum(model.network))
      throw io_error("model checksum mismatch; file is corrupt");
  } catch (const json::exception& e) {
    throw io_error("malformed model '" + path + "': " + e.what());
  }
  if (model.sidecar.feature_len != model.network.input_dim() ||
      model.sidecar.label_len != model.network.output_dim())
    throw io_error("model dims do not match its codec sidecar");
  return model;
}

}  // namespace evcrp::nn
