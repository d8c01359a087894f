#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsad/core.hpp"

namespace tsad::ae {

struct AeConfig {
  std::size_t window = 10;
  std::size_t stride = 10;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  std::size_t latent_dim = 16;
  double learning_rate = 0.005;
  double weight_decay = 1e-5;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Shape of one dense layer inside the flat parameter buffer: weights
/// (rows = out, cols = in, row-major) followed by out biases.
struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t offset = 0;
  bool relu = true;

  std::size_t weight_count() const { return in * out; }
  std::size_t bias_offset() const { return offset + in * out; }
};

/// Dense autoencoder L -> 2d -> 2d -> d -> 2d -> 2d -> L. Every layer but the
/// last applies ReLU.
class AeModel {
 public:
  static constexpr std::size_t kLayers = 6;

  AeModel(std::size_t window, std::size_t latent_dim);
  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static AeModel glorot(std::size_t window, std::size_t latent_dim, std::uint64_t seed);

  std::size_t window() const { return window_; }
  std::size_t latent_dim() const { return latent_; }
  const std::array<LayerShape, kLayers>& layers() const { return layers_; }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

 private:
  std::size_t window_;
  std::size_t latent_;
  std::array<LayerShape, kLayers> layers_;
  std::vector<double> params_;
};

struct Reconstruction {
  std::vector<double> values;
  double loss = 0.0;  // mean squared error over the window
};

Reconstruction forward(const AeModel& model, std::span<const double> window);

/// Mean loss over the batch and its gradient with respect to every parameter
/// (written into grad, which must have parameter_count() entries).
double loss_and_gradient(const AeModel& model, std::span<const std::span<const double>> batch,
                         std::span<double> grad);

/// p <- p - lr * g - lr * weight_decay * p
void sgd_step(AeModel& model, std::span<const double> grad, double learning_rate, double weight_decay);

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::vector<double> trajectory)
      : std::runtime_error(what), trajectory_(std::move(trajectory)) {}
  const std::vector<double>& trajectory() const { return trajectory_; }

 private:
  std::vector<double> trajectory_;
};

struct TrainResult {
  AeModel model;
  std::vector<double> epoch_loss;  // mean batch loss per epoch
};

/// Mini-batch SGD over shuffled sliding windows of `values` (labels are never seen).
TrainResult train(std::span<const double> values, const AeConfig& config);

/// Window reconstruction losses expanded onto the series.
ScoreSeries score(const AeModel& model, std::span<const double> values, const AeConfig& config);

/// Text dump: one block per tensor, "<name> <rows> <cols>" then the values.
void dump(const AeModel& model, std::ostream& out);

}  // namespace tsad::ae
