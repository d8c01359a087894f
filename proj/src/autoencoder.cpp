#include "tsad/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "tsad/rng.hpp"

namespace tsad::ae {

void AeConfig::validate() const {
  if (window == 0 || stride == 0 || epochs == 0 || batch_size == 0 || latent_dim == 0) {
    throw InputError("ae: window, stride, epochs, batch_size and latent_dim must be positive");
  }
  if (!(learning_rate > 0.0) || weight_decay < 0.0) {
    throw InputError("ae: learning_rate must be > 0 and weight_decay >= 0");
  }
}

AeModel::AeModel(std::size_t window, std::size_t latent_dim) : window_(window), latent_(latent_dim) {
  if (window == 0 || latent_dim == 0) throw InputError("AeModel: window and latent_dim must be > 0");
  const std::size_t wide = 2 * latent_dim;
  const std::array<std::size_t, kLayers + 1> widths{window, wide, wide, latent_dim, wide, wide, window};
  std::size_t offset = 0;
  for (std::size_t l = 0; l < kLayers; ++l) {
    layers_[l] = LayerShape{widths[l], widths[l + 1], offset, l + 1 < kLayers};
    offset += widths[l] * widths[l + 1] + widths[l + 1];
  }
  params_.assign(offset, 0.0);
}

AeModel AeModel::glorot(std::size_t window, std::size_t latent_dim, std::uint64_t seed) {
  AeModel m(window, latent_dim);
  Rng rng(seed);
  for (const auto& layer : m.layers_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    for (std::size_t i = 0; i < layer.weight_count(); ++i) {
      m.params_[layer.offset + i] = rng.uniform(-bound, bound);
    }
  }
  return m;
}

namespace {

// Activations of every layer for one input; acts[0] is the input itself.
struct Trace {
  std::array<std::vector<double>, AeModel::kLayers + 1> acts;
  std::array<std::vector<double>, AeModel::kLayers> pre;
};

void run_forward(const AeModel& model, std::span<const double> x, Trace& trace) {
  const auto p = model.parameters();
  trace.acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < AeModel::kLayers; ++l) {
    const auto& shape = model.layers()[l];
    const auto& in = trace.acts[l];
    auto& z = trace.pre[l];
    z.assign(shape.out, 0.0);
    for (std::size_t o = 0; o < shape.out; ++o) {
      const double* w = p.data() + shape.offset + o * shape.in;
      double sum = p[shape.bias_offset() + o];
      for (std::size_t i = 0; i < shape.in; ++i) sum += w[i] * in[i];
      z[o] = sum;
    }
    auto& a = trace.acts[l + 1];
    a = z;
    if (shape.relu) {
      for (auto& v : a) v = std::max(v, 0.0);
    }
  }
}

double mse(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace

Reconstruction forward(const AeModel& model, std::span<const double> window) {
  if (window.size() != model.window()) {
    throw InputError("ae::forward: window has " + std::to_string(window.size()) + " values, model expects " +
                     std::to_string(model.window()));
  }
  Trace trace;
  run_forward(model, window, trace);
  Reconstruction out;
  out.values = trace.acts.back();
  out.loss = mse(out.values, window);
  return out;
}

double loss_and_gradient(const AeModel& model, std::span<const std::span<const double>> batch,
                         std::span<double> grad) {
  if (grad.size() != model.parameter_count()) throw InputError("ae: gradient buffer has the wrong size");
  std::fill(grad.begin(), grad.end(), 0.0);
  if (batch.empty()) return 0.0;
  const auto p = model.parameters();
  const double batch_scale = 1.0 / static_cast<double>(batch.size());
  const double window_scale = 2.0 / static_cast<double>(model.window());
  double total = 0.0;
  Trace trace;
  std::vector<double> delta, prev;
  for (const auto& x : batch) {
    if (x.size() != model.window()) throw InputError("ae: batch window has the wrong length");
    run_forward(model, x, trace);
    const auto& out = trace.acts.back();
    total += mse(out, x);
    delta.resize(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) delta[i] = window_scale * batch_scale * (out[i] - x[i]);
    for (std::size_t l = AeModel::kLayers; l-- > 0;) {
      const auto& shape = model.layers()[l];
      const auto& in = trace.acts[l];
      for (std::size_t o = 0; o < shape.out; ++o) {
        double* gw = grad.data() + shape.offset + o * shape.in;
        for (std::size_t i = 0; i < shape.in; ++i) gw[i] += delta[o] * in[i];
        grad[shape.bias_offset() + o] += delta[o];
      }
      if (l == 0) break;
      prev.assign(shape.in, 0.0);
      for (std::size_t o = 0; o < shape.out; ++o) {
        const double* w = p.data() + shape.offset + o * shape.in;
        for (std::size_t i = 0; i < shape.in; ++i) prev[i] += w[i] * delta[o];
      }
      const auto& z_below = trace.pre[l - 1];
      for (std::size_t i = 0; i < shape.in; ++i) {
        if (!(z_below[i] > 0.0)) prev[i] = 0.0;
      }
      delta.swap(prev);
    }
  }
  return total * batch_scale;
}

void sgd_step(AeModel& model, std::span<const double> grad, double learning_rate, double weight_decay) {
  auto p = model.parameters();
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] -= learning_rate * grad[i] + learning_rate * weight_decay * p[i];
  }
}

namespace {

std::vector<std::span<const double>> windows_of(std::span<const double> values, const AeConfig& cfg) {
  std::vector<std::span<const double>> out;
  if (values.size() < cfg.window) return out;
  for (std::size_t s = 0; s + cfg.window <= values.size(); s += cfg.stride) {
    out.push_back(values.subspan(s, cfg.window));
  }
  return out;
}

}  // namespace

TrainResult train(std::span<const double> values, const AeConfig& config) {
  config.validate();
  if (values.size() < config.window) {
    throw InputError("ae::train: series of length " + std::to_string(values.size()) +
                     " is shorter than the window " + std::to_string(config.window));
  }
  TrainResult result{AeModel::glorot(config.window, config.latent_dim, config.seed), {}};
  auto windows = windows_of(values, config);
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffler(config.seed + 1);
  std::vector<double> grad(result.model.parameter_count());
  std::vector<std::span<const double>> batch;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffler.shuffle(std::span(order));
    double epoch_total = 0.0;
    std::size_t batches = 0;
    for (std::size_t first = 0; first < order.size(); first += config.batch_size) {
      batch.clear();
      for (std::size_t k = first; k < std::min(order.size(), first + config.batch_size); ++k) {
        batch.push_back(windows[order[k]]);
      }
      const double loss = loss_and_gradient(result.model, batch, grad);
      if (!std::isfinite(loss) || loss > 1e6) {
        result.epoch_loss.push_back(loss);
        throw TrainingError("ae::train: loss diverged (" + std::to_string(loss) + ") in epoch " +
                                std::to_string(epoch),
                            result.epoch_loss);
      }
      sgd_step(result.model, grad, config.learning_rate, config.weight_decay);
      epoch_total += loss;
      ++batches;
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(batches));
  }
  return result;
}

ScoreSeries score(const AeModel& model, std::span<const double> values, const AeConfig& config) {
  config.validate();
  const auto windows = windows_of(values, config);
  std::vector<double> losses(windows.size());
  const auto count = static_cast<std::ptrdiff_t>(windows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    losses[static_cast<std::size_t>(k)] = forward(model, windows[static_cast<std::size_t>(k)]).loss;
  }
  return expand_window_scores(losses, config.window, config.stride, values.size(), "ae");
}

void dump(const AeModel& model, std::ostream& out) {
  const auto p = model.parameters();
  out.precision(17);
  for (std::size_t l = 0; l < AeModel::kLayers; ++l) {
    const auto& s = model.layers()[l];
    const std::string prefix = (l < 3 ? "encoder." : "decoder.") + std::to_string(l % 3);
    out << prefix << ".weight " << s.out << ' ' << s.in << '\n';
    for (std::size_t o = 0; o < s.out; ++o) {
      for (std::size_t i = 0; i < s.in; ++i) out << (i ? " " : "") << p[s.offset + o * s.in + i];
      out << '\n';
    }
    out << prefix << ".bias " << s.out << " 1\n";
    for (std::size_t o = 0; o < s.out; ++o) out << (o ? " " : "") << p[s.bias_offset() + o];
    out << '\n';
  }
}

}  // namespace tsad::ae
