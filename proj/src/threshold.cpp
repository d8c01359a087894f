#include "tsad/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsad::evt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMinShape = -0.5;

// Profile log-likelihood at v = theta * max(y).
class Profile {
 public:
  explicit Profile(std::span<const double> y)
      : y_(y), ymax_(*std::max_element(y.begin(), y.end())) {
    double sum = 0.0;
    for (double v : y) sum += v;
    mean_ = sum / static_cast<double>(y.size());
  }

  double exponential_ll() const {
    const double n = static_cast<double>(y_.size());
    return -n * std::log(mean_) - n;
  }

  // (beta, gamma) implied by v; gamma = 0 at v = 0.
  std::pair<double, double> params(double v) const {
    if (v == 0.0) return {mean_, 0.0};
    const double theta = v / ymax_;
    double s = 0.0;
    for (double y : y_) s += std::log1p(theta * y);
    const double gamma = s / static_cast<double>(y_.size());
    return {gamma / theta, gamma};
  }

  double ll(double v) const {
    if (v <= -1.0) return kNegInf;
    if (v == 0.0) return exponential_ll();
    const auto [beta, gamma] = params(v);
    if (!(beta > 0.0) || !(gamma >= kMinShape) || !std::isfinite(beta)) return kNegInf;
    return gpd_log_likelihood(y_, beta, gamma);
  }

 private:
  std::span<const double> y_;
  double ymax_;
  double mean_ = 0.0;
};

std::vector<double> search_grid() {
  std::vector<double> grid;
  for (int k = 6; k >= 1; --k) grid.push_back(-1.0 + std::pow(10.0, -k) * 0.999);
  for (int i = 1; i < 100; ++i) grid.push_back(-1.0 + i / 100.0);
  grid.push_back(0.0);
  for (int i = 0; i <= 120; ++i) grid.push_back(std::pow(10.0, -6.0 + 12.0 * i / 120.0));
  std::sort(grid.begin(), grid.end());
  return grid;
}

}  // namespace

double gpd_log_likelihood(std::span<const double> y, double beta, double gamma) {
  const double n = static_cast<double>(y.size());
  if (!(beta > 0.0)) return kNegInf;
  if (std::abs(gamma) < 1e-12) {
    double s = 0.0;
    for (double v : y) s += v;
    return -n * std::log(beta) - s / beta;
  }
  double s = 0.0;
  for (double v : y) {
    const double u = 1.0 + gamma * v / beta;
    if (!(u > 0.0)) return kNegInf;
    s += std::log(u);
  }
  return -n * std::log(beta) - (1.0 + 1.0 / gamma) * s;
}

std::optional<GpdFit> fit_gpd(std::span<const double> y) {
  if (y.size() < kMinExcesses) return std::nullopt;
  for (double v : y) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("fit_gpd: excesses must be positive and finite");
  }
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*hi - *lo <= 1e-12 * *hi) return std::nullopt;

  const Profile profile(y);
  static const std::vector<double> grid = search_grid();
  std::size_t best = 0;
  double best_ll = kNegInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = profile.ll(grid[i]);
    if (v > best_ll) {
      best_ll = v;
      best = i;
    }
  }
  if (best_ll == kNegInf) return std::nullopt;

  // Golden-section refinement between the neighbouring grid points.
  double a = grid[best > 0 ? best - 1 : 0];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = profile.ll(c), fd = profile.ll(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = profile.ll(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = profile.ll(d);
    }
  }
  double v = fc >= fd ? c : d;
  double v_ll = std::max(fc, fd);
  if (best_ll > v_ll) {
    v = grid[best];
    v_ll = best_ll;
  }
  if (profile.exponential_ll() >= v_ll) v = 0.0;

  const auto [beta, gamma] = profile.params(v);
  return GpdFit{beta, gamma, y.size(), 0.0};
}

void PotConfig::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw InputError("pot: q must lie in (0, 1)");
  if (!(init_fraction > 0.0 && init_fraction <= 1.0)) throw InputError("pot: init_fraction must lie in (0, 1]");
  if (!(th0_quantile > 0.0 && th0_quantile < 1.0)) throw InputError("pot: th0_quantile must lie in (0, 1)");
  if (refit_cadence == 0) throw InputError("pot: refit_cadence must be > 0");
}

double empirical_quantile(std::span<const double> values, double p) {
  if (values.empty()) throw InputError("empirical_quantile: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double tail_threshold(double th0, const GpdFit& fit, double q, std::size_t n) {
  const double ratio = q * static_cast<double>(n) / static_cast<double>(fit.n_peaks);
  if (std::abs(fit.gamma) < 1e-8) return th0 - fit.beta * std::log(ratio);
  return th0 + (fit.beta / fit.gamma) * (std::pow(ratio, -fit.gamma) - 1.0);
}

PotResult pot(std::span<const double> scores, const PotConfig& config) {
  config.validate();
  if (scores.empty()) throw InputError("pot: empty score sequence");
  const double sign = config.orientation == Orientation::upper ? 1.0 : -1.0;
  std::vector<double> oriented(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) oriented[i] = sign * scores[i];

  PotResult r;
  const double th0 = empirical_quantile(oriented, config.th0_quantile);
  std::vector<double> excesses;
  for (double v : oriented) {
    if (v > th0) excesses.push_back(v - th0);
  }
  r.th0 = sign * th0;
  r.threshold = r.th0;
  if (auto fit = fit_gpd(excesses)) {
    fit->th0 = r.th0;
    r.fit = fit;
    r.threshold = sign * tail_threshold(th0, *fit, config.q, scores.size());
  }
  return r;
}

double pot_threshold(std::span<const double> scores, const PotConfig& config) {
  return pot(scores, config).threshold;
}

StreamingPot::StreamingPot(std::span<const double> init, const PotConfig& config) : config_(config) {
  config_.validate();
  if (init.empty()) throw InputError("StreamingPot: empty initialization window");
  std::vector<double> oriented(init.size());
  for (std::size_t i = 0; i < init.size(); ++i) oriented[i] = this->oriented(init[i]);
  th0_ = empirical_quantile(oriented, config_.th0_quantile);
  for (double v : oriented) {
    if (v > th0_) peaks_.push_back(v - th0_);
  }
  seen_ = init.size();
  refit();
}

double StreamingPot::oriented(double score) const {
  return config_.orientation == Orientation::upper ? score : -score;
}

void StreamingPot::refit() {
  pending_ = 0;
  fit_ = fit_gpd(peaks_);
  if (fit_) {
    fit_->th0 = config_.orientation == Orientation::upper ? th0_ : -th0_;
    threshold_ = tail_threshold(th0_, *fit_, config_.q, seen_);
  } else {
    // No tail model: only scores strictly beyond th0 are flagged.
    threshold_ = std::nextafter(th0_, std::numeric_limits<double>::infinity());
  }
}

bool StreamingPot::is_anomaly(double score) const { return oriented(score) >= threshold_; }

bool StreamingPot::step(double score) {
  const double v = oriented(score);
  if (v >= threshold_) return true;
  ++seen_;
  if (v > th0_) {
    peaks_.push_back(v - th0_);
    if (++pending_ >= config_.refit_cadence) refit();
  }
  return false;
}

double StreamingPot::threshold() const {
  return config_.orientation == Orientation::upper ? threshold_ : -threshold_;
}

double StreamingPot::th0() const { return config_.orientation == Orientation::upper ? th0_ : -th0_; }

Detection streaming_pot(std::span<const double> scores, const PotConfig& config, std::string score_source) {
  config.validate();
  if (scores.empty()) throw InputError("streaming_pot: empty score sequence");
  const auto n_init = std::min<std::size_t>(
      scores.size(),
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(config.init_fraction * static_cast<double>(scores.size())))));
  StreamingPot spot(scores.first(n_init), config);
  Detection det;
  det.score_source = std::move(score_source);
  det.labels.resize(scores.size());
  for (std::size_t i = 0; i < n_init; ++i) det.labels[i] = spot.is_anomaly(scores[i]);
  for (std::size_t i = n_init; i < scores.size(); ++i) det.labels[i] = spot.step(scores[i]);
  det.threshold = spot.threshold();
  return det;
}

Detection classify(std::span<const double> scores, double threshold, std::string score_source) {
  Detection det{std::vector<bool>(scores.size()), threshold, std::move(score_source)};
  for (std::size_t i = 0; i < scores.size(); ++i) det.labels[i] = scores[i] >= threshold;
  return det;
}

std::vector<bool> point_adjust(std::vector<bool> labels, const Segment& truth) {
  if (truth.start > truth.end || truth.end >= labels.size()) {
    throw InputError("point_adjust: segment outside the label sequence");
  }
  bool hit = false;
  for (std::size_t i = truth.start; i <= truth.end && !hit; ++i) hit = labels[i];
  if (hit) {
    for (std::size_t i = truth.start; i <= truth.end; ++i) labels[i] = true;
  }
  return labels;
}

}  // namespace tsad::evt
