#include "tsad/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsad {

namespace {

struct TypeName {
  AnomalyType type;
  std::string_view name;
};

constexpr std::array<TypeName, kInjectableTypeCount + 1> kTypeNames{{
    {AnomalyType::amplitude_change, "amplitude_change"},
    {AnomalyType::flat, "flat"},
    {AnomalyType::frequency_change, "frequency_change"},
    {AnomalyType::local_drop, "local_drop"},
    {AnomalyType::local_peak, "local_peak"},
    {AnomalyType::missing_drop, "missing_drop"},
    {AnomalyType::missing_peak, "missing_peak"},
    {AnomalyType::noise, "noise"},
    {AnomalyType::outlier, "outlier"},
    {AnomalyType::reversed, "reversed"},
    {AnomalyType::sampling_rate, "sampling_rate"},
    {AnomalyType::signal_shift, "signal_shift"},
    {AnomalyType::smoothed_increase, "smoothed_increase"},
    {AnomalyType::steep_increase, "steep_increase"},
    {AnomalyType::time_shift, "time_shift"},
    {AnomalyType::time_warping, "time_warping"},
    {AnomalyType::unusual_pattern, "unusual_pattern"},
    {AnomalyType::unknown, "unknown"},
}};

}  // namespace

const std::array<AnomalyType, kInjectableTypeCount>& injectable_types() {
  static const auto types = [] {
    std::array<AnomalyType, kInjectableTypeCount> out{};
    for (std::size_t i = 0; i < kInjectableTypeCount; ++i) out[i] = kTypeNames[i].type;
    return out;
  }();
  return types;
}

std::string_view to_string(AnomalyType type) {
  for (const auto& entry : kTypeNames) {
    if (entry.type == type) return entry.name;
  }
  return "unknown";
}

std::optional<AnomalyType> parse_anomaly_type(std::string_view text) {
  for (const auto& entry : kTypeNames) {
    if (entry.name == text) return entry.type;
  }
  return std::nullopt;
}

void TimeSeries::validate() const {
  if (values.empty()) throw InputError("time series '" + name + "' is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InputError("time series '" + name + "' has a non-finite value at index " +
                       std::to_string(i));
    }
  }
  if (anomaly) {
    if (anomaly->start > anomaly->end || anomaly->end >= values.size()) {
      throw InputError("time series '" + name + "' has anomaly segment [" +
                       std::to_string(anomaly->start) + ", " + std::to_string(anomaly->end) +
                       "] outside [0, " + std::to_string(values.size()) + ")");
    }
  }
}

std::vector<bool> TimeSeries::truth() const {
  std::vector<bool> out(values.size(), false);
  if (anomaly) {
    for (std::size_t i = anomaly->start; i <= anomaly->end && i < out.size(); ++i) out[i] = true;
  }
  return out;
}

Subsequence::Subsequence(std::span<const double> parent, std::size_t start, std::size_t end)
    : parent_(parent), start_(start), end_(end) {
  if (start >= end || end > parent.size()) {
    throw InputError("subsequence [" + std::to_string(start) + ", " + std::to_string(end) +
                     ") is not a nonempty window of a series of length " +
                     std::to_string(parent.size()));
  }
}

std::vector<double> normalize(std::span<const double> values) {
  if (values.empty()) throw InputError("normalize: empty input");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InputError("normalize: non-finite value at index " + std::to_string(i));
    }
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  std::vector<double> out(values.size());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / range;
  return out;
}

ScoreSeries expand_window_scores(std::span<const double> window_scores, std::size_t window_length,
                                 std::size_t stride, std::size_t series_length,
                                 std::string detector_id) {
  if (window_length == 0) throw InputError("expand_window_scores: window_length must be > 0");
  if (stride == 0) throw InputError("expand_window_scores: stride must be > 0");

  ScoreSeries out{std::vector<double>(series_length, -std::numeric_limits<double>::infinity()),
                  std::move(detector_id)};
  double floor_score = 0.0;
  if (!window_scores.empty()) {
    floor_score = *std::min_element(window_scores.begin(), window_scores.end());
  }
  for (std::size_t k = 0; k < window_scores.size(); ++k) {
    const std::size_t begin = k * stride;
    if (begin >= series_length) break;
    const std::size_t end = std::min(series_length, begin + window_length);
    for (std::size_t t = begin; t < end; ++t) out.scores[t] = std::max(out.scores[t], window_scores[k]);
  }
  for (auto& s : out.scores) {
    if (s == -std::numeric_limits<double>::infinity()) s = floor_score;
  }
  return out;
}

WindowMoments window_moments(std::span<const double> window) {
  WindowMoments m;
  if (window.empty()) return m;
  double sum = 0.0;
  for (double v : window) sum += v;
  m.mean = sum / static_cast<double>(window.size());
  double ss = 0.0;
  for (double v : window) ss += (v - m.mean) * (v - m.mean);
  m.stddev = std::sqrt(ss / static_cast<double>(window.size()));
  return m;
}

void znormalize(std::span<const double> window, std::span<double> out) {
  const auto m = window_moments(window);
  if (m.stddev < kFlatStdEpsilon) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(window.size()), 0.0);
    return;
  }
  for (std::size_t i = 0; i < window.size(); ++i) out[i] = (window[i] - m.mean) / m.stddev;
}

double znorm_distance(const Subsequence& a, const Subsequence& b) {
  if (a.length() != b.length()) {
    throw InputError("znorm_distance: lengths differ (" + std::to_string(a.length()) + " vs " +
                     std::to_string(b.length()) + ")");
  }
  const std::size_t n = a.length();
  std::vector<double> za(n), zb(n);
  znormalize(a.values(), za);
  znormalize(b.values(), zb);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (za[i] - zb[i]) * (za[i] - zb[i]);
  return std::sqrt(ss);
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace tsad
