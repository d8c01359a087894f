#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsad {

/// Raised when caller-supplied data or arguments violate a documented precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a file or file name cannot be parsed.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Standard deviation below which a window is treated as flat (z-norm = 0 vector).
inline constexpr double kFlatStdEpsilon = 1e-8;

enum class AnomalyType {
  amplitude_change,
  flat,
  frequency_change,
  local_drop,
  local_peak,
  missing_drop,
  missing_peak,
  noise,
  outlier,
  reversed,
  sampling_rate,
  signal_shift,
  smoothed_increase,
  steep_increase,
  time_shift,
  time_warping,
  unusual_pattern,
  unknown,
};

inline constexpr std::size_t kInjectableTypeCount = 17;

const std::array<AnomalyType, kInjectableTypeCount>& injectable_types();
std::string_view to_string(AnomalyType type);
std::optional<AnomalyType> parse_anomaly_type(std::string_view text);

/// Closed index range [start, end] of the ground-truth anomaly.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t span() const { return end - start; }
  std::size_t points() const { return end - start + 1; }
  bool contains(std::size_t i) const { return i >= start && i <= end; }
  bool operator==(const Segment&) const = default;
};

/// A regular univariate series. Timestamps are the implicit indices 0..size()-1.
struct TimeSeries {
  std::vector<double> values;
  std::string name;
  std::optional<std::size_t> train_end;
  std::optional<Segment> anomaly;
  AnomalyType anomaly_type = AnomalyType::unknown;

  std::size_t size() const { return values.size(); }
  /// Throws InputError when the segment or values break the type's invariants.
  void validate() const;
  /// Per-timestamp ground truth; all false when unlabeled.
  std::vector<bool> truth() const;
};

/// Window [start, end) into a parent series.
class Subsequence {
 public:
  Subsequence(std::span<const double> parent, std::size_t start, std::size_t end);

  std::size_t start() const { return start_; }
  std::size_t end() const { return end_; }
  std::size_t length() const { return end_ - start_; }
  std::span<const double> values() const { return parent_.subspan(start_, end_ - start_); }

 private:
  std::span<const double> parent_;
  std::size_t start_;
  std::size_t end_;
};

/// Per-timestamp scores; larger is more anomalous.
struct ScoreSeries {
  std::vector<double> scores;
  std::string detector_id;

  std::size_t size() const { return scores.size(); }
};

/// Binary labels produced by thresholding a ScoreSeries.
struct Detection {
  std::vector<bool> labels;
  double threshold = 0.0;
  std::string score_source;
};

/// Min-max scaling to [0, 1]. A constant input maps to 0.5 everywhere.
std::vector<double> normalize(std::span<const double> values);

/// Maps window-level scores (window k starts at k * stride) back onto the series:
/// each timestamp takes the max over the windows covering it, uncovered
/// timestamps take the smallest window score.
ScoreSeries expand_window_scores(std::span<const double> window_scores, std::size_t window_length,
                                 std::size_t stride, std::size_t series_length,
                                 std::string detector_id = {});

/// Writes the z-normalized window into out; flat windows become all zeros.
void znormalize(std::span<const double> window, std::span<double> out);

double znorm_distance(const Subsequence& a, const Subsequence& b);

/// Mean and population standard deviation of a window (two-pass).
struct WindowMoments {
  double mean = 0.0;
  double stddev = 0.0;
};
WindowMoments window_moments(std::span<const double> window);

/// Index of the largest value; ties resolve to the smallest index.
std::size_t argmax(std::span<const double> values);

}  // namespace tsad
