#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsad/core.hpp"

namespace tsad::evt {

/// Generalized Pareto fit of threshold excesses: scale beta > 0, shape gamma.
struct GpdFit {
  double beta = 1.0;
  double gamma = 0.0;
  std::size_t n_peaks = 0;
  double th0 = 0.0;
};

inline constexpr std::size_t kMinExcesses = 8;

double gpd_log_likelihood(std::span<const double> excesses, double beta, double gamma);

/// Maximum-likelihood GPD fit. The likelihood is profiled onto
/// theta = gamma / beta (gamma = mean log(1 + theta y), beta = gamma / theta),
/// searched on a grid with golden-section refinement and compared with the
/// exponential (gamma = 0) fit. Shapes below -0.5 are not considered.
/// nullopt when fewer than kMinExcesses values are given or all are equal.
std::optional<GpdFit> fit_gpd(std::span<const double> excesses);

enum class Orientation { upper, lower };

struct PotConfig {
  double q = 0.01;
  double init_fraction = 0.10;
  double th0_quantile = 0.98;
  std::size_t refit_cadence = 32;
  Orientation orientation = Orientation::upper;

  void validate() const;
};

/// Type-7 (linear interpolation) empirical quantile.
double empirical_quantile(std::span<const double> values, double p);

/// th0 + (beta/gamma) * ((q n / N_t)^-gamma - 1) for the upper tail, with the
/// gamma -> 0 limit th0 + beta * ln(N_t / (q n)).
double tail_threshold(double th0, const GpdFit& fit, double q, std::size_t n);

struct PotResult {
  double threshold = 0.0;
  double th0 = 0.0;
  std::optional<GpdFit> fit;
};

/// Batch peaks-over-threshold on all scores. Falls back to th0 when no fit is available.
PotResult pot(std::span<const double> scores, const PotConfig& config);
double pot_threshold(std::span<const double> scores, const PotConfig& config);

/// Streaming peaks-over-threshold. Scores at or beyond the threshold are
/// anomalies and never enter the tail model; other scores beyond th0 are
/// added as peaks and the model is refit every refit_cadence new peaks.
class StreamingPot {
 public:
  StreamingPot(std::span<const double> init_scores, const PotConfig& config);

  /// Labels one score and updates the tail model.
  bool step(double score);
  /// Label rule against the current threshold, without updating.
  bool is_anomaly(double score) const;

  double threshold() const;  // in the caller's score orientation
  double th0() const;
  const std::optional<GpdFit>& fit() const { return fit_; }

 private:
  void refit();
  double oriented(double score) const;

  PotConfig config_;
  double th0_ = 0.0;       // upper-tail frame
  double threshold_ = 0.0;  // upper-tail frame
  std::vector<double> peaks_;
  std::size_t seen_ = 0;
  std::size_t pending_ = 0;
  std::optional<GpdFit> fit_;
};

/// Initializes on the first init_fraction of the scores, labels those
/// retroactively against the initial threshold, then streams the rest.
/// Detection::threshold holds the threshold in force at the end of the stream.
Detection streaming_pot(std::span<const double> scores, const PotConfig& config,
                        std::string score_source = {});

/// labels[i] = scores[i] >= threshold.
Detection classify(std::span<const double> scores, double threshold, std::string score_source = {});

/// Marks the whole truth segment once any label inside it is set.
std::vector<bool> point_adjust(std::vector<bool> labels, const Segment& truth);

}  // namespace tsad::evt
