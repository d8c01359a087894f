#pragma once

#include <span>
#include <vector>

#include "tsad/core.hpp"
#include "tsad/execution.hpp"

namespace tsad::mdi {

inline constexpr double kVarianceFloor = 1e-10;

/// KL(N(mu1, var1) || N(mu2, var2)); both variances are floored at kVarianceFloor.
double gaussian_kl(double mu1, double var1, double mu2, double var2);

/// Indices whose point-wise Hotelling T^2 score (x - mean)^2 / var exceeds the
/// empirical `quantile` of all scores. Empty for a constant series.
std::vector<std::size_t> hotelling_flags(std::span<const double> values, double quantile);

struct Interval {
  std::size_t start = 0;
  std::size_t length = 0;
  double divergence = 0.0;

  std::size_t midpoint() const { return start + length / 2; }
};

struct MdiConfig {
  std::size_t min_length = 75;
  std::size_t max_length = 125;
  bool use_proposals = false;
  double proposal_quantile = 0.99;

  void validate(std::size_t series_length) const;
};

/// Length-weighted divergence L * KL(p_S || p_rest) of interval [start, start+L)
/// against the rest of the series, with Gaussian MLE fits on both parts.
double interval_divergence(std::span<const double> values, std::size_t start, std::size_t length);

struct MdiResult {
  ScoreSeries scores;       // per timestamp: max divergence over the intervals covering it
  Interval top;             // best interval (first start, then shortest, on ties)
  std::size_t intervals_scored = 0;
};

MdiResult mdi_scan(const TimeSeries& series, const MdiConfig& config,
                   Execution exec = Execution::parallel);

}  // namespace tsad::mdi
