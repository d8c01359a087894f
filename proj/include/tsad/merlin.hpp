#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tsad/core.hpp"
#include "tsad/execution.hpp"

namespace tsad::merlin {

/// The subsequence of a given length whose nearest non-self match (start at
/// least `length` away) is farthest, under z-normalized Euclidean distance.
struct Discord {
  std::size_t length = 0;
  std::size_t start = 0;
  double distance = 0.0;

  std::size_t midpoint() const { return start + length / 2; }
  bool operator==(const Discord&) const = default;
};

/// Upper bound of the z-normalized distance between two windows of length L.
double r_max(std::size_t length);

/// Two-phase discord search with range r. Returns nullopt when no subsequence
/// has its nearest non-self match at distance >= r (r chosen too large).
/// Subsequences that have no non-self match at all are never reported.
std::optional<Discord> discords_at_length(std::span<const double> values, std::size_t length,
                                          double r, Execution exec = Execution::parallel);

struct ScanResult {
  ScoreSeries scores;
  std::vector<Discord> discords;  // one per length that produced a discord
  std::vector<std::size_t> lengths_without_discord;

  /// Discord with the largest distance (first on ties); nullopt if none.
  std::optional<Discord> top() const;
  /// Union of the discord windows; the detector's binary output.
  std::vector<bool> labels(std::size_t series_length) const;
};

// Largest number of r halvings before a length is given up (flat series).
inline constexpr int kMaxHalvings = 60;

/// Discords for every length in [min_length, max_length]. r starts at
/// r_max(min_length) and is halved until a discord appears; each following
/// length starts from 0.99 x the previous length's discord distance.
ScanResult merlin_scan(const TimeSeries& series, std::size_t min_length, std::size_t max_length,
                       Execution exec = Execution::parallel);

}  // namespace tsad::merlin
