#include "tsad/merlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tsad::merlin {

namespace {

// Per-window z-normalization parameters; flat windows get scale 0 so their
// z-normalized values are all zero.
struct WindowTable {
  std::size_t length;
  std::vector<double> mean;
  std::vector<double> inv_std;
};

WindowTable window_table(std::span<const double> x, std::size_t length) {
  const std::size_t count = x.size() - length + 1;
  WindowTable t{length, std::vector<double>(count), std::vector<double>(count)};
  for (std::size_t i = 0; i < count; ++i) {
    const auto m = window_moments(x.subspan(i, length));
    t.mean[i] = m.mean;
    t.inv_std[i] = m.stddev < kFlatStdEpsilon ? 0.0 : 1.0 / m.stddev;
  }
  return t;
}

// Squared z-normalized distance, abandoned (returning a value >= limit) once
// the partial sum reaches limit.
double squared_distance(std::span<const double> x, const WindowTable& t, std::size_t i,
                        std::size_t j, double limit) {
  const double mi = t.mean[i], si = t.inv_std[i];
  const double mj = t.mean[j], sj = t.inv_std[j];
  const double* a = x.data() + i;
  const double* b = x.data() + j;
  double sum = 0.0;
  for (std::size_t k = 0; k < t.length; ++k) {
    const double d = (a[k] - mi) * si - (b[k] - mj) * sj;
    sum += d * d;
    if (sum >= limit) return sum;
  }
  return sum;
}

bool non_self(std::size_t i, std::size_t j, std::size_t length) {
  return (i > j ? i - j : j - i) >= length;
}

// Exact nearest non-self match distance of candidate c, or nullopt once some
// match falls below r (c cannot be a discord at this r) or no match exists.
std::optional<double> refine(std::span<const double> x, const WindowTable& t, std::size_t c,
                             double r_sq) {
  const std::size_t count = t.mean.size();
  double nn = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t j = 0; j < count; ++j) {
    if (!non_self(c, j, t.length)) continue;
    any = true;
    const double d = squared_distance(x, t, c, j, nn);
    if (d < nn) {
      nn = d;
      if (nn < r_sq) return std::nullopt;
    }
  }
  if (!any) return std::nullopt;
  return nn;
}

}  // namespace

double r_max(std::size_t length) { return 2.0 * std::sqrt(static_cast<double>(length)); }

std::optional<Discord> discords_at_length(std::span<const double> x, std::size_t length, double r,
                                          Execution exec) {
  if (length == 0 || 2 * length >= x.size()) {
    throw InputError("discords_at_length: need 1 <= L < n/2, got L=" + std::to_string(length) +
                     ", n=" + std::to_string(x.size()));
  }
  if (!(r > 0.0)) throw InputError("discords_at_length: r must be > 0");

  const auto table = window_table(x, length);
  const std::size_t count = table.mean.size();
  const double r_sq = r * r;

  // Candidate selection: keep every window without a non-self match closer than r.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < count; ++i) {
    bool is_candidate = true;
    for (std::size_t k = 0; k < candidates.size();) {
      const std::size_t j = candidates[k];
      if (non_self(i, j, length) && squared_distance(x, table, i, j, r_sq) < r_sq) {
        candidates[k] = candidates.back();
        candidates.pop_back();
        is_candidate = false;
      } else {
        ++k;
      }
    }
    if (is_candidate) candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end());

  // Refinement: exact nearest-neighbour distance of each survivor.
  std::vector<double> nn(candidates.size(), -1.0);
  const auto total = static_cast<std::ptrdiff_t>(candidates.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < total; ++k) {
      if (auto d = refine(x, table, candidates[static_cast<std::size_t>(k)], r_sq)) nn[static_cast<std::size_t>(k)] = *d;
    }
  } else {
    for (std::ptrdiff_t k = 0; k < total; ++k) {
      if (auto d = refine(x, table, candidates[static_cast<std::size_t>(k)], r_sq)) nn[static_cast<std::size_t>(k)] = *d;
    }
  }

  std::optional<Discord> best;
  double best_sq = -1.0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (nn[k] >= 0.0 && nn[k] > best_sq) {
      best_sq = nn[k];
      best = Discord{length, candidates[k], 0.0};
    }
  }
  if (best) best->distance = std::sqrt(best_sq);
  return best;
}

std::optional<Discord> ScanResult::top() const {
  std::optional<Discord> best;
  for (const auto& d : discords) {
    if (!best || d.distance > best->distance) best = d;
  }
  return best;
}

std::vector<bool> ScanResult::labels(std::size_t series_length) const {
  std::vector<bool> out(series_length, false);
  for (const auto& d : discords) {
    for (std::size_t t = d.start; t < d.start + d.length && t < series_length; ++t) out[t] = true;
  }
  return out;
}

ScanResult merlin_scan(const TimeSeries& series, std::size_t min_length, std::size_t max_length,
                       Execution exec) {
  const auto& x = series.values;
  if (min_length < 1 || min_length > max_length || 2 * max_length >= x.size()) {
    throw InputError("merlin_scan: need 1 <= L_min <= L_max < n/2, got [" +
                     std::to_string(min_length) + ", " + std::to_string(max_length) +
                     "] for n=" + std::to_string(x.size()));
  }

  ScanResult result;
  result.scores = ScoreSeries{std::vector<double>(x.size(), 0.0), "merlin"};
  std::optional<double> previous;
  for (std::size_t length = min_length; length <= max_length; ++length) {
    double r = previous ? 0.99 * *previous : r_max(length);
    std::optional<Discord> found;
    for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
      if (r > 0.0) found = discords_at_length(x, length, r, exec);
      if (found || !(r > 0.0)) break;
      r *= 0.5;
    }
    if (!found) {
      result.lengths_without_discord.push_back(length);
      previous.reset();
      continue;
    }
    previous = found->distance;
    result.discords.push_back(*found);
    for (std::size_t t = found->start; t < found->start + length; ++t) {
      result.scores.scores[t] = std::max(result.scores.scores[t], found->distance);
    }
  }
  return result;
}

}  // namespace tsad::merlin
