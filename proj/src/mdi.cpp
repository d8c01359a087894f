#include "tsad/mdi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tsad::mdi {

double gaussian_kl(double mu1, double var1, double mu2, double var2) {
  var1 = std::max(var1, kVarianceFloor);
  var2 = std::max(var2, kVarianceFloor);
  const double dm = mu1 - mu2;
  return 0.5 * std::log(var2 / var1) + (var1 + dm * dm) / (2.0 * var2) - 0.5;
}

namespace {

// Type-7 empirical quantile of an already sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Prefix sums of the centred series, in extended precision, for O(1) moments.
class Moments {
 public:
  explicit Moments(std::span<const double> x) : n_(x.size()), s1_(x.size() + 1), s2_(x.size() + 1) {
    long double centre = 0.0L;
    for (double v : x) centre += v;
    centre /= static_cast<long double>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const long double c = static_cast<long double>(x[i]) - centre;
      s1_[i + 1] = s1_[i] + c;
      s2_[i + 1] = s2_[i] + c * c;
    }
  }

  double divergence(std::size_t start, std::size_t length) const {
    const long double in1 = s1_[start + length] - s1_[start];
    const long double in2 = s2_[start + length] - s2_[start];
    const long double out1 = s1_[n_] - in1;
    const long double out2 = s2_[n_] - in2;
    const auto len = static_cast<long double>(length);
    const auto rest = static_cast<long double>(n_ - length);
    const long double mu_in = in1 / len;
    const long double mu_out = out1 / rest;
    const long double var_in = in2 / len - mu_in * mu_in;
    const long double var_out = out2 / rest - mu_out * mu_out;
    return static_cast<double>(len) * gaussian_kl(static_cast<double>(mu_in), static_cast<double>(var_in),
                                                  static_cast<double>(mu_out), static_cast<double>(var_out));
  }

 private:
  std::size_t n_;
  std::vector<long double> s1_;
  std::vector<long double> s2_;
};

}  // namespace

std::vector<std::size_t> hotelling_flags(std::span<const double> x, double quantile) {
  if (!(quantile > 0.0 && quantile < 1.0)) throw InputError("hotelling_flags: quantile must lie in (0, 1)");
  if (x.empty()) return {};
  const auto m = window_moments(x);
  const double var = m.stddev * m.stddev;
  if (!(var > 0.0)) return {};
  std::vector<double> t2(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) t2[i] = (x[i] - m.mean) * (x[i] - m.mean) / var;
  std::vector<double> sorted = t2;
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted_quantile(sorted, quantile);
  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i < t2.size(); ++i) {
    if (t2[i] > cut) flagged.push_back(i);
  }
  return flagged;
}

void MdiConfig::validate(std::size_t n) const {
  if (min_length < 1 || min_length > max_length) {
    throw InputError("mdi: need 1 <= L_min <= L_max, got [" + std::to_string(min_length) + ", " +
                     std::to_string(max_length) + "]");
  }
  if (max_length >= n) {
    throw InputError("mdi: L_max " + std::to_string(max_length) + " must be below the series length " +
                     std::to_string(n));
  }
  if (!(proposal_quantile > 0.0 && proposal_quantile < 1.0)) {
    throw InputError("mdi: proposal_quantile must lie in (0, 1)");
  }
}

double interval_divergence(std::span<const double> x, std::size_t start, std::size_t length) {
  if (length == 0 || length >= x.size() || start + length > x.size()) {
    throw InputError("interval_divergence: interval out of range");
  }
  return Moments(x).divergence(start, length);
}

MdiResult mdi_scan(const TimeSeries& series, const MdiConfig& config, Execution exec) {
  const auto& x = series.values;
  config.validate(x.size());
  const std::size_t n = x.size();
  const std::size_t lmin = config.min_length;
  const std::size_t lmax = config.max_length;
  const std::size_t widths = lmax - lmin + 1;
  const std::size_t starts = n - lmin + 1;
  constexpr double kUnscored = -std::numeric_limits<double>::infinity();

  // Proposal mask via prefix counts of flagged points.
  std::vector<std::size_t> flagged_prefix;
  if (config.use_proposals) {
    std::vector<bool> flagged(n, false);
    for (std::size_t i : hotelling_flags(x, config.proposal_quantile)) flagged[i] = true;
    flagged_prefix.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) flagged_prefix[i + 1] = flagged_prefix[i] + (flagged[i] ? 1 : 0);
  }

  const Moments moments(x);
  // div[a * widths + w] = divergence of [a, a + lmin + w), or kUnscored.
  std::vector<double> div(starts * widths, kUnscored);
  const auto start_count = static_cast<std::ptrdiff_t>(starts);
  auto score_start = [&](std::size_t a) {
    for (std::size_t w = 0; w < widths; ++w) {
      const std::size_t len = lmin + w;
      if (a + len > n) break;
      if (config.use_proposals && flagged_prefix[a + len] == flagged_prefix[a]) continue;
      div[a * widths + w] = moments.divergence(a, len);
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t a = 0; a < start_count; ++a) score_start(static_cast<std::size_t>(a));
  } else {
    for (std::ptrdiff_t a = 0; a < start_count; ++a) score_start(static_cast<std::size_t>(a));
  }

  MdiResult result;
  result.scores = ScoreSeries{std::vector<double>(n, 0.0), "mdi"};
  double best = kUnscored;
  for (std::size_t a = 0; a < starts; ++a) {
    for (std::size_t w = 0; w < widths; ++w) {
      const double d = div[a * widths + w];
      if (d == kUnscored) continue;
      ++result.intervals_scored;
      if (d > best) {
        best = d;
        result.top = Interval{a, lmin + w, d};
      }
    }
  }

  // Suffix maxima over lengths: tail[a * widths + w] = max over lengths >= lmin + w.
  std::vector<double> tail(div);
  for (std::size_t a = 0; a < starts; ++a) {
    for (std::size_t w = widths - 1; w-- > 0;) {
      tail[a * widths + w] = std::max(tail[a * widths + w], tail[a * widths + w + 1]);
    }
  }
  // Timestamp t is covered by [a, a + len) iff a <= t and len >= t - a + 1.
  auto score_point = [&](std::size_t t) {
    double s = kUnscored;
    const std::size_t a_lo = t + 1 > lmax ? t + 1 - lmax : 0;
    const std::size_t a_hi = std::min(t, starts - 1);
    for (std::size_t a = a_lo; a <= a_hi; ++a) {
      const std::size_t need = t - a + 1;
      const std::size_t w = need > lmin ? need - lmin : 0;
      s = std::max(s, tail[a * widths + w]);
    }
    result.scores.scores[t] = s == kUnscored ? 0.0 : s;
  };
  const auto point_count = static_cast<std::ptrdiff_t>(n);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < point_count; ++t) score_point(static_cast<std::size_t>(t));
  } else {
    for (std::ptrdiff_t t = 0; t < point_count; ++t) score_point(static_cast<std::size_t>(t));
  }
  return result;
}

}  // namespace tsad::mdi
