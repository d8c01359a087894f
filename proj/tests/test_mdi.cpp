#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "tsad/ingest.hpp"
#include "tsad/mdi.hpp"

using namespace tsad;
using namespace tsad::mdi;
using doctest::Approx;

namespace {

TimeSeries series_of(std::vector<double> v) { return TimeSeries{std::move(v), "t", {}, {}, AnomalyType::unknown}; }

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd(0.0, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = nd(eng);
  return x;
}

}  // namespace

TEST_CASE("gaussian_kl closed form") {
  CHECK(gaussian_kl(0, 1, 0, 1) == 0.0);
  CHECK(gaussian_kl(1, 1, 0, 1) == Approx(0.5));
  CHECK(gaussian_kl(0, 4, 0, 1) == Approx(std::log(0.5) + 2.0 - 0.5));
  CHECK(gaussian_kl(0, 4, 0, 1) == Approx(0.8068528194));
  // flat interval: floored, finite
  CHECK(std::isfinite(gaussian_kl(0, 0, 0, 1)));
  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> u(0.01, 5);
  for (int i = 0; i < 200; ++i) {
    const double m1 = u(eng), v1 = u(eng), m2 = u(eng), v2 = u(eng);
    CHECK(gaussian_kl(m1, v1, m2, v2) == Approx(oracle::gaussian_kl(m1, v1, m2, v2)).epsilon(1e-12));
    CHECK(gaussian_kl(m1, v1, m2, v2) >= 0.0);
  }
}

TEST_CASE("hotelling_flags") {
  auto x = gaussian(1000, 3);
  x[321] = 10.0;
  const auto flags = hotelling_flags(x, 0.99);
  CHECK(std::find(flags.begin(), flags.end(), 321) != flags.end());

  SUBCASE("matches a full-sort quantile filter") {
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    std::vector<double> t2;
    for (double v : x) t2.push_back((v - mean) * (v - mean) / var);
    for (double q : {0.5, 0.9, 0.99}) {
      const double cut = oracle::quantile(t2, q);
      std::vector<std::size_t> expected;
      for (std::size_t i = 0; i < t2.size(); ++i) {
        if (t2[i] > cut) expected.push_back(i);
      }
      CHECK(hotelling_flags(x, q) == expected);
    }
  }
  CHECK(hotelling_flags(std::vector<double>(50, 2.0), 0.99).empty());
  CHECK_THROWS_AS(hotelling_flags(x, 1.0), InputError);
}

TEST_CASE("interval_divergence matches direct two-part fits") {
  const auto x = gaussian(300, 5);
  std::mt19937_64 eng(6);
  for (int i = 0; i < 100; ++i) {
    const std::size_t L = 1 + eng() % 150;
    const std::size_t a = eng() % (x.size() - L + 1);
    CHECK(interval_divergence(x, a, L) == Approx(oracle::interval_divergence(x, a, L)).epsilon(1e-9));
  }
  const std::vector<double> constant(100, 0.5);
  CHECK(interval_divergence(constant, 10, 40) == 0.0);
  CHECK_THROWS_AS(interval_divergence(constant, 90, 20), InputError);
}

TEST_CASE("mdi_scan finds the exhaustive-scan optimum") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto x = gaussian(500, 40 + seed, 0.2);
    for (std::size_t i = 200 + seed * 20; i < 240 + seed * 20; ++i) x[i] += 0.3;
    const auto ts = series_of(normalize(x));
    const auto got = mdi_scan(ts, {20, 45, false, 0.99});
    const auto ref = oracle::brute_mdi(ts.values, 20, 45);
    CHECK(got.top.start == ref.start);
    CHECK(got.top.length == ref.length);
    CHECK(got.top.divergence == Approx(ref.divergence).epsilon(1e-9));
    CHECK(got.intervals_scored == (500 - 20 + 1) * 26 - 25 * 26 / 2);
  }
}

TEST_CASE("mdi_scan per-timestamp scores") {
  auto x = gaussian(300, 9, 0.2);
  const auto ts = series_of(normalize(x));
  const MdiConfig cfg{10, 30, false, 0.99};
  const auto r = mdi_scan(ts, cfg);
  REQUIRE(r.scores.size() == 300);
  CHECK(r.scores.detector_id == "mdi");
  for (std::size_t t = 0; t < 300; t += 7) {
    double best = 0.0;
    bool any = false;
    for (std::size_t a = 0; a <= t; ++a) {
      for (std::size_t L = 10; L <= 30 && a + L <= 300; ++L) {
        if (t < a + L) {
          const double d = oracle::interval_divergence(ts.values, a, L);
          best = any ? std::max(best, d) : d;
          any = true;
        }
      }
    }
    CHECK(r.scores.scores[t] == Approx(best).epsilon(1e-9));
  }
  CHECK(mdi_scan(ts, cfg, Execution::serial).scores.scores == r.scores.scores);
}

TEST_CASE("mdi_scan is invariant to affine transforms") {
  auto x = gaussian(400, 12);
  for (std::size_t i = 100; i < 130; ++i) x[i] *= 3.0;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.5 * x[i] - 40.0;
  const MdiConfig cfg{15, 40, false, 0.99};
  const auto rx = mdi_scan(series_of(x), cfg);
  const auto ry = mdi_scan(series_of(y), cfg);
  CHECK(rx.top.start == ry.top.start);
  CHECK(rx.top.length == ry.top.length);
  CHECK(rx.top.divergence == Approx(ry.top.divergence).epsilon(1e-9));
}

TEST_CASE("mdi_scan on white noise is not localized") {
  const auto x = gaussian(2000, 21);
  const auto r = mdi_scan(series_of(normalize(x)), {75, 125, false, 0.99});
  std::vector<double> s = r.scores.scores;
  std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(s.size() / 2), s.end());
  const double median = s[s.size() / 2];
  CHECK(*std::max_element(s.begin(), s.end()) <= 3.0 * median);
}

TEST_CASE("mdi_scan locates an injected variance bump") {
  const auto base = gaussian(3000, 31, 0.1);
  const auto ts = inject(base, {AnomalyType::noise, 1800, 60, 0.3, 7});
  const auto r = mdi_scan(ts, {75, 125, false, 0.99});
  const auto ref = oracle::brute_mdi(ts.values, 75, 125);
  CHECK(r.top.start == ref.start);
  CHECK(ts.anomaly->contains(r.top.midpoint()));
  CHECK(r.scores.scores[r.top.midpoint()] == r.scores.scores[argmax(r.scores.scores)]);
}

TEST_CASE("proposals restrict the scan") {
  auto x = gaussian(800, 50, 0.2);
  for (std::size_t i = 500; i < 540; ++i) x[i] += 1.0;
  const auto ts = series_of(normalize(x));
  const auto full = mdi_scan(ts, {30, 60, false, 0.99});
  const auto prop = mdi_scan(ts, {30, 60, true, 0.99});
  CHECK(prop.intervals_scored < full.intervals_scored);
  CHECK(prop.top.divergence <= full.top.divergence);
  CHECK(prop.top.divergence >= 0.95 * full.top.divergence);
  CHECK(mdi_scan(ts, {30, 60, true, 0.99}, Execution::serial).scores.scores == prop.scores.scores);
}

TEST_CASE("mdi config errors") {
  const auto ts = series_of(gaussian(100, 1));
  CHECK_THROWS_AS(mdi_scan(ts, {10, 100, false, 0.99}), InputError);
  CHECK_THROWS_AS(mdi_scan(ts, {30, 20, false, 0.99}), InputError);
  CHECK_THROWS_AS(mdi_scan(ts, {10, 20, true, 0.0}), InputError);
}
