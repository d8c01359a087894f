#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "tsad/core.hpp"
#include "tsad/rng.hpp"

using namespace tsad;
using doctest::Approx;

TEST_CASE("normalize maps to the unit interval") {
  CHECK(normalize(std::vector<double>{0, 5, 10}) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(normalize(std::vector<double>{3, 3, 3}) == std::vector<double>{0.5, 0.5, 0.5});
  CHECK(normalize(std::vector<double>{-1, 0, 3}) == std::vector<double>{0.0, 0.25, 1.0});
}

TEST_CASE("normalize is idempotent on normalized input") {
  std::mt19937_64 eng(5);
  std::normal_distribution<double> nd;
  std::vector<double> x(200);
  for (auto& v : x) v = nd(eng);
  const auto once = normalize(x);
  const auto twice = normalize(once);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(twice[i] == Approx(once[i]).epsilon(1e-15));
}

TEST_CASE("normalize rejects non-finite values by index") {
  const std::vector<double> x{1.0, 2.0, std::numeric_limits<double>::quiet_NaN(), 4.0};
  CHECK_THROWS_WITH_AS(normalize(x), doctest::Contains("index 2"), InputError);
  const std::vector<double> inf{std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(normalize(inf), InputError);
  CHECK_THROWS_AS(normalize(std::vector<double>{}), InputError);
}

TEST_CASE("expand_window_scores takes the max over covering windows") {
  CHECK(expand_window_scores(std::vector<double>{1, 3}, 2, 1, 3).scores == std::vector<double>{1, 3, 3});
  CHECK(expand_window_scores(std::vector<double>{5}, 3, 3, 3).scores == std::vector<double>{5, 5, 5});
  // uncovered tail takes the smallest window score
  CHECK(expand_window_scores(std::vector<double>{4, 2}, 2, 2, 6).scores ==
        std::vector<double>{4, 4, 2, 2, 2, 2});
  CHECK_THROWS_AS(expand_window_scores(std::vector<double>{1}, 0, 1, 3), InputError);
  CHECK_THROWS_AS(expand_window_scores(std::vector<double>{1}, 1, 0, 3), InputError);
}

TEST_CASE("expand_window_scores matches a per-timestamp brute force") {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t L = 1 + eng() % 12, stride = 1 + eng() % 12, n = L + eng() % 80;
    const std::size_t windows = (n - L) / stride + 1;
    std::vector<double> w(windows);
    for (auto& v : w) v = u(eng);
    const auto got = expand_window_scores(w, L, stride, n, "x");
    REQUIRE(got.size() == n);
    CHECK(got.detector_id == "x");
    const double lowest = *std::min_element(w.begin(), w.end());
    for (std::size_t t = 0; t < n; ++t) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < windows; ++k) {
        if (t >= k * stride && t < k * stride + L) best = std::max(best, w[k]);
      }
      CHECK(got.scores[t] == (std::isinf(best) ? lowest : best));
    }
  }
}

TEST_CASE("znorm_distance") {
  const std::vector<double> s{1, 4, 2, 8, 5, 7};
  std::vector<double> affine(s.size()), anti(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    affine[i] = 3.5 * s[i] - 2.0;
    anti[i] = -s[i];
  }
  const Subsequence a(s, 0, s.size());
  CHECK(znorm_distance(a, a) == 0.0);
  CHECK(znorm_distance(a, Subsequence(affine, 0, 6)) == Approx(0.0).epsilon(1e-12));
  CHECK(znorm_distance(a, Subsequence(anti, 0, 6)) == Approx(2.0 * std::sqrt(6.0)).epsilon(1e-12));

  SUBCASE("flat windows use the zero vector") {
    const std::vector<double> flat{2, 2, 2, 2, 2, 2};
    const Subsequence f(flat, 0, 6);
    CHECK(znorm_distance(f, f) == 0.0);
    CHECK(znorm_distance(a, f) == Approx(std::sqrt(6.0)));
  }
  SUBCASE("length mismatch") { CHECK_THROWS_AS(znorm_distance(a, Subsequence(s, 0, 5)), InputError); }
}

TEST_CASE("znorm_distance is symmetric and bounded, against the oracle") {
  std::mt19937_64 eng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t L = 2 + eng() % 40;
    std::vector<double> x(L), y(L);
    for (auto& v : x) v = nd(eng);
    for (auto& v : y) v = nd(eng) * 10 + 3;
    const Subsequence sx(x, 0, L), sy(y, 0, L);
    const double d = znorm_distance(sx, sy);
    CHECK(d == znorm_distance(sy, sx));
    CHECK(d <= 2.0 * std::sqrt(static_cast<double>(L)) + 1e-12);
    const auto zx = oracle::znorm(x.data(), L), zy = oracle::znorm(y.data(), L);
    double ss = 0;
    for (std::size_t i = 0; i < L; ++i) ss += (zx[i] - zy[i]) * (zx[i] - zy[i]);
    CHECK(d == Approx(std::sqrt(ss)).epsilon(1e-12));
  }
}

TEST_CASE("Subsequence bounds") {
  const std::vector<double> x{1, 2, 3};
  CHECK_THROWS_AS(Subsequence(x, 2, 2), InputError);
  CHECK_THROWS_AS(Subsequence(x, 0, 4), InputError);
  CHECK(Subsequence(x, 1, 3).length() == 2);
}

TEST_CASE("argmax prefers the smallest index on ties") {
  CHECK(argmax(std::vector<double>{1, 3, 2, 3}) == 1);
  CHECK(argmax(std::vector<double>{7}) == 0);
}

TEST_CASE("TimeSeries truth and validation") {
  TimeSeries ts;
  ts.values = {0, 1, 2, 3, 4};
  ts.anomaly = Segment{1, 3};
  CHECK(ts.truth() == std::vector<bool>{false, true, true, true, false});
  CHECK(ts.anomaly->span() == 2);
  CHECK(ts.anomaly->points() == 3);
  CHECK_NOTHROW(ts.validate());
  ts.anomaly = Segment{3, 5};
  CHECK_THROWS_AS(ts.validate(), InputError);
}

TEST_CASE("anomaly type names round-trip") {
  for (auto t : injectable_types()) CHECK(parse_anomaly_type(to_string(t)) == t);
  CHECK_FALSE(parse_anomaly_type("bogus").has_value());
}

TEST_CASE("Rng matches the documented algorithm") {
  Rng rng(1234);
  std::mt19937_64 ref(1234);
  for (int i = 0; i < 100; ++i) CHECK(rng.uniform() == static_cast<double>(ref() >> 11) * 0x1.0p-53);

  Rng gauss(99);
  oracle::BoxMuller bm(99);
  for (int i = 0; i < 101; ++i) CHECK(gauss.normal() == bm.next());
}

TEST_CASE("Rng index is unbiased enough and in range") {
  Rng rng(7);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const auto k = rng.index(6);
    REQUIRE(k < 6);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}
