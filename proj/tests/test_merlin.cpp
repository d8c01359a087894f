#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "tsad/ingest.hpp"
#include "tsad/merlin.hpp"

using namespace tsad;
using namespace tsad::merlin;
using doctest::Approx;

namespace {

std::vector<double> noisy_sine(std::size_t n, double period, double sd, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd(0.0, sd);
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = std::sin(2.0 * M_PI * static_cast<double>(t) / period) + nd(eng);
  return x;
}

TimeSeries series_of(std::vector<double> v) { return TimeSeries{std::move(v), "t", {}, {}, AnomalyType::unknown}; }

}  // namespace

TEST_CASE("r_max") {
  CHECK(r_max(1) == 2.0);
  CHECK(r_max(100) == 20.0);
}

TEST_CASE("discords_at_length agrees with the brute-force search") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto x = noisy_sine(400, 40, 0.05, seed);
    x[150 + seed * 20] += 1.5;
    for (std::size_t L : {8, 20, 33}) {
      const auto ref = oracle::brute_discord(x, L);
      const auto got = discords_at_length(x, L, 0.5 * ref.distance);
      REQUIRE(got.has_value());
      CHECK(got->start == ref.start);
      CHECK(got->length == L);
      CHECK(got->distance == Approx(ref.distance).epsilon(1e-9));
      CHECK(discords_at_length(x, L, 0.5 * ref.distance, Execution::serial) == got);
      // r at the discord distance still finds it, r just above does not
      CHECK(discords_at_length(x, L, ref.distance * (1 - 1e-9)).has_value());
      CHECK_FALSE(discords_at_length(x, L, ref.distance * (1 + 1e-6)).has_value());
    }
  }
}

TEST_CASE("discords_at_length on random walks") {
  std::mt19937_64 eng(99);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x(300);
    double v = 0;
    for (auto& s : x) s = v += nd(eng);
    const std::size_t L = 10 + 5 * static_cast<std::size_t>(trial);
    const auto ref = oracle::brute_discord(x, L);
    const auto got = discords_at_length(x, L, 1e-3);
    REQUIRE(got.has_value());
    CHECK(got->start == ref.start);
    CHECK(got->distance == Approx(ref.distance).epsilon(1e-9));
  }
}

TEST_CASE("discords_at_length argument checks") {
  const std::vector<double> x(100, 1.0);
  CHECK_THROWS_AS(discords_at_length(x, 0, 1.0), InputError);
  CHECK_THROWS_AS(discords_at_length(x, 50, 1.0), InputError);
  CHECK_THROWS_AS(discords_at_length(x, 10, 0.0), InputError);
  // all windows flat: every distance is zero
  CHECK_FALSE(discords_at_length(x, 10, 1e-6).has_value());
}

TEST_CASE("merlin_scan reports one discord per length") {
  auto x = noisy_sine(1000, 50, 0.02, 5);
  for (std::size_t t = 600; t < 630; ++t) x[t] = 0.2;
  const auto ts = series_of(normalize(x));
  const auto r = merlin_scan(ts, 20, 40);
  CHECK(r.discords.size() + r.lengths_without_discord.size() == 21);
  CHECK(r.lengths_without_discord.empty());
  for (const auto& d : r.discords) {
    const auto ref = oracle::brute_discord(ts.values, d.length);
    CHECK(d.start == ref.start);
    CHECK(d.distance == Approx(ref.distance).epsilon(1e-9));
  }
  const auto top = r.top();
  REQUIRE(top.has_value());
  CHECK(top->midpoint() >= 580);
  CHECK(top->midpoint() <= 650);
  CHECK(r.scores.detector_id == "merlin");
  CHECK(r.scores.scores[top->start] == top->distance);

  const auto labels = r.labels(ts.size());
  for (std::size_t t = 0; t < ts.size(); ++t) {
    bool covered = false;
    for (const auto& d : r.discords) covered = covered || (t >= d.start && t < d.start + d.length);
    CHECK(labels[t] == covered);
  }
  const auto ser = merlin_scan(ts, 20, 40, Execution::serial);
  CHECK(ser.discords == r.discords);
  CHECK(ser.scores.scores == r.scores.scores);
}

TEST_CASE("merlin_scan on an injected outlier") {
  const auto base = generate_base(BaseKind::sine, 2000, 100, 0.01, 3);
  const auto ts = inject(base, {AnomalyType::outlier, 1234, 1, 1.0, 1});
  const auto r = merlin_scan(ts, 75, 80);
  REQUIRE(r.top().has_value());
  const auto d = *r.top();
  CHECK(d.start <= 1234);
  CHECK(d.start + d.length > 1234);
}

TEST_CASE("merlin_scan on a flat series") {
  const auto r = merlin_scan(series_of(std::vector<double>(200, 0.5)), 5, 8);
  CHECK(r.discords.empty());
  CHECK(r.lengths_without_discord.size() == 4);
  CHECK_FALSE(r.top().has_value());
  CHECK(r.scores.scores == std::vector<double>(200, 0.0));
}

TEST_CASE("merlin_scan range checks") {
  const auto ts = series_of(noisy_sine(100, 20, 0.1, 1));
  CHECK_THROWS_AS(merlin_scan(ts, 0, 10), InputError);
  CHECK_THROWS_AS(merlin_scan(ts, 20, 10), InputError);
  CHECK_THROWS_AS(merlin_scan(ts, 10, 50), InputError);
}
