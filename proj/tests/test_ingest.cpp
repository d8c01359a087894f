#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "tsad/ingest.hpp"

using namespace tsad;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("tsad_ingest_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("parse_ucr_filename") {
  const auto f = parse_ucr_filename("239_UCR_Anomaly_taichidbS0715Master_190037_593450_593514.txt");
  CHECK(f.index == 239);
  CHECK(f.name == "taichidbS0715Master");
  CHECK(f.train_end == 190037);
  CHECK(f.anomaly_start == 593450);
  CHECK(f.anomaly_end == 593514);

  const auto g = parse_ucr_filename("/some/dir/001_UCR_Anomaly_x_10_20_20.txt");
  CHECK(g.index == 1);
  CHECK(g.name == "x");
  CHECK(g.anomaly_start == 20);
  CHECK(g.anomaly_end == 20);

  CHECK(parse_ucr_filename("002_UCR_Anomaly_a_b_c_5_6_7.txt").name == "a_b_c");

  CHECK_THROWS_AS(parse_ucr_filename("abc.txt"), ParseError);
  CHECK_THROWS_WITH_AS(parse_ucr_filename("003_UCR_Anomaly_x_30_20_25.txt"),
                       doctest::Contains("train_end <= anomaly_start"), ParseError);
  CHECK_THROWS_AS(parse_ucr_filename("003_UCR_Anomaly_x_10_25_20.txt"), ParseError);
}

TEST_CASE("format_ucr_filename inverts the index convention") {
  const auto name = format_ucr_filename(7, "t", 1, Segment{1, 1});
  CHECK(name == "007_UCR_Anomaly_t_1_2_2.txt");
  const auto parsed = parse_ucr_filename(name);
  CHECK(parsed.anomaly_start - 1 == 1);
}

TEST_CASE("load_series") {
  const auto dir = scratch("load");
  SUBCASE("three-line file") {
    const auto p = dir / "007_UCR_Anomaly_t_1_2_2.txt";
    write_text(p, "1\n2\n3\n");
    const auto ts = load_series(p);
    CHECK(ts.values == std::vector<double>{0.0, 0.5, 1.0});
    REQUIRE(ts.anomaly);
    CHECK(*ts.anomaly == Segment{1, 1});
    CHECK(ts.name == "t");
  }
  SUBCASE("whitespace tolerant, single value") {
    const auto p = dir / "008_UCR_Anomaly_u_1_1_1.txt";
    write_text(p, "   4.5  \n\n");
    const auto ts = load_series(p);
    CHECK(ts.size() == 1);
    CHECK(ts.values[0] == 0.5);
  }
  SUBCASE("nan reports its line") {
    const auto p = dir / "009_UCR_Anomaly_v_1_2_2.txt";
    write_text(p, "1\n2\nnan\n4\n");
    CHECK_THROWS_WITH_AS(load_series(p), doctest::Contains("line 3"), ParseError);
  }
  SUBCASE("non-numeric token") {
    const auto p = dir / "010_UCR_Anomaly_v_1_2_2.txt";
    write_text(p, "1\nabc\n");
    CHECK_THROWS_WITH_AS(load_series(p), doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("empty file") {
    const auto p = dir / "011_UCR_Anomaly_v_1_2_2.txt";
    write_text(p, "");
    CHECK_THROWS_AS(load_series(p), ParseError);
  }
  SUBCASE("segment past the end") {
    const auto p = dir / "012_UCR_Anomaly_v_1_2_9.txt";
    write_text(p, "1\n2\n3\n");
    CHECK_THROWS_AS(load_series(p), InputError);
  }
}

TEST_CASE("write_values round-trips exactly") {
  const auto dir = scratch("roundtrip");
  const std::vector<double> x{0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567};
  write_values(dir / "v.txt", x);
  CHECK(read_values(dir / "v.txt") == x);
}

TEST_CASE("generate_base") {
  SUBCASE("sine has whole cycles and unit peak") {
    const auto s = generate_base(BaseKind::sine, 1000, 100, 0.0, 1);
    CHECK(*std::max_element(s.begin(), s.end()) == 1.0);
    for (std::size_t t = 0; t + 100 < s.size(); ++t) CHECK(s[t] == doctest::Approx(s[t + 100]).epsilon(1e-9));
  }
  SUBCASE("deterministic") {
    for (auto k : {BaseKind::sine, BaseKind::ecg_like, BaseKind::random_walk}) {
      CHECK(generate_base(k, 500, 50, 0.1, 9) == generate_base(k, 500, 50, 0.1, 9));
      CHECK(generate_base(k, 500, 50, 0.1, 9) != generate_base(k, 500, 50, 0.1, 10));
    }
  }
  SUBCASE("random walk increments follow the documented sampler") {
    const auto w = generate_base(BaseKind::random_walk, 400, 50, 1.0, 4242);
    oracle::BoxMuller ref(4242);
    double prev = 0.0;
    for (double v : w) {
      CHECK(v - prev == doctest::Approx(ref.next()).epsilon(1e-9));
      prev = v;
    }
  }
  SUBCASE("ecg has one dominant spike per cycle") {
    const auto e = generate_base(BaseKind::ecg_like, 1000, 100, 0.0, 1);
    int spikes = 0;
    for (std::size_t t = 1; t + 1 < e.size(); ++t) spikes += e[t] > 0.8 && e[t] >= e[t - 1] && e[t] > e[t + 1];
    CHECK(spikes == 10);
  }
  CHECK_THROWS_AS(generate_base(BaseKind::sine, 100, 0, 0.0, 1), InputError);
  CHECK_THROWS_AS(generate_base(BaseKind::sine, 150, 100, 0.0, 1), InputError);
  CHECK_THROWS_AS(parse_base_kind("square"), InputError);
}

TEST_CASE("every injector changes only its segment") {
  for (auto kind : {BaseKind::sine, BaseKind::ecg_like, BaseKind::random_walk}) {
    const auto base = generate_base(kind, 5000, 100, 0.05, 17);
    for (auto type : injectable_types()) {
      CAPTURE(to_string(type));
      CAPTURE(to_string(kind));
      const auto spec = plan_injection(base, type, 100, 5);
      const auto raw = inject_raw(base, spec);
      const auto [a, b] = raw.segment;
      REQUIRE(b < base.size());
      CHECK(raw.segment.points() <= static_cast<std::size_t>(0.049 * 5000));
      bool changed = false;
      for (std::size_t i = 0; i < base.size(); ++i) {
        if (i < a || i > b) {
          REQUIRE(raw.values[i] == base[i]);
        } else {
          changed = changed || raw.values[i] != base[i];
        }
      }
      CHECK(changed);
      // deterministic
      CHECK(inject_raw(base, spec).values == raw.values);
      const auto ts = inject(base, spec);
      CHECK(ts.anomaly_type == type);
      CHECK(*ts.anomaly == raw.segment);
      CHECK(ts.values == normalize(raw.values));
    }
  }
}

TEST_CASE("injector semantics") {
  const auto base = generate_base(BaseKind::sine, 2000, 100, 0.0, 3);
  const auto [lo, hi] = std::minmax_element(base.begin(), base.end());

  SUBCASE("outlier leaves the global range at exactly one index") {
    const auto raw = inject_raw(base, {AnomalyType::outlier, 1234, 1, 0.5, 1});
    int outside = 0;
    for (double v : raw.values) outside += v < *lo || v > *hi;
    CHECK(outside == 1);
    CHECK(raw.values[1234] > *hi);
    CHECK(raw.segment == Segment{1234, 1234});
  }
  SUBCASE("flat segment has zero variance") {
    const auto raw = inject_raw(base, {AnomalyType::flat, 700, 50, 0.0, 1});
    for (std::size_t i = 700; i < 750; ++i) CHECK(raw.values[i] == raw.values[700]);
  }
  SUBCASE("local peak stays below the global max") {
    const auto spec = plan_injection(base, AnomalyType::local_peak, 100, 2);
    const auto raw = inject_raw(base, spec);
    const double seg_max = *std::max_element(raw.values.begin() + static_cast<std::ptrdiff_t>(raw.segment.start),
                                             raw.values.begin() + static_cast<std::ptrdiff_t>(raw.segment.end) + 1);
    CHECK(seg_max < *hi);
    CHECK(seg_max > *std::max_element(base.begin() + static_cast<std::ptrdiff_t>(raw.segment.start),
                                      base.begin() + static_cast<std::ptrdiff_t>(raw.segment.end) + 1));
  }
  SUBCASE("local drop stays above the global min") {
    const auto raw = inject_raw(base, plan_injection(base, AnomalyType::local_drop, 100, 2));
    const double seg_min = *std::min_element(raw.values.begin() + static_cast<std::ptrdiff_t>(raw.segment.start),
                                             raw.values.begin() + static_cast<std::ptrdiff_t>(raw.segment.end) + 1);
    CHECK(seg_min > *lo);
  }
  SUBCASE("reversed segment") {
    const auto raw = inject_raw(base, {AnomalyType::reversed, 1030, 100, 0.0, 1});
    for (std::size_t i = 0; i < 100; ++i) CHECK(raw.values[1030 + i] == base[1129 - i]);
  }
  SUBCASE("signal shift adds a constant") {
    const auto raw = inject_raw(base, {AnomalyType::signal_shift, 400, 80, 0.3, 1});
    for (std::size_t i = 400; i < 480; ++i) CHECK(raw.values[i] - base[i] == doctest::Approx(0.3 * (*hi - *lo)));
  }
  SUBCASE("amplitude change scales about the segment mean") {
    const auto raw = inject_raw(base, {AnomalyType::amplitude_change, 400, 100, 2.0, 1});
    double mean = 0;
    for (std::size_t i = 400; i < 500; ++i) mean += base[i];
    mean /= 100;
    for (std::size_t i = 400; i < 500; ++i) CHECK(raw.values[i] == doctest::Approx(mean + 2.0 * (base[i] - mean)));
  }
  SUBCASE("steep increase quantizes to the requested levels") {
    const auto raw = inject_raw(base, {AnomalyType::steep_increase, 1075, 50, 3.0, 1});
    std::vector<double> levels(raw.values.begin() + 1075, raw.values.begin() + 1125);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    CHECK(levels.size() == 3);
  }
  SUBCASE("noise is drawn from the seeded sampler") {
    const auto raw = inject_raw(base, {AnomalyType::noise, 300, 60, 0.3, 77});
    oracle::BoxMuller ref(77);
    for (std::size_t i = 300; i < 360; ++i) {
      CHECK(raw.values[i] - base[i] == doctest::Approx(0.3 * (*hi - *lo) * ref.next()).epsilon(1e-9));
    }
  }
  SUBCASE("time warping keeps the segment endpoints") {
    const auto spec = plan_injection(base, AnomalyType::time_warping, 100, 2);
    const auto raw = inject_raw(base, spec);
    CHECK(raw.values[raw.segment.start] == base[raw.segment.start]);
    CHECK(raw.values[raw.segment.end] == base[raw.segment.end]);
  }
}

TEST_CASE("injection constraints are named") {
  const std::vector<double> flat(1000, 1.0);
  CHECK_THROWS_WITH_AS(inject_raw(flat, {AnomalyType::missing_peak, 100, 50, 0.0, 1}),
                       doctest::Contains("no interior peak"), InputError);
  CHECK_THROWS_WITH_AS(inject_raw(flat, {AnomalyType::flat, 100, 50, 0.0, 1}), doctest::Contains("unchanged"),
                       InputError);
  CHECK_THROWS_WITH_AS(inject_raw(flat, {AnomalyType::noise, 990, 50, 0.1, 1}), doctest::Contains("does not fit"),
                       InputError);
  CHECK_THROWS_AS(inject_raw(flat, {AnomalyType::noise, 0, 1702, 0.1, 1}), InputError);
  CHECK_THROWS_AS(inject_raw(flat, {AnomalyType::unknown, 0, 10, 0.1, 1}), InputError);
}

TEST_CASE("synthetic corpus") {
  SyntheticCorpusConfig cfg;
  cfg.length = 2000;
  const auto corpus = generate_corpus(cfg);
  CHECK(corpus.size() == 17 * 3);
  for (const auto& ts : corpus) {
    CHECK_NOTHROW(ts.validate());
    CHECK(ts.anomaly->points() <= static_cast<std::size_t>(0.049 * 2000));
    CHECK(*std::min_element(ts.values.begin(), ts.values.end()) == 0.0);
    CHECK(*std::max_element(ts.values.begin(), ts.values.end()) == 1.0);
  }
  CHECK(corpus.front().name == "amplitude_change-sine");

  SUBCASE("write and reload") {
    const auto dir = scratch("corpus");
    write_corpus(dir, corpus);
    const auto back = load_corpus(dir);
    REQUIRE(back.size() == corpus.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      const auto& orig = *std::find_if(corpus.begin(), corpus.end(),
                                       [&](const TimeSeries& t) { return t.name == back[i].name; });
      CHECK(back[i].anomaly == orig.anomaly);
      CHECK(back[i].anomaly_type == orig.anomaly_type);
      REQUIRE(back[i].size() == orig.size());
      for (std::size_t k = 0; k < orig.size(); ++k) CHECK(back[i].values[k] == doctest::Approx(orig.values[k]).epsilon(1e-15));
    }
  }
}
