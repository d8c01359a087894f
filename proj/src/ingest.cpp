#include "tsad/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>

#include "tsad/rng.hpp"

namespace tsad {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// UCR files

UcrFileName parse_ucr_filename(std::string_view path) {
  const std::string base = fs::path(std::string(path)).filename().string();
  static const std::regex pattern(R"(^(\d+)_UCR_Anomaly_(.+)_(\d+)_(\d+)_(\d+)\.txt$)");
  std::smatch m;
  if (!std::regex_match(base, m, pattern)) {
    throw ParseError("'" + base +
                     "' does not match <index>_UCR_Anomaly_<name>_<train_end>_<start>_<end>.txt");
  }
  UcrFileName out;
  out.index = std::stoi(m[1].str());
  out.name = m[2].str();
  out.train_end = std::stoull(m[3].str());
  out.anomaly_start = std::stoull(m[4].str());
  out.anomaly_end = std::stoull(m[5].str());
  if (!(out.train_end <= out.anomaly_start && out.anomaly_start <= out.anomaly_end)) {
    throw ParseError("'" + base + "': expected train_end <= anomaly_start <= anomaly_end, got " +
                     std::to_string(out.train_end) + ", " + std::to_string(out.anomaly_start) +
                     ", " + std::to_string(out.anomaly_end));
  }
  if (out.anomaly_start == 0) {
    throw ParseError("'" + base + "': anomaly positions are 1-based, got 0");
  }
  return out;
}

std::string format_ucr_filename(int index, std::string_view name, std::size_t train_end,
                                const Segment& seg) {
  std::ostringstream os;
  os << std::setw(3) << std::setfill('0') << index << "_UCR_Anomaly_" << name << '_' << train_end
     << '_' << seg.start + 1 << '_' << seg.end + 1 << ".txt";
  return os.str();
}

std::vector<double> read_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      double v = 0.0;
      const char* first = token.data();
      const char* last = token.data() + token.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ParseError("'" + path.filename().string() + "' line " + std::to_string(line_no) +
                         ": '" + token + "' is not a finite number");
      }
      values.push_back(v);
    }
  }
  if (values.empty()) throw ParseError("'" + path.string() + "' contains no values");
  return values;
}

void write_values(const fs::path& path, std::span<const double> values) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  for (double v : values) out << v << '\n';
}

TimeSeries load_series(const fs::path& path) {
  const auto meta = parse_ucr_filename(path.string());
  TimeSeries ts;
  ts.values = normalize(read_values(path));
  ts.name = meta.name;
  ts.train_end = meta.train_end;
  ts.anomaly = Segment{meta.anomaly_start - 1, meta.anomaly_end - 1};
  ts.validate();
  return ts;
}

TimeSeries load_unlabeled(const fs::path& path) {
  TimeSeries ts;
  ts.values = normalize(read_values(path));
  ts.name = path.stem().string();
  return ts;
}

// ---------------------------------------------------------------------------
// Base signals

std::string_view to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::sine: return "sine";
    case BaseKind::ecg_like: return "ecg_like";
    case BaseKind::random_walk: return "random_walk";
  }
  return "sine";
}

BaseKind parse_base_kind(std::string_view text) {
  if (text == "sine") return BaseKind::sine;
  if (text == "ecg_like") return BaseKind::ecg_like;
  if (text == "random_walk") return BaseKind::random_walk;
  throw InputError("unknown base kind '" + std::string(text) +
                   "' (expected sine, ecg_like or random_walk)");
}

namespace {

double bump(double x, double center, double width) {
  const double z = (x - center) / width;
  return std::exp(-0.5 * z * z);
}

// One heartbeat-like cycle: small P wave, Q dip, tall narrow R spike, S dip, T wave.
double ecg_cycle(double phase, double period) {
  const double p = period;
  return 0.10 * bump(phase, 0.12 * p, p / 25.0) - 0.15 * bump(phase, 0.30 * p - p / 30.0, p / 80.0) +
         1.00 * bump(phase, 0.30 * p, p / 60.0) - 0.35 * bump(phase, 0.30 * p + p / 30.0, p / 80.0) +
         0.25 * bump(phase, 0.60 * p, p / 16.0);
}

}  // namespace

std::vector<double> generate_base(BaseKind kind, std::size_t length, std::size_t period,
                                  double noise_std, std::uint64_t seed) {
  if (period == 0) throw InputError("generate_base: period must be > 0");
  if (length < 2 * period) {
    throw InputError("generate_base: length " + std::to_string(length) +
                     " is shorter than two periods (" + std::to_string(2 * period) + ")");
  }
  if (noise_std < 0.0) throw InputError("generate_base: noise_std must be >= 0");

  Rng rng(seed);
  std::vector<double> out(length);
  const double p = static_cast<double>(period);
  switch (kind) {
    case BaseKind::sine:
      for (std::size_t t = 0; t < length; ++t) {
        out[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / p);
        if (noise_std > 0.0) out[t] += noise_std * rng.normal();
      }
      break;
    case BaseKind::ecg_like:
      for (std::size_t t = 0; t < length; ++t) {
        out[t] = ecg_cycle(static_cast<double>(t % period), p);
        if (noise_std > 0.0) out[t] += noise_std * rng.normal();
      }
      break;
    case BaseKind::random_walk: {
      double level = 0.0;
      for (std::size_t t = 0; t < length; ++t) {
        level += noise_std * rng.normal();
        out[t] = level;
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Injection

double default_magnitude(AnomalyType type) {
  switch (type) {
    case AnomalyType::amplitude_change: return 2.0;    // scale factor about the segment mean
    case AnomalyType::flat: return 0.0;
    case AnomalyType::frequency_change: return 2.0;    // playback speed
    case AnomalyType::local_drop: return 0.8;          // depth as a fraction of the range
    case AnomalyType::local_peak: return 0.8;          // height as a fraction of the range
    case AnomalyType::missing_drop: return 0.0;
    case AnomalyType::missing_peak: return 0.0;
    case AnomalyType::noise: return 0.3;              // noise std as a fraction of the range
    case AnomalyType::outlier: return 1.0;             // excess beyond the max, fraction of range
    case AnomalyType::reversed: return 0.0;
    case AnomalyType::sampling_rate: return 4.0;       // decimation factor
    case AnomalyType::signal_shift: return 0.3;        // offset as a fraction of the range
    case AnomalyType::smoothed_increase: return 0.5;   // kernel width as a fraction of the segment
    case AnomalyType::steep_increase: return 2.0;      // quantization levels
    case AnomalyType::time_shift: return 0.3;          // pause as a fraction of the segment
    case AnomalyType::time_warping: return 0.25;       // peak displacement, fraction of the segment
    case AnomalyType::unusual_pattern: return 1.0;     // sawtooth teeth per half segment
    case AnomalyType::unknown: break;
  }
  return 0.0;
}

namespace {

// Linear interpolation of x at fractional position pos, clamped to the series.
double sample_at(std::span<const double> x, double pos) {
  if (pos <= 0.0) return x.front();
  const double last = static_cast<double>(x.size() - 1);
  if (pos >= last) return x.back();
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return x[i] * (1.0 - frac) + x[i + 1] * frac;
}

// Raised-cosine weight in (0, 1] over len points.
double hann(std::size_t i, std::size_t len) {
  const double t = static_cast<double>(i + 1) / static_cast<double>(len + 1);
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * t));
}

[[noreturn]] void reject(AnomalyType type, const std::string& constraint) {
  throw InputError("inject " + std::string(to_string(type)) + ": " + constraint);
}

struct Range {
  double lo;
  double hi;
};

Range min_max(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return {*lo, *hi};
}

}  // namespace

RawInjection inject_raw(std::span<const double> base, const InjectionSpec& spec) {
  const AnomalyType type = spec.type;
  if (type == AnomalyType::unknown) throw InputError("inject: anomaly type 'unknown' is not injectable");
  if (base.size() < 2) throw InputError("inject: base needs at least 2 points");
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (!std::isfinite(base[i])) throw InputError("inject: non-finite base value at " + std::to_string(i));
  }
  const std::size_t len = type == AnomalyType::outlier ? 1 : spec.length;
  if (len == 0 || len > kMaxInjectedLength) {
    reject(type, "length must lie in [1, " + std::to_string(kMaxInjectedLength) + "], got " +
                     std::to_string(len));
  }
  if (spec.location + len > base.size()) {
    reject(type, "segment [" + std::to_string(spec.location) + ", " +
                     std::to_string(spec.location + len - 1) + "] does not fit a base of length " +
                     std::to_string(base.size()));
  }

  const std::size_t a = spec.location;
  const std::size_t b = a + len - 1;
  const auto global = min_max(base);
  const double range = global.hi - global.lo;
  const double mag = spec.magnitude;
  RawInjection out{std::vector<double>(base.begin(), base.end()), Segment{a, b}};
  auto& y = out.values;
  const auto seg = base.subspan(a, len);
  const auto local = min_max(seg);

  switch (type) {
    case AnomalyType::amplitude_change: {
      if (!(mag > 0.0) || mag == 1.0) reject(type, "magnitude must be positive and != 1");
      double mean = 0.0;
      for (double v : seg) mean += v;
      mean /= static_cast<double>(len);
      for (std::size_t i = a; i <= b; ++i) y[i] = mean + (base[i] - mean) * mag;
      break;
    }
    case AnomalyType::flat:
      for (std::size_t i = a; i <= b; ++i) y[i] = base[a];
      break;
    case AnomalyType::frequency_change: {
      if (!(mag > 0.0) || mag == 1.0) reject(type, "magnitude (speed factor) must be positive and != 1");
      for (std::size_t i = 0; i < len; ++i) {
        y[a + i] = sample_at(base, static_cast<double>(a) + static_cast<double>(i) * mag);
      }
      break;
    }
    case AnomalyType::local_peak: {
      if (!(mag > 0.0 && mag < 1.0)) reject(type, "magnitude must lie in (0, 1)");
      const double target = global.lo + mag * range;
      double amp = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < len; ++i) amp = std::min(amp, (target - seg[i]) / hann(i, len));
      if (!(amp > 0.0)) reject(type, "segment already reaches the peak level; place it in a trough");
      for (std::size_t i = 0; i < len; ++i) y[a + i] = seg[i] + amp * hann(i, len);
      break;
    }
    case AnomalyType::local_drop: {
      if (!(mag > 0.0 && mag < 1.0)) reject(type, "magnitude must lie in (0, 1)");
      const double target = global.hi - mag * range;
      double amp = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < len; ++i) amp = std::min(amp, (seg[i] - target) / hann(i, len));
      if (!(amp > 0.0)) reject(type, "segment already reaches the drop level; place it on a crest");
      for (std::size_t i = 0; i < len; ++i) y[a + i] = seg[i] - amp * hann(i, len);
      break;
    }
    case AnomalyType::missing_peak:
    case AnomalyType::missing_drop: {
      const bool peak = type == AnomalyType::missing_peak;
      if (len < 3) reject(type, "segment needs at least 3 points");
      const auto extreme = peak ? std::max_element(seg.begin(), seg.end())
                                : std::min_element(seg.begin(), seg.end());
      const auto pos = static_cast<std::size_t>(extreme - seg.begin());
      const double rim = peak ? std::max(seg.front(), seg.back()) : std::min(seg.front(), seg.back());
      const double prominence = peak ? *extreme - rim : rim - *extreme;
      if (pos == 0 || pos == len - 1 || prominence <= 0.25 * (local.hi - local.lo)) {
        reject(type, peak ? "segment holds no interior peak to remove"
                          : "segment holds no interior drop to remove");
      }
      for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(len - 1);
        y[a + i] = seg.front() * (1.0 - t) + seg.back() * t;
      }
      break;
    }
    case AnomalyType::noise: {
      if (!(mag > 0.0)) reject(type, "magnitude must be positive");
      Rng rng(spec.seed);
      const double sd = mag * (range > 0.0 ? range : 1.0);
      for (std::size_t i = a; i <= b; ++i) y[i] = base[i] + sd * rng.normal();
      break;
    }
    case AnomalyType::outlier: {
      if (!(mag > 0.0)) reject(type, "magnitude must be positive");
      y[a] = global.hi + mag * (range > 0.0 ? range : 1.0);
      break;
    }
    case AnomalyType::reversed:
      for (std::size_t i = 0; i < len; ++i) y[a + i] = seg[len - 1 - i];
      break;
    case AnomalyType::sampling_rate: {
      const auto factor = static_cast<std::size_t>(std::max(2.0, std::round(mag)));
      for (std::size_t i = 0; i < len; ++i) y[a + i] = seg[(i / factor) * factor];
      break;
    }
    case AnomalyType::signal_shift: {
      if (mag == 0.0) reject(type, "magnitude must be non-zero");
      const double offset = mag * (range > 0.0 ? range : 1.0);
      for (std::size_t i = a; i <= b; ++i) y[i] = base[i] + offset;
      break;
    }
    case AnomalyType::smoothed_increase: {
      const auto width = static_cast<std::size_t>(
          std::max(3.0, std::round(mag * static_cast<double>(len))));
      const std::size_t half = width / 2;
      for (std::size_t i = 0; i < len; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(len - 1, i + half);
        double sum = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) sum += seg[k];
        y[a + i] = sum / static_cast<double>(hi - lo + 1);
      }
      break;
    }
    case AnomalyType::steep_increase: {
      const auto levels = static_cast<std::size_t>(std::max(2.0, std::round(mag)));
      const double span = local.hi - local.lo;
      if (span <= 0.0) reject(type, "segment is constant; nothing to quantize");
      const double steps = static_cast<double>(levels - 1);
      for (std::size_t i = 0; i < len; ++i) {
        y[a + i] = local.lo + std::round((seg[i] - local.lo) / span * steps) / steps * span;
      }
      break;
    }
    case AnomalyType::time_shift: {
      if (len < 4) reject(type, "segment needs at least 4 points");
      auto pause = static_cast<std::size_t>(std::round(mag * static_cast<double>(len)));
      pause = std::clamp<std::size_t>(pause, 1, len - 2);
      const std::size_t rest = len - pause;
      for (std::size_t i = 0; i < pause; ++i) y[a + i] = seg.front();
      for (std::size_t j = 0; j < rest; ++j) {
        const double src = static_cast<double>(j) * static_cast<double>(len - 1) /
                           static_cast<double>(rest - 1);
        y[a + pause + j] = sample_at(seg, src);
      }
      break;
    }
    case AnomalyType::time_warping: {
      if (len < 5) reject(type, "segment needs at least 5 points");
      const auto peak = static_cast<std::size_t>(std::max_element(seg.begin(), seg.end()) - seg.begin());
      if (peak == 0 || peak == len - 1) reject(type, "segment holds no interior cycle peak");
      const double last = static_cast<double>(len - 1);
      const double old_pos = static_cast<double>(peak);
      double new_pos = old_pos + mag * last;
      if (new_pos >= last - 1.0 || new_pos <= 1.0) new_pos = old_pos - mag * last;
      new_pos = std::clamp(new_pos, 1.0, last - 1.0);
      if (std::abs(new_pos - old_pos) < 1.0) reject(type, "peak displacement rounds to zero");
      for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i);
        const double src = t <= new_pos ? t * old_pos / new_pos
                                        : old_pos + (t - new_pos) * (last - old_pos) / (last - new_pos);
        y[a + i] = sample_at(seg, src);
      }
      break;
    }
    case AnomalyType::unusual_pattern: {
      double lo = local.lo, hi = local.hi;
      if (hi - lo <= 0.0) {
        lo = global.lo;
        hi = global.hi > global.lo ? global.hi : global.lo + 1.0;
      }
      const double teeth = std::max(1.0, std::round(2.0 * (mag > 0.0 ? mag : 1.0)));
      for (std::size_t i = 0; i < len; ++i) {
        const double u = teeth * static_cast<double>(i) / static_cast<double>(len);
        y[a + i] = lo + (hi - lo) * (u - std::floor(u));
      }
      break;
    }
    case AnomalyType::unknown:
      break;
  }

  bool changed = false;
  for (std::size_t i = a; i <= b; ++i) changed = changed || y[i] != base[i];
  if (!changed) reject(type, "the segment is unchanged by this injector on this base");
  return out;
}

TimeSeries inject(std::span<const double> base, const InjectionSpec& spec) {
  auto raw = inject_raw(base, spec);
  TimeSeries ts;
  ts.values = normalize(raw.values);
  ts.anomaly = raw.segment;
  ts.anomaly_type = spec.type;
  ts.name = std::string(to_string(spec.type));
  return ts;
}

namespace {

std::size_t planned_length(AnomalyType type, std::size_t period) {
  const auto p = period;
  switch (type) {
    case AnomalyType::outlier: return 1.0;
    case AnomalyType::flat: return std::max<std::size_t>(4, (2 * p) / 5);
    case AnomalyType::noise: return std::max<std::size_t>(4, (3 * p) / 5);
    case AnomalyType::local_peak:
    case AnomalyType::local_drop: return std::max<std::size_t>(5, p / 4);
    case AnomalyType::missing_peak:
    case AnomalyType::missing_drop: return std::max<std::size_t>(5, p / 2);
    case AnomalyType::smoothed_increase:
    case AnomalyType::steep_increase: return std::max<std::size_t>(5, p / 2);
    case AnomalyType::signal_shift: return std::max<std::size_t>(4, (4 * p) / 5);
    default: return std::max<std::size_t>(5, p);
  }
}

// Search window [lo, hi] of candidate start positions and a scoring rule; the
// best-scoring start wins (first on ties).
template <typename Score>
std::size_t best_start(std::size_t lo, std::size_t hi, Score score) {
  std::size_t best = lo;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t s = lo; s <= hi; ++s) {
    const double v = score(s);
    if (v > best_score) {
      best_score = v;
      best = s;
    }
  }
  return best;
}

}  // namespace

InjectionSpec plan_injection(std::span<const double> base, AnomalyType type, std::size_t period,
                             std::uint64_t seed) {
  const std::size_t n = base.size();
  if (period == 0) throw InputError("plan_injection: period must be > 0");
  if (n < 10 * period) throw InputError("plan_injection: base must span at least 10 periods");

  InjectionSpec spec;
  spec.type = type;
  spec.seed = seed;
  spec.magnitude = default_magnitude(type);
  const auto max_len = static_cast<std::size_t>(std::floor(0.049 * static_cast<double>(n)));
  spec.length = std::min(planned_length(type, period), max_len);
  const std::size_t len = spec.length;

  // Region start drawn in [0.55 n, 0.75 n]; the search covers one period from there.
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto region_lo = static_cast<std::size_t>(0.55 * static_cast<double>(n)) +
                         static_cast<std::size_t>(rng.index(static_cast<std::uint64_t>(0.2 * static_cast<double>(n))));
  const std::size_t region_hi = std::min(region_lo + period, n - len - period);

  auto window = [&](std::size_t s) { return base.subspan(s, len); };
  switch (type) {
    case AnomalyType::local_peak: {
      // Lowest window in the region, falling back to the whole admissible span.
      auto lowest = [&](std::size_t lo, std::size_t hi) {
        return best_start(lo, hi, [&](std::size_t s) {
          const auto w = window(s);
          return -*std::max_element(w.begin(), w.end());
        });
      };
      spec.location = lowest(region_lo, region_hi);
      const auto g = min_max(base);
      const auto w = window(spec.location);
      if (*std::max_element(w.begin(), w.end()) >= g.lo + 0.6 * (g.hi - g.lo)) {
        spec.location = lowest(n / 2, n - len - period);
      }
      break;
    }
    case AnomalyType::local_drop: {
      auto highest = [&](std::size_t lo, std::size_t hi) {
        return best_start(lo, hi, [&](std::size_t s) {
          const auto w = window(s);
          return *std::min_element(w.begin(), w.end());
        });
      };
      spec.location = highest(region_lo, region_hi);
      const auto g = min_max(base);
      const auto w = window(spec.location);
      if (*std::min_element(w.begin(), w.end()) <= g.hi - 0.6 * (g.hi - g.lo)) {
        spec.location = highest(n / 2, n - len - period);
      }
      break;
    }
    case AnomalyType::missing_peak:
    case AnomalyType::missing_drop:
    case AnomalyType::time_warping: {
      // Centre the segment on the most prominent extreme.
      const bool peak = type != AnomalyType::missing_drop;
      const double sign = peak ? 1.0 : -1.0;
      const std::size_t centre_off = type == AnomalyType::time_warping ? len / 3 : len / 2;
      spec.location = best_start(region_lo, region_hi, [&](std::size_t s) {
        const auto w = window(s);
        const double mid = sign * w[centre_off];
        const double rim = std::max(sign * w.front(), sign * w.back());
        return mid - rim;
      });
      break;
    }
    case AnomalyType::smoothed_increase:
    case AnomalyType::steep_increase:
      spec.location = best_start(region_lo, region_hi,
                                 [&](std::size_t s) { return base[s + len - 1] - base[s]; });
      break;
    default:
      spec.location = region_lo;
      break;
  }
  return spec;
}

std::vector<TimeSeries> generate_corpus(const SyntheticCorpusConfig& config) {
  std::vector<AnomalyType> types = config.types;
  if (types.empty()) types.assign(injectable_types().begin(), injectable_types().end());
  std::vector<TimeSeries> corpus;
  std::uint64_t k = 0;
  for (BaseKind kind : config.bases) {
    for (AnomalyType type : types) {
      const std::uint64_t seed = config.seed + 7919 * (++k);
      const auto base = generate_base(kind, config.length, config.period, config.noise_std, seed);
      const auto spec = plan_injection(base, type, config.period, seed + 1);
      auto ts = inject(base, spec);
      ts.name = std::string(to_string(type)) + "-" + std::string(to_string(kind));
      ts.train_end = std::min(ts.anomaly->start, config.length / 10);
      corpus.push_back(std::move(ts));
    }
  }
  return corpus;
}

std::vector<TimeSeries> load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ParseError("corpus directory '" + dir.string() + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.find("_UCR_Anomaly_") != std::string::npos && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, AnomalyType> types;
  const auto manifest = dir / "manifest.tsv";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string name, start, end, type;
      if (std::getline(row, name, '\t') && std::getline(row, start, '\t') &&
          std::getline(row, end, '\t') && std::getline(row, type, '\t')) {
        types[name] = parse_anomaly_type(type).value_or(AnomalyType::unknown);
      }
    }
  }

  std::vector<TimeSeries> corpus;
  for (const auto& f : files) {
    auto ts = load_series(f);
    if (auto it = types.find(ts.name); it != types.end()) ts.anomaly_type = it->second;
    corpus.push_back(std::move(ts));
  }
  if (corpus.empty()) throw ParseError("no UCR-named series found in '" + dir.string() + "'");
  return corpus;
}

void write_corpus(const fs::path& dir, std::span<const TimeSeries> corpus) {
  fs::create_directories(dir);
  std::ofstream manifest(dir / "manifest.tsv");
  manifest << "name\tstart\tend\ttype\n";
  int index = 0;
  for (const auto& ts : corpus) {
    if (!ts.anomaly) throw InputError("write_corpus: series '" + ts.name + "' is unlabeled");
    ++index;
    const std::size_t train_end = std::min(ts.train_end.value_or(0), ts.anomaly->start + 1);
    write_values(dir / format_ucr_filename(index, ts.name, train_end, *ts.anomaly), ts.values);
    manifest << ts.name << '\t' << ts.anomaly->start << '\t' << ts.anomaly->end << '\t'
             << to_string(ts.anomaly_type) << '\n';
  }
}

}  // namespace tsad
