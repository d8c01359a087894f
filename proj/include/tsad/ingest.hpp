#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsad/core.hpp"

namespace tsad {

/// Fields of `<index>_UCR_Anomaly_<name>_<train_end>_<start>_<end>.txt`, as written
/// (1-based positions).
struct UcrFileName {
  int index = 0;
  std::string name;
  std::size_t train_end = 0;
  std::size_t anomaly_start = 0;
  std::size_t anomaly_end = 0;

  bool operator==(const UcrFileName&) const = default;
};

UcrFileName parse_ucr_filename(std::string_view path);
std::string format_ucr_filename(int index, std::string_view name, std::size_t train_end,
                                const Segment& zero_based_segment);

/// Reads whitespace-separated reals; non-numeric tokens raise ParseError with the line number.
std::vector<double> read_values(const std::filesystem::path& path);
void write_values(const std::filesystem::path& path, std::span<const double> values);

/// Loads a UCR-named file, normalizes it and converts the 1-based inclusive
/// anomaly positions of the file name to a 0-based inclusive Segment.
TimeSeries load_series(const std::filesystem::path& path);
/// Loads any value file without label metadata.
TimeSeries load_unlabeled(const std::filesystem::path& path);

enum class BaseKind { sine, ecg_like, random_walk };
std::string_view to_string(BaseKind kind);
BaseKind parse_base_kind(std::string_view text);

std::vector<double> generate_base(BaseKind kind, std::size_t length, std::size_t period,
                                  double noise_std, std::uint64_t seed);

struct InjectionSpec {
  AnomalyType type = AnomalyType::outlier;
  std::size_t location = 0;  // first modified index
  std::size_t length = 1;
  double magnitude = 0.0;    // type-specific; see default_magnitude
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMaxInjectedLength = 1701;

double default_magnitude(AnomalyType type);

struct RawInjection {
  std::vector<double> values;
  Segment segment;
};

/// Applies one injector to an un-normalized base. Values outside the returned
/// segment are copied bit for bit.
RawInjection inject_raw(std::span<const double> base, const InjectionSpec& spec);

/// inject_raw followed by normalization; the result carries segment and type.
TimeSeries inject(std::span<const double> base, const InjectionSpec& spec);

/// Picks a location/length/magnitude suited to the base's shape (troughs for
/// local peaks, crests for missing peaks, rising edges for increases, ...).
/// The anomaly lands in the latter part of the series so it falls outside the
/// thresholding warm-up window, and never exceeds 4.9% of the length.
InjectionSpec plan_injection(std::span<const double> base, AnomalyType type, std::size_t period,
                             std::uint64_t seed);

struct SyntheticCorpusConfig {
  std::vector<AnomalyType> types;  // empty = all injectable types
  std::vector<BaseKind> bases{BaseKind::sine, BaseKind::ecg_like, BaseKind::random_walk};
  std::size_t length = 5000;
  std::size_t period = 100;
  double noise_std = 0.05;
  std::uint64_t seed = 7;
};

/// One series per (base, type), ordered base-major.
std::vector<TimeSeries> generate_corpus(const SyntheticCorpusConfig& config);

/// Reads every UCR-named *.txt file under dir (sorted by file name). A
/// manifest.tsv next to them, when present, supplies anomaly types.
std::vector<TimeSeries> load_corpus(const std::filesystem::path& dir);

/// Writes the series as UCR-named files plus manifest.tsv (name, start, end, type;
/// start/end 0-based inclusive).
void write_corpus(const std::filesystem::path& dir, std::span<const TimeSeries> corpus);

}  // namespace tsad
