#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsad/autoencoder.hpp"
#include "tsad/core.hpp"
#include "tsad/ingest.hpp"
#include "tsad/mdi.hpp"
#include "tsad/metrics.hpp"
#include "tsad/rrcf.hpp"
#include "tsad/threshold.hpp"

namespace tsad::harness {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::uint64_t kSeedStride = 1'000'003;

struct LengthStrategy {
  enum class Kind { range, fixed, dynamic };
  Kind kind = Kind::range;
  std::size_t min_length = 75;
  std::size_t max_length = 125;
  std::size_t fixed_length = 100;
  double dynamic_low = 0.75;
  double dynamic_high = 1.25;
};

struct LengthRange {
  std::size_t min_length = 0;
  std::size_t max_length = 0;
  bool label_informed = false;

  bool operator==(const LengthRange&) const = default;
};

/// range -> (L_min, L_max); fixed -> (L, L); dynamic -> (ceil(lo * (b - a)) at
/// least 1, ceil(hi * (b - a)) at least L_min), which reads the ground truth and
/// is flagged label-informed.
LengthRange length_strategy(const TimeSeries& series, const LengthStrategy& strategy);

enum class DetectorKind { rrcf, merlin, mdi, ae };

struct DetectorSpec {
  DetectorKind kind = DetectorKind::merlin;
  std::string id;
  LengthStrategy lengths;         // merlin, mdi
  rrcf::ForestConfig forest;      // rrcf
  bool use_proposals = false;     // mdi
  double proposal_quantile = 0.99;
  ae::AeConfig ae;                // ae
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::optional<std::filesystem::path> corpus_directory;
  SyntheticCorpusConfig synthetic;
  std::vector<DetectorSpec> detectors;
  evt::PotConfig pot;
  std::size_t repetitions = 6;
  std::uint64_t base_seed = 42;
  std::filesystem::path output_dir = "results";
  int threads = 0;  // 0 = OpenMP default
  nlohmann::json source;
};

/// Validates and converts a parsed config document; errors name the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Seed of repetition k: base_seed + k * 1'000'003.
std::uint64_t repetition_seed(std::uint64_t base_seed, std::size_t repetition);

/// What a detector hands to the evaluation stage.
struct DetectorOutput {
  ScoreSeries scores;
  std::optional<std::vector<bool>> labels;  // set by detectors that label directly (MERLIN)
  std::size_t peak = 0;                     // timestamp used for the UCR score
};

/// Runs one detector. `series` must not carry labels; `lengths` comes from
/// length_strategy for merlin/mdi.
DetectorOutput run_detector(const DetectorSpec& spec, const TimeSeries& series, std::uint64_t seed,
                            const LengthRange& lengths);

struct CellTrace {
  bool thresholded = false;  // scores went through streaming POT
  std::vector<bool> labels;  // after point-adjust
};

metrics::EvalRecord evaluate(const TimeSeries& series, const DetectorSpec& spec, const evt::PotConfig& pot,
                             std::size_t repetition, std::uint64_t seed, CellTrace* trace = nullptr);

/// Evaluates every (series, detector, repetition) cell. Cells run on an
/// OpenMP pool; records come back ordered series-major, then detector, then
/// repetition.
std::vector<metrics::EvalRecord> run_cells(std::span<const TimeSeries> corpus, const RunConfig& config);

std::vector<TimeSeries> load_corpus(const RunConfig& config);

/// Full run: corpus, cells, and the result files in config.output_dir
/// (records.tsv, aggregate_<grouping>.tsv, manifest.json).
std::vector<metrics::EvalRecord> run(const RunConfig& config);

std::string_view to_string(DetectorKind kind);
std::string_view code_version();

}  // namespace tsad::harness
