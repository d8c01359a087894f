#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsad/core.hpp"

namespace tsad::metrics {

/// Probability that a random positive outranks a random negative (ties count
/// one half). nullopt when truth holds a single class.
std::optional<double> auc_roc(std::span<const double> scores, const std::vector<bool>& truth);

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

/// Point-wise precision, recall and F1 = TP / (TP + (FP + FN) / 2); all zero when TP = 0.
F1Score f1_score(const std::vector<bool>& labels, const std::vector<bool>& truth);

inline constexpr long long kUcrTolerance = 100;

/// 1 iff min(a - L, a - 100) < t < max(b + L, b + 100) with L = b - a.
int ucr_hit(std::size_t t_star, const Segment& truth);
/// ucr_hit at the score argmax (smallest index on ties).
int ucr_score(std::span<const double> scores, const Segment& truth);
/// Midpoint of the run of maximal scores that starts at the argmax. For
/// window-level detectors this is the centre of the best window.
std::size_t plateau_midpoint(std::span<const double> scores);

enum class MethodClass { classical, deep_learning };
MethodClass method_class(std::string_view detector_id);
std::string_view to_string(MethodClass c);

struct EvalRecord {
  std::string series;
  AnomalyType anomaly_type = AnomalyType::unknown;
  std::string detector;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  std::optional<double> auc_roc;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int ucr = 0;
  double runtime_seconds = 0.0;
  bool failed = false;
  std::string failure_reason;
  bool label_informed = false;
};

enum class GroupBy { detector, anomaly_type, method_class };
GroupBy parse_group_by(std::string_view text);

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
};

struct AggregateRow {
  std::string detector;  // "*" when grouping by method class
  std::string group;
  std::size_t records = 0;
  std::size_t failed = 0;
  std::size_t auc_missing = 0;
  MetricSummary auc_roc;
  MetricSummary f1;
  MetricSummary ucr;
};

/// Macro mean and population std per group. Failed records count as zero;
/// missing AUC values are excluded and counted.
std::vector<AggregateRow> aggregate(std::span<const EvalRecord> records, GroupBy group_by);

/// Tab-separated tables with a header row; column order is fixed.
void write_records(std::ostream& out, std::span<const EvalRecord> records);
std::vector<EvalRecord> read_records(std::istream& in);
void write_aggregate(std::ostream& out, std::span<const AggregateRow> rows);

}  // namespace tsad::metrics
