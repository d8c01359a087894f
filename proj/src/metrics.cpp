#include "tsad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace tsad::metrics {

std::optional<double> auc_roc(std::span<const double> scores, const std::vector<bool>& truth) {
  if (scores.size() != truth.size()) throw InputError("auc_roc: scores and truth differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of mid-ranks (1-based) of the positives.
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (truth[order[k]]) {
        rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const double p = static_cast<double>(positives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

F1Score f1_score(const std::vector<bool>& labels, const std::vector<bool>& truth) {
  if (labels.size() != truth.size()) throw InputError("f1_score: labels and truth differ in length");
  F1Score s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] && truth[i]) ++s.tp;
    else if (labels[i]) ++s.fp;
    else if (truth[i]) ++s.fn;
  }
  if (s.tp == 0) return s;
  const double tp = static_cast<double>(s.tp);
  s.precision = tp / (tp + static_cast<double>(s.fp));
  s.recall = tp / (tp + static_cast<double>(s.fn));
  s.f1 = tp / (tp + 0.5 * static_cast<double>(s.fp + s.fn));
  return s;
}

int ucr_hit(std::size_t t_star, const Segment& truth) {
  const auto a = static_cast<long long>(truth.start);
  const auto b = static_cast<long long>(truth.end);
  const long long len = b - a;
  const auto t = static_cast<long long>(t_star);
  return std::min(a - len, a - kUcrTolerance) < t && t < std::max(b + len, b + kUcrTolerance) ? 1 : 0;
}

int ucr_score(std::span<const double> scores, const Segment& truth) {
  if (scores.empty()) throw InputError("ucr_score: empty scores");
  return ucr_hit(argmax(scores), truth);
}

std::size_t plateau_midpoint(std::span<const double> scores) {
  if (scores.empty()) throw InputError("plateau_midpoint: empty scores");
  const std::size_t first = argmax(scores);
  std::size_t last = first;
  while (last + 1 < scores.size() && scores[last + 1] == scores[first]) ++last;
  return first + (last - first) / 2;
}

MethodClass method_class(std::string_view detector_id) {
  return detector_id == "ae" ? MethodClass::deep_learning : MethodClass::classical;
}

std::string_view to_string(MethodClass c) {
  return c == MethodClass::classical ? "classical" : "deep_learning";
}

GroupBy parse_group_by(std::string_view text) {
  if (text == "detector") return GroupBy::detector;
  if (text == "anomaly_type") return GroupBy::anomaly_type;
  if (text == "method_class") return GroupBy::method_class;
  throw InputError("unknown grouping '" + std::string(text) + "' (expected detector, anomaly_type or method_class)");
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

}  // namespace

std::vector<AggregateRow> aggregate(std::span<const EvalRecord> records, GroupBy group_by) {
  struct Bucket {
    std::size_t records = 0, failed = 0, auc_missing = 0;
    std::vector<double> auc, f1, ucr;
  };
  std::map<std::pair<std::string, std::string>, Bucket> buckets;
  for (const auto& r : records) {
    std::pair<std::string, std::string> key;
    switch (group_by) {
      case GroupBy::detector: key = {r.detector, r.detector}; break;
      case GroupBy::anomaly_type: key = {r.detector, std::string(to_string(r.anomaly_type))}; break;
      case GroupBy::method_class: key = {"*", std::string(to_string(method_class(r.detector)))}; break;
    }
    auto& b = buckets[key];
    ++b.records;
    if (r.failed) {
      ++b.failed;
      b.auc.push_back(0.0);
      b.f1.push_back(0.0);
      b.ucr.push_back(0.0);
      continue;
    }
    if (r.auc_roc) b.auc.push_back(*r.auc_roc);
    else ++b.auc_missing;
    b.f1.push_back(r.f1);
    b.ucr.push_back(static_cast<double>(r.ucr));
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, b] : buckets) {
    AggregateRow row;
    row.detector = key.first;
    row.group = key.second;
    row.records = b.records;
    row.failed = b.failed;
    row.auc_missing = b.auc_missing;
    row.auc_roc = summarize(b.auc);
    row.f1 = summarize(b.f1);
    row.ucr = summarize(b.ucr);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_records(std::ostream& out, std::span<const EvalRecord> records) {
  out << "series\tanomaly_type\tdetector\trepetition\tseed\tauc_roc\tprecision\trecall\tf1\tucr\t"
         "runtime_s\tstatus\tlabel_informed\treason\n";
  out.precision(12);
  for (const auto& r : records) {
    out << r.series << '\t' << to_string(r.anomaly_type) << '\t' << r.detector << '\t' << r.repetition
        << '\t' << r.seed << '\t';
    if (r.auc_roc) out << *r.auc_roc;
    else out << "NA";
    out << '\t' << r.precision << '\t' << r.recall << '\t' << r.f1 << '\t' << r.ucr << '\t'
        << r.runtime_seconds << '\t' << (r.failed ? "failed" : "ok") << '\t' << (r.label_informed ? 1 : 0)
        << '\t' << r.failure_reason << '\n';
  }
}

std::vector<EvalRecord> read_records(std::istream& in) {
  std::vector<EvalRecord> records;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("records table is empty");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, '\t')) f.push_back(cell);
    if (f.size() == 13) f.emplace_back();
    if (f.size() != 14) throw ParseError("records line " + std::to_string(line_no) + ": expected 14 columns");
    try {
      EvalRecord r;
      r.series = f[0];
      r.anomaly_type = parse_anomaly_type(f[1]).value_or(AnomalyType::unknown);
      r.detector = f[2];
      r.repetition = std::stoull(f[3]);
      r.seed = std::stoull(f[4]);
      if (f[5] != "NA") r.auc_roc = std::stod(f[5]);
      r.precision = std::stod(f[6]);
      r.recall = std::stod(f[7]);
      r.f1 = std::stod(f[8]);
      r.ucr = std::stoi(f[9]);
      r.runtime_seconds = std::stod(f[10]);
      r.failed = f[11] == "failed";
      r.label_informed = f[12] == "1";
      r.failure_reason = f[13];
      records.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError("records line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return records;
}

void write_aggregate(std::ostream& out, std::span<const AggregateRow> rows) {
  out << "detector\tgroup\trecords\tfailed\tauc_missing\tauc_mean\tauc_std\tf1_mean\tf1_std\tucr_mean\tucr_std\n";
  out.precision(10);
  for (const auto& r : rows) {
    out << r.detector << '\t' << r.group << '\t' << r.records << '\t' << r.failed << '\t' << r.auc_missing << '\t'
        << r.auc_roc.mean << '\t' << r.auc_roc.stddev << '\t' << r.f1.mean << '\t' << r.f1.stddev << '\t'
        << r.ucr.mean << '\t' << r.ucr.stddev << '\n';
  }
}

}  // namespace tsad::metrics
