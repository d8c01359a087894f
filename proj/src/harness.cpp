#include "tsad/harness.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

#include "tsad/merlin.hpp"

namespace tsad::harness {

using nlohmann::json;

#ifndef TSAD_VERSION
#define TSAD_VERSION "0.1.0"
#endif

std::string_view code_version() { return TSAD_VERSION; }

std::string_view to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::rrcf: return "rrcf";
    case DetectorKind::merlin: return "merlin";
    case DetectorKind::mdi: return "mdi";
    case DetectorKind::ae: return "ae";
  }
  return "merlin";
}

LengthRange length_strategy(const TimeSeries& series, const LengthStrategy& s) {
  switch (s.kind) {
    case LengthStrategy::Kind::range:
      return {s.min_length, s.max_length, false};
    case LengthStrategy::Kind::fixed:
      return {s.fixed_length, s.fixed_length, false};
    case LengthStrategy::Kind::dynamic: {
      if (!series.anomaly) {
        throw InputError("dynamic length strategy needs a labeled series ('" + series.name + "' has no anomaly)");
      }
      const auto span = static_cast<double>(series.anomaly->span());
      const auto lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(s.dynamic_low * span)));
      const auto hi = std::max<std::size_t>(lo, static_cast<std::size_t>(std::ceil(s.dynamic_high * span)));
      return {lo, hi, true};
    }
  }
  return {};
}

std::uint64_t repetition_seed(std::uint64_t base_seed, std::size_t repetition) {
  return base_seed + static_cast<std::uint64_t>(repetition) * kSeedStride;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError("config: missing key '" + key + "' in " + where);
  }
  return obj.at(key);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: key '" + key + "' in " + where + " has the wrong type");
  }
}

LengthStrategy parse_lengths(const json& block, const std::string& where) {
  LengthStrategy s;
  const auto kind = get_or<std::string>(block, "strategy", "range", where);
  if (kind == "range") {
    s.kind = LengthStrategy::Kind::range;
  } else if (kind == "fixed") {
    s.kind = LengthStrategy::Kind::fixed;
  } else if (kind == "dynamic") {
    s.kind = LengthStrategy::Kind::dynamic;
  } else {
    throw ConfigError("config: strategy '" + kind + "' in " + where + " is not range, fixed or dynamic");
  }
  s.min_length = get_or<std::size_t>(block, "l_min", s.min_length, where);
  s.max_length = get_or<std::size_t>(block, "l_max", s.max_length, where);
  s.fixed_length = get_or<std::size_t>(block, "length", s.fixed_length, where);
  s.dynamic_low = get_or<double>(block, "pct_lo", s.dynamic_low, where);
  s.dynamic_high = get_or<double>(block, "pct_hi", s.dynamic_high, where);
  if (s.min_length < 1 || s.min_length > s.max_length || s.fixed_length < 1 || !(s.dynamic_low > 0.0) ||
      s.dynamic_low > s.dynamic_high) {
    throw ConfigError("config: inconsistent subsequence lengths in " + where);
  }
  return s;
}

std::string default_id(const DetectorSpec& d) {
  std::string id(to_string(d.kind));
  if (d.kind == DetectorKind::rrcf && d.forest.mode == rrcf::Mode::sequences) return id + "_sequences";
  if (d.kind == DetectorKind::merlin || d.kind == DetectorKind::mdi) {
    if (d.lengths.kind == LengthStrategy::Kind::fixed) return id + "_fixed_" + std::to_string(d.lengths.fixed_length);
    if (d.lengths.kind == LengthStrategy::Kind::dynamic) return id + "_dynamic";
  }
  return id;
}

DetectorSpec parse_detector(const json& block, std::size_t position) {
  const std::string where = "detectors[" + std::to_string(position) + "]";
  if (!block.is_object()) throw ConfigError("config: " + where + " must be an object");
  const auto type = require(block, "type", where).get<std::string>();
  DetectorSpec d;
  if (type == "merlin" || type == "mdi") {
    d.kind = type == "merlin" ? DetectorKind::merlin : DetectorKind::mdi;
    std::set<std::string> allowed{"type", "id", "strategy", "l_min", "l_max", "length", "pct_lo", "pct_hi"};
    if (d.kind == DetectorKind::mdi) allowed.insert({"use_proposals", "proposal_quantile"});
    reject_unknown(block, allowed, where);
    d.lengths = parse_lengths(block, where);
    d.use_proposals = get_or<bool>(block, "use_proposals", false, where);
    d.proposal_quantile = get_or<double>(block, "proposal_quantile", 0.99, where);
  } else if (type == "rrcf") {
    d.kind = DetectorKind::rrcf;
    reject_unknown(block, {"type", "id", "mode", "n_trees", "tree_size", "window_length", "stride"}, where);
    const auto mode = get_or<std::string>(block, "mode", "points", where);
    if (mode == "sequences") d.forest = rrcf::ForestConfig::sequences_defaults();
    else if (mode != "points") throw ConfigError("config: mode '" + mode + "' in " + where + " is not points or sequences");
    d.forest.n_trees = get_or<std::size_t>(block, "n_trees", d.forest.n_trees, where);
    d.forest.tree_size = get_or<std::size_t>(block, "tree_size", d.forest.tree_size, where);
    d.forest.window_length = get_or<std::size_t>(block, "window_length", d.forest.window_length, where);
    d.forest.stride = get_or<std::size_t>(block, "stride", d.forest.stride, where);
    d.forest.validate();
  } else if (type == "ae") {
    d.kind = DetectorKind::ae;
    reject_unknown(block, {"type", "id", "window", "stride", "epochs", "batch_size", "latent_dim", "learning_rate",
                           "weight_decay"},
                   where);
    d.ae.window = get_or<std::size_t>(block, "window", d.ae.window, where);
    d.ae.stride = get_or<std::size_t>(block, "stride", d.ae.stride, where);
    d.ae.epochs = get_or<std::size_t>(block, "epochs", d.ae.epochs, where);
    d.ae.batch_size = get_or<std::size_t>(block, "batch_size", d.ae.batch_size, where);
    d.ae.latent_dim = get_or<std::size_t>(block, "latent_dim", d.ae.latent_dim, where);
    d.ae.learning_rate = get_or<double>(block, "learning_rate", d.ae.learning_rate, where);
    d.ae.weight_decay = get_or<double>(block, "weight_decay", d.ae.weight_decay, where);
    d.ae.validate();
  } else {
    throw ConfigError("config: " + where + " has unknown type '" + type + "' (expected rrcf, merlin, mdi or ae)");
  }
  d.id = get_or<std::string>(block, "id", default_id(d), where);
  return d;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc, {"schema_version", "corpus", "detectors", "pot", "repetitions", "base_seed", "output_dir", "threads"},
                 "the top level");
  RunConfig cfg;
  cfg.source = doc;
  cfg.schema_version = require(doc, "schema_version", "the top level").get<int>();
  if (cfg.schema_version != kConfigSchemaVersion) {
    throw ConfigError("config: unsupported schema_version " + std::to_string(cfg.schema_version));
  }

  const auto& corpus = require(doc, "corpus", "the top level");
  if (corpus.contains("directory")) {
    reject_unknown(corpus, {"directory"}, "corpus");
    cfg.corpus_directory = corpus.at("directory").get<std::string>();
  } else {
    const auto& syn = require(corpus, "synthetic", "corpus (or 'directory')");
    reject_unknown(syn, {"types", "bases", "length", "period", "noise_std", "seed"}, "corpus.synthetic");
    if (syn.contains("types") && syn.at("types").is_array()) {
      for (const auto& t : syn.at("types")) {
        const auto name = t.get<std::string>();
        auto type = parse_anomaly_type(name);
        if (!type || *type == AnomalyType::unknown) throw ConfigError("config: unknown anomaly type '" + name + "'");
        cfg.synthetic.types.push_back(*type);
      }
    }
    if (syn.contains("bases")) {
      cfg.synthetic.bases.clear();
      for (const auto& b : syn.at("bases")) cfg.synthetic.bases.push_back(parse_base_kind(b.get<std::string>()));
    }
    cfg.synthetic.length = get_or<std::size_t>(syn, "length", cfg.synthetic.length, "corpus.synthetic");
    cfg.synthetic.period = get_or<std::size_t>(syn, "period", cfg.synthetic.period, "corpus.synthetic");
    cfg.synthetic.noise_std = get_or<double>(syn, "noise_std", cfg.synthetic.noise_std, "corpus.synthetic");
    cfg.synthetic.seed = get_or<std::uint64_t>(syn, "seed", cfg.synthetic.seed, "corpus.synthetic");
  }

  const auto& detectors = require(doc, "detectors", "the top level");
  if (!detectors.is_array() || detectors.empty()) throw ConfigError("config: 'detectors' must be a nonempty array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < detectors.size(); ++i) {
    auto d = parse_detector(detectors[i], i);
    if (!ids.insert(d.id).second) throw ConfigError("config: duplicate detector id '" + d.id + "'");
    cfg.detectors.push_back(std::move(d));
  }

  if (doc.contains("pot")) {
    const auto& p = doc.at("pot");
    reject_unknown(p, {"q", "init_fraction", "th0_quantile", "refit_cadence", "orientation"}, "pot");
    cfg.pot.q = get_or<double>(p, "q", cfg.pot.q, "pot");
    cfg.pot.init_fraction = get_or<double>(p, "init_fraction", cfg.pot.init_fraction, "pot");
    cfg.pot.th0_quantile = get_or<double>(p, "th0_quantile", cfg.pot.th0_quantile, "pot");
    cfg.pot.refit_cadence = get_or<std::size_t>(p, "refit_cadence", cfg.pot.refit_cadence, "pot");
    const auto orientation = get_or<std::string>(p, "orientation", "upper", "pot");
    if (orientation == "upper") cfg.pot.orientation = evt::Orientation::upper;
    else if (orientation == "lower") cfg.pot.orientation = evt::Orientation::lower;
    else throw ConfigError("config: pot.orientation must be upper or lower");
  }
  cfg.pot.validate();
  cfg.repetitions = get_or<std::size_t>(doc, "repetitions", cfg.repetitions, "the top level");
  cfg.base_seed = get_or<std::uint64_t>(doc, "base_seed", cfg.base_seed, "the top level");
  cfg.output_dir = get_or<std::string>(doc, "output_dir", cfg.output_dir.string(), "the top level");
  cfg.threads = get_or<int>(doc, "threads", 0, "the top level");
  if (cfg.repetitions == 0) throw ConfigError("config: repetitions must be >= 1");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config '" + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Evaluation

DetectorOutput run_detector(const DetectorSpec& spec, const TimeSeries& series, std::uint64_t seed,
                            const LengthRange& lengths) {
  DetectorOutput out;
  switch (spec.kind) {
    case DetectorKind::rrcf: {
      auto cfg = spec.forest;
      cfg.seed = seed;
      out.scores = rrcf::score_series(series, cfg);
      out.peak = cfg.mode == rrcf::Mode::points ? argmax(out.scores.scores)
                                                : metrics::plateau_midpoint(out.scores.scores);
      break;
    }
    case DetectorKind::merlin: {
      auto scan = merlin::merlin_scan(series, lengths.min_length, lengths.max_length);
      out.labels = scan.labels(series.size());
      const auto top = scan.top();
      out.peak = top ? top->midpoint() : argmax(scan.scores.scores);
      out.scores = std::move(scan.scores);
      break;
    }
    case DetectorKind::mdi: {
      mdi::MdiConfig cfg{lengths.min_length, lengths.max_length, spec.use_proposals, spec.proposal_quantile};
      auto result = mdi::mdi_scan(series, cfg);
      out.peak = result.intervals_scored > 0 ? result.top.midpoint() : argmax(result.scores.scores);
      out.scores = std::move(result.scores);
      break;
    }
    case DetectorKind::ae: {
      auto cfg = spec.ae;
      cfg.seed = seed;
      const auto trained = ae::train(series.values, cfg);
      out.scores = ae::score(trained.model, series.values, cfg);
      out.peak = metrics::plateau_midpoint(out.scores.scores);
      break;
    }
  }
  out.scores.detector_id = spec.id;
  return out;
}

metrics::EvalRecord evaluate(const TimeSeries& series, const DetectorSpec& spec, const evt::PotConfig& pot,
                             std::size_t repetition, std::uint64_t seed, CellTrace* trace) {
  metrics::EvalRecord rec;
  rec.series = series.name;
  rec.anomaly_type = series.anomaly_type;
  rec.detector = spec.id;
  rec.repetition = repetition;
  rec.seed = seed;
  try {
    if (!series.anomaly) throw InputError("series '" + series.name + "' has no ground-truth segment");
    const Segment truth_segment = *series.anomaly;
    LengthRange lengths;
    if (spec.kind == DetectorKind::merlin || spec.kind == DetectorKind::mdi) {
      lengths = length_strategy(series, spec.lengths);
      rec.label_informed = lengths.label_informed;
    }
    // Detectors and thresholding see values only.
    TimeSeries blind;
    blind.values = series.values;
    blind.name = series.name;

    const auto started = std::chrono::steady_clock::now();
    auto out = run_detector(spec, blind, seed, lengths);
    std::vector<bool> labels;
    bool thresholded = false;
    if (out.labels) {
      labels = std::move(*out.labels);
    } else {
      labels = evt::streaming_pot(out.scores.scores, pot, spec.id).labels;
      thresholded = true;
    }
    rec.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const auto truth = series.truth();
    labels = evt::point_adjust(std::move(labels), truth_segment);
    const auto f1 = metrics::f1_score(labels, truth);
    rec.precision = f1.precision;
    rec.recall = f1.recall;
    rec.f1 = f1.f1;
    rec.auc_roc = metrics::auc_roc(out.scores.scores, truth);
    rec.ucr = metrics::ucr_hit(out.peak, truth_segment);
    if (trace) {
      trace->thresholded = thresholded;
      trace->labels = std::move(labels);
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.failure_reason = e.what();
    for (auto& ch : rec.failure_reason) {
      if (ch == '\t' || ch == '\n') ch = ' ';
    }
  }
  return rec;
}

std::vector<metrics::EvalRecord> run_cells(std::span<const TimeSeries> corpus, const RunConfig& config) {
  struct Cell {
    std::size_t series, detector, repetition;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    for (std::size_t d = 0; d < config.detectors.size(); ++d) {
      for (std::size_t r = 0; r < config.repetitions; ++r) cells.push_back({s, d, r});
    }
  }
  if (config.threads > 0) omp_set_num_threads(config.threads);
  omp_set_max_active_levels(1);

  std::vector<metrics::EvalRecord> records(cells.size());
  const auto count = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto& c = cells[static_cast<std::size_t>(i)];
    records[static_cast<std::size_t>(i)] =
        evaluate(corpus[c.series], config.detectors[c.detector], config.pot, c.repetition,
                 repetition_seed(config.base_seed, c.repetition));
  }
  return records;
}

std::vector<TimeSeries> load_corpus(const RunConfig& config) {
  if (config.corpus_directory) return tsad::load_corpus(*config.corpus_directory);
  return generate_corpus(config.synthetic);
}

std::vector<metrics::EvalRecord> run(const RunConfig& config) {
  const auto corpus = load_corpus(config);
  auto records = run_cells(corpus, config);

  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  {
    std::ofstream out(config.output_dir / "records.tsv");
    metrics::write_records(out, records);
  }
  const std::pair<metrics::GroupBy, const char*> groupings[] = {
      {metrics::GroupBy::detector, "aggregate_detector.tsv"},
      {metrics::GroupBy::anomaly_type, "aggregate_anomaly_type.tsv"},
      {metrics::GroupBy::method_class, "aggregate_method_class.tsv"},
  };
  for (const auto& [group_by, file] : groupings) {
    std::ofstream out(config.output_dir / file);
    metrics::write_aggregate(out, metrics::aggregate(records, group_by));
  }

  json manifest;
  manifest["schema_version"] = kConfigSchemaVersion;
  manifest["code_version"] = code_version();
  manifest["config"] = config.source;
  manifest["records"] = records.size();
  json series = json::array();
  for (const auto& ts : corpus) {
    json entry{{"name", ts.name}, {"length", ts.size()}, {"type", to_string(ts.anomaly_type)}};
    if (ts.anomaly) {
      entry["start"] = ts.anomaly->start;
      entry["end"] = ts.anomaly->end;
    }
    series.push_back(entry);
  }
  manifest["corpus"] = series;
  std::ofstream(config.output_dir / "manifest.json") << manifest.dump(2) << '\n';
  return records;
}

}  // namespace tsad::harness
