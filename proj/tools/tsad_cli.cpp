// Command-line front end: run a benchmark config, inject anomalies, score a
// single series, and summarize record tables.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tsad/harness.hpp"

namespace fs = std::filesystem;
using namespace tsad;

namespace {

int cmd_run(const std::string& config_path) {
  const auto cfg = harness::load_config(config_path);
  const auto records = harness::run(cfg);
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.failed;
  std::cout << records.size() << " records (" << failed << " failed) written to " << cfg.output_dir.string() << '\n';
  auto rows = metrics::aggregate(records, metrics::GroupBy::detector);
  metrics::write_aggregate(std::cout, rows);
  return 0;
}

struct InjectArgs {
  std::string type;
  std::string base = "sine";
  std::uint64_t seed = 7;
  std::string out;
  std::size_t length = 5000;
  std::size_t period = 100;
  double noise = 0.05;
};

int cmd_inject(const InjectArgs& a) {
  const auto type = parse_anomaly_type(a.type);
  if (!type || *type == AnomalyType::unknown) throw InputError("unknown anomaly type '" + a.type + "'");
  const auto base = generate_base(parse_base_kind(a.base), a.length, a.period, a.noise, a.seed);
  const auto spec = plan_injection(base, *type, a.period, a.seed);
  auto series = inject(base, spec);
  series.name = a.type + "-" + a.base;
  fs::path out = a.out;
  if (fs::is_directory(out)) {
    out /= format_ucr_filename(1, series.name, a.length / 4, *series.anomaly);
  }
  write_values(out, series.values);
  std::cout << out.string() << '\t' << series.anomaly->start << '\t' << series.anomaly->end << '\t'
            << to_string(*type) << '\n';
  return 0;
}

struct ScoreArgs {
  std::string detector;
  std::string series;
  std::string out;
  std::uint64_t seed = 42;
  std::size_t l_min = 75;
  std::size_t l_max = 125;
  bool threshold = false;
};

int cmd_score(const ScoreArgs& a) {
  nlohmann::json block;
  if (a.detector == "rrcf_sequences") {
    block = {{"type", "rrcf"}, {"mode", "sequences"}};
  } else if (a.detector == "merlin" || a.detector == "mdi") {
    block = {{"type", a.detector}, {"l_min", a.l_min}, {"l_max", a.l_max}};
  } else {
    block = {{"type", a.detector}};
  }
  nlohmann::json doc{{"schema_version", harness::kConfigSchemaVersion},
                     {"corpus", {{"directory", "."}}},
                     {"detectors", nlohmann::json::array({block})}};
  const auto cfg = harness::parse_config(doc);
  const auto& spec = cfg.detectors.front();

  const auto series = load_unlabeled(a.series);
  const auto output = harness::run_detector(spec, series, a.seed, {a.l_min, a.l_max, false});
  std::vector<bool> labels;
  if (a.threshold) {
    labels = output.labels ? *output.labels : evt::streaming_pot(output.scores.scores, cfg.pot).labels;
  }

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw ParseError("cannot write '" + a.out + "'");
  }
  std::ostream& os = a.out.empty() ? std::cout : file;
  os.precision(17);
  for (std::size_t i = 0; i < output.scores.size(); ++i) {
    os << output.scores.scores[i];
    if (a.threshold) os << '\t' << (labels[i] ? 1 : 0);
    os << '\n';
  }
  std::cerr << spec.id << ": peak at " << output.peak << '\n';
  return 0;
}

int cmd_report(const std::string& records_path, const std::string& group_by) {
  std::ifstream in(records_path);
  if (!in) throw ParseError("cannot open records '" + records_path + "'");
  const auto records = metrics::read_records(in);
  metrics::write_aggregate(std::cout, metrics::aggregate(records, metrics::parse_group_by(group_by)));
  return 0;
}

int cmd_corpus(const std::string& out, const SyntheticCorpusConfig& cfg) {
  const auto corpus = generate_corpus(cfg);
  write_corpus(out, corpus);
  std::cout << corpus.size() << " series written to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-series anomaly detection benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run every (series, detector, repetition) cell of a config");
  run->add_option("config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);

  InjectArgs inj;
  auto* injectc = app.add_subcommand("inject", "Generate a base signal and inject one anomaly");
  injectc->add_option("--type", inj.type, "Anomaly type, e.g. local_peak")->required();
  injectc->add_option("--base", inj.base, "sine, ecg_like or random_walk")->capture_default_str();
  injectc->add_option("--seed", inj.seed)->capture_default_str();
  injectc->add_option("--out", inj.out, "Output file, or a directory for a UCR-named file")->required();
  injectc->add_option("--length", inj.length)->capture_default_str();
  injectc->add_option("--period", inj.period)->capture_default_str();
  injectc->add_option("--noise", inj.noise)->capture_default_str();

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "Score one series with one detector");
  score->add_option("--detector", sc.detector, "rrcf, rrcf_sequences, merlin, mdi or ae")
      ->required()
      ->check(CLI::IsMember({"rrcf", "rrcf_sequences", "merlin", "mdi", "ae"}));
  score->add_option("--series", sc.series, "Series file")->required()->check(CLI::ExistingFile);
  score->add_option("--out", sc.out, "Write scores here instead of stdout");
  score->add_option("--seed", sc.seed)->capture_default_str();
  score->add_option("--l-min", sc.l_min)->capture_default_str();
  score->add_option("--l-max", sc.l_max)->capture_default_str();
  score->add_flag("--labels", sc.threshold, "Append the thresholded label column");

  std::string records_path, group_by = "detector";
  auto* report = app.add_subcommand("report", "Aggregate a records table");
  report->add_option("records", records_path)->required()->check(CLI::ExistingFile);
  report->add_option("--group-by", group_by, "detector, anomaly_type or method_class")->capture_default_str();

  std::string corpus_out;
  SyntheticCorpusConfig corpus_cfg;
  auto* corpus = app.add_subcommand("corpus", "Write the synthetic corpus as UCR-named files");
  corpus->add_option("--out", corpus_out)->required();
  corpus->add_option("--length", corpus_cfg.length)->capture_default_str();
  corpus->add_option("--period", corpus_cfg.period)->capture_default_str();
  corpus->add_option("--noise", corpus_cfg.noise_std)->capture_default_str();
  corpus->add_option("--seed", corpus_cfg.seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path);
    if (*injectc) return cmd_inject(inj);
    if (*score) return cmd_score(sc);
    if (*report) return cmd_report(records_path, group_by);
    if (*corpus) return cmd_corpus(corpus_out, corpus_cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
