#include "bebp/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "bebp/random.hpp"
#include "strings.hpp"

namespace bebp {

namespace fs = std::filesystem;

const std::vector<std::string>& commands() {
  static const std::vector<std::string> kCommands = {
      "prepare", "attack", "experiment", "sweep", "compare-baselines", "raster"};
  return kCommands;
}

namespace {

class Manifest {
 public:
  Manifest(const RunConfig& config, std::string command)
      : path_(config.output_dir / "manifest.txt"), config_(config), command_(std::move(command)) {
    write("running", "");
  }

  void finish(const std::string& status, const std::string& error) { write(status, error); }

 private:
  void write(const std::string& status, const std::string& error) {
    std::ofstream out(path_);
    if (!out) throw IoError("cannot write " + path_.string());
    out << "# bebp run manifest; replay with: bebp rerun " << path_.filename().string()
        << "\n[manifest]\n";
    out << "command = " << command_ << '\n';
    out << "status = " << status << '\n';
    out << "repetition_seeds =";
    for (auto s : config_.experiment.repetition_seeds()) out << ' ' << s;
    out << '\n';
    std::string clean;
    for (char c : error) clean += c == '\n' ? ' ' : c;
    out << "error = " << clean << "\n\n";
    out << config_.render();
  }

  fs::path path_;
  const RunConfig& config_;
  std::string command_;
};

void write_prepared(const PreparedData& data, const fs::path& dir) {
  write_dataset_csv(data.train, dir / "train.csv");
  for (const auto& e : data.evals) write_dataset_csv(e.data, dir / (e.name + ".csv"));
  if (data.normalization.dim() > 0) data.normalization.save(dir / "normalization.csv");
  if (!data.encoder.vocabularies.empty()) data.encoder.save(dir / "encoding.csv");
}

std::vector<std::string> feature_names(const Dataset& data) {
  std::vector<std::string> names;
  for (const auto& f : data.schema) names.push_back(f.name);
  return names;
}

void run_prepare(const RunConfig& config, std::ostream& log) {
  const DataProvider provider(config.experiment.data);
  const auto seeds = config.experiment.repetition_seeds();
  const PreparedData data = provider.draw(derive_seed(seeds.front(), 0));
  write_prepared(data, config.output_dir);
  log << "prepared " << data.train.size() << " training samples ("
      << data.train.count(Label::kNormal) << " normal, " << data.train.count(Label::kAbnormal)
      << " abnormal)\n";
}

// One repetition (the first seed) per victim, with adversarial batches and the
// final model kept for audit.
void run_attack(const RunConfig& config, std::ostream& log) {
  const DataProvider provider(config.experiment.data);
  const auto seeds = config.experiment.repetition_seeds();
  const PreparedData data = provider.draw(derive_seed(seeds.front(), 0));
  AttackConfig cfg = config.experiment.attack;
  cfg.seed = derive_seed(seeds.front(), 1);
  for (const auto& victim : config.experiment.victims) {
    const ChronicResult chronic = chronic_attack(data.train, victim, cfg, data.evals);
    VictimResult vr{victim.name, {{}}, {""}, {}};
    std::vector<AdversarialBatch> batches;
    for (const auto& round : chronic.rounds) {
      vr.repetitions[0].push_back(round.report);
      if (round.report.round > 0) batches.push_back(round.batch);
    }
    write_round_reports_csv(vr, config.output_dir / ("report_" + victim.name + ".csv"));
    write_batch_csv(batches, feature_names(data.train),
                    config.output_dir / ("adversarial_" + victim.name + ".csv"));
    save_model(*chronic.rounds.back().model,
               config.output_dir / ("model_" + victim.name + ".txt"));
    const auto& first = chronic.rounds.front().report.evals;
    const auto& last = chronic.rounds.back().report.evals;
    if (!first.empty()) {
      log << victim.name << ": " << first[0].dataset << " acc " << first[0].acc << " -> "
          << last[0].acc << ", dr " << format_metric(first[0].dr) << " -> "
          << format_metric(last[0].dr) << '\n';
    }
  }
}

bool run_experiment_command(const RunConfig& config, std::ostream& log) {
  const ExperimentResult result = run_experiment(config.experiment);
  for (const auto& v : result.victims) {
    write_round_reports_csv(v, config.output_dir / ("report_" + v.victim + ".csv"));
  }
  write_summary_csv(result, config.output_dir / "summary.csv");
  for (const auto& v : result.victims) {
    for (std::size_t rep = 0; rep < v.errors.size(); ++rep) {
      if (!v.errors[rep].empty()) {
        log << v.victim << " repetition " << rep << " failed: " << v.errors[rep] << '\n';
      }
    }
  }
  return result.complete;
}

bool run_sweep(const RunConfig& config) {
  const auto sweep = sweep_eta(config.experiment, config.eta_list);
  write_sweep_csv(sweep, config.output_dir / "sweep.csv");
  bool complete = true;
  for (const auto& s : sweep) complete = complete && s.result.complete;
  return complete;
}

bool run_baselines(const RunConfig& config) {
  const auto methods = compare_baselines(config.experiment);
  write_baseline_csv(methods, config.output_dir / "baselines.csv");
  bool complete = true;
  for (const auto& m : methods) {
    write_summary_csv(m.result, config.output_dir /
                                    ("summary_" + std::string(to_string(m.method)) + ".csv"));
    complete = complete && m.result.complete;
  }
  return complete;
}

void run_raster(const RunConfig& config) {
  const DataProvider provider(config.experiment.data);
  const auto seeds = config.experiment.repetition_seeds();
  const PreparedData data = provider.draw(derive_seed(seeds.front(), 0));
  if (data.train.dim() != 2) {
    throw SchemaError("raster: data has " + std::to_string(data.train.dim()) +
                      " features; rasters need exactly 2");
  }
  const Box box = data_bounds(data.train);
  AttackConfig cfg = config.experiment.attack;
  cfg.seed = derive_seed(seeds.front(), 1);
  for (const auto& victim : config.experiment.victims) {
    chronic_attack(data.train, victim, cfg, data.evals,
                   [&](const RoundOutcome& round, const Dataset& train) {
                     const std::string stem =
                         victim.name + "_round" + std::to_string(round.report.round);
                     write_raster_csv(boundary_raster(*round.model, box,
                                                      config.raster_resolution),
                                      config.output_dir / ("raster_" + stem + ".csv"));
                     write_dataset_csv(train, config.output_dir / ("train_" + stem + ".csv"));
                   });
  }
}

}  // namespace

int dispatch(const std::string& command, const RunConfig& config, std::ostream& log,
             std::ostream& err) {
  const auto& known = commands();
  if (std::find(known.begin(), known.end(), command) == known.end()) {
    err << "bebp: unknown command '" << command << "'\n";
    return 2;
  }
  try {
    fs::create_directories(config.output_dir);
  } catch (const fs::filesystem_error& e) {
    err << "bebp: cannot create output directory: " << e.what() << '\n';
    return 1;
  }
  std::optional<Manifest> manifest;
  try {
    manifest.emplace(config, command);
    bool complete = true;
    if (command == "prepare") run_prepare(config, log);
    else if (command == "attack") run_attack(config, log);
    else if (command == "experiment") complete = run_experiment_command(config, log);
    else if (command == "sweep") complete = run_sweep(config);
    else if (command == "compare-baselines") complete = run_baselines(config);
    else run_raster(config);
    manifest->finish(complete ? "complete" : "partial", "");
    return complete ? 0 : 3;
  } catch (const std::exception& e) {
    err << "bebp " << command << ": " << e.what() << '\n';
    if (manifest) {
      try {
        manifest->finish("failed", e.what());
      } catch (const std::exception&) {
      }
    }
    return 1;
  }
}

int rerun(const fs::path& manifest, const std::string& output_override, std::ostream& log,
          std::ostream& err) {
  try {
    std::vector<std::string> overrides{"manifest.status=", "manifest.error="};
    if (!output_override.empty()) overrides.push_back("output.dir=" + output_override);
    const RunConfig config = parse_config(manifest, overrides);
    const std::string command = config.values.at("manifest.command");
    if (command.empty()) {
      err << "bebp rerun: " << manifest.string() << " records no command\n";
      return 2;
    }
    return dispatch(command, config, log, err);
  } catch (const std::exception& e) {
    err << "bebp rerun: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace bebp
