#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bebp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bebp - chronic boundary-pattern poisoning against binary IDS classifiers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> sets;
  std::string eta, rounds, reps, seed;

  std::vector<CLI::App*> subs;
  for (const auto& name : bebp::commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "run configuration file")->required();
    sub->add_option("-o,--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--set", sets, "override, section.key=value (repeatable)");
    sub->add_option("--eta", eta, "shorthand for --set attack.eta=...");
    sub->add_option("--rounds", rounds, "shorthand for --set experiment.rounds=...");
    sub->add_option("--reps", reps, "shorthand for --set experiment.repetitions=...");
    sub->add_option("--seed", seed, "shorthand for --set experiment.seed=...");
    subs.push_back(sub);
  }
  std::string manifest;
  auto* rerun = app.add_subcommand("rerun", "replay a run manifest");
  rerun->add_option("manifest", manifest, "manifest.txt of a previous run")->required();
  rerun->add_option("-o,--out", out_dir, "output directory for the replay");

  CLI11_PARSE(app, argc, argv);

  if (rerun->parsed()) return bebp::rerun(manifest, out_dir, std::cout, std::cerr);

  std::vector<std::string> overrides = sets;
  if (!eta.empty()) overrides.push_back("attack.eta=" + eta);
  if (!rounds.empty()) overrides.push_back("experiment.rounds=" + rounds);
  if (!reps.empty()) overrides.push_back("experiment.repetitions=" + reps);
  if (!seed.empty()) overrides.push_back("experiment.seed=" + seed);
  if (!out_dir.empty()) overrides.push_back("output.dir=" + out_dir);

  for (auto* sub : subs) {
    if (!sub->parsed()) continue;
    bebp::RunConfig config;
    try {
      config = bebp::parse_config(config_path, overrides);
    } catch (const std::exception& e) {
      std::cerr << "bebp: " << e.what() << '\n';
      return 2;
    }
    return bebp::dispatch(sub->get_name(), config, std::cout, std::cerr);
  }
  return 2;
}
