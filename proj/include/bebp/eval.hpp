#ifndef BEBP_EVAL_HPP
#define BEBP_EVAL_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bebp/attack.hpp"
#include "bebp/data.hpp"
#include "bebp/metrics.hpp"
#include "bebp/victims.hpp"

namespace bebp {

struct DataSource {
  std::string kind = "moons";  // moons | kdd | kyoto | file
  std::size_t moons_n = 100;
  double moons_noise = 0.2;
  std::size_t moons_eval_n = 1000;
  std::filesystem::path train_path;
  std::filesystem::path test_path;  // optional official test split
  std::string schema;  // builtin name or schema file; empty = same as kind
  StratumCounts train_counts;
  StratumCounts eval_counts;
  bool normalize = true;
};

struct PreparedData {
  Dataset train;
  std::vector<NamedDataset> evals;  // "evaluating", then "testing" if present
  NormalizationParams normalization;
  CategoricalEncoder encoder;
};

// Loads file-backed sources once; each draw() is an independent seeded
// stratified sample from the cached pool.
class DataProvider {
 public:
  explicit DataProvider(DataSource source);
  PreparedData draw(std::uint64_t seed) const;
  const DataSource& source() const { return source_; }

 private:
  DataSource source_;
  RawDataset pool_;
  std::optional<RawDataset> test_;
};

struct ExperimentSpec {
  DataSource data;
  std::vector<VictimSpec> victims;
  AttackConfig attack;
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;

  std::vector<std::uint64_t> repetition_seeds() const;
};

struct RoundAggregate {
  std::size_t round = 0;
  std::string dataset;
  std::size_t samples = 0;  // repetitions contributing
  double acc_mean = 0.0;
  double acc_std = 0.0;
  std::size_t dr_samples = 0;  // repetitions where DR is defined
  std::optional<double> dr_mean;
  std::optional<double> dr_std;
  double injected_mean = 0.0;
};

struct VictimResult {
  std::string victim;
  std::vector<std::vector<RoundReport>> repetitions;
  std::vector<std::string> errors;  // per repetition, empty when it completed
  std::vector<RoundAggregate> aggregate;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<VictimResult> victims;
  bool complete = true;

  const VictimResult& victim(const std::string& name) const;
};

// Mean and sample standard deviation per (round, dataset) over the completed
// repetitions.
std::vector<RoundAggregate> aggregate(const std::vector<std::vector<RoundReport>>& reps);

using RepetitionObserver = std::function<void(const std::string& victim, std::size_t rep,
                                              const ChronicResult&)>;

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const RepetitionObserver& observer = {});
ExperimentResult run_experiment(const ExperimentSpec& spec, const DataProvider& data,
                                const RepetitionObserver& observer = {});

struct EtaResult {
  double eta;
  ExperimentResult result;
};

// Same seeds, and therefore the same sampled data, for every eta.
std::vector<EtaResult> sweep_eta(const ExperimentSpec& spec, const std::vector<double>& etas);

struct MethodResult {
  PoisonMethod method;
  ExperimentResult result;
};

std::vector<MethodResult> compare_baselines(const ExperimentSpec& spec);

struct Box {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
};

Box data_bounds(const Dataset& data, double pad = 0.1);

struct Raster {
  Box box;
  std::size_t resolution = 0;
  std::vector<double> x, y;  // row-major: y outer, x inner
  std::vector<Label> labels;
  std::vector<double> values;

  std::size_t count(Label label) const;
};

Raster boundary_raster(const Model& model, const Box& box, std::size_t resolution = 200);

// CSV writers. Doubles use shortest round-trip formatting; undefined DR is
// written as "NA".
void write_raster_csv(const Raster& raster, const std::filesystem::path& path);
void write_round_reports_csv(const VictimResult& result, const std::filesystem::path& path);
void write_summary_csv(const ExperimentResult& result, const std::filesystem::path& path);
void write_sweep_csv(const std::vector<EtaResult>& sweep, const std::filesystem::path& path);
void write_baseline_csv(const std::vector<MethodResult>& methods,
                        const std::filesystem::path& path);

std::string format_metric(std::optional<double> value);

}  // namespace bebp

#endif  // BEBP_EVAL_HPP
