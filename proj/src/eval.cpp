#include "bebp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "bebp/random.hpp"

namespace bebp {

// ------------------------------------------------------------------ metrics

ConfusionCounts tally(Label truth, Label predicted, ConfusionCounts c) {
  if (truth == Label::kAbnormal) {
    (predicted == Label::kAbnormal ? c.tp : c.fn) += 1;
  } else {
    (predicted == Label::kNormal ? c.tn : c.fp) += 1;
  }
  return c;
}

ConfusionCounts confusion(const Model& model, const Dataset& data) {
  if (data.empty()) throw SizeError("confusion: empty dataset");
  ConfusionCounts c;
  for (const auto& s : data.samples) c = tally(s.label, model.predict(s.features), c);
  return c;
}

double acc(const ConfusionCounts& c) {
  if (c.total() == 0) throw SizeError("acc: no samples");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

std::optional<double> dr(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

RoundReport evaluate_round(std::size_t round, const Model& model,
                           const std::vector<NamedDataset>& eval_sets) {
  RoundReport report;
  report.round = round;
  for (const auto& set : eval_sets) {
    EvalEntry entry;
    entry.dataset = set.name;
    entry.counts = confusion(model, set.data);
    entry.acc = acc(entry.counts);
    entry.dr = dr(entry.counts);
    report.evals.push_back(std::move(entry));
  }
  return report;
}

std::string format_metric(std::optional<double> value) {
  return value ? format_double(*value) : "NA";
}

// -------------------------------------------------------------------- data

DataProvider::DataProvider(DataSource source) : source_(std::move(source)) {
  if (source_.kind == "moons") {
    if (source_.moons_n < 2) throw ConfigError("dataset.moons_n must be >= 2");
    return;
  }
  if (source_.kind != "kdd" && source_.kind != "kyoto" && source_.kind != "file") {
    throw ConfigError("unknown dataset.source '" + source_.kind + "'");
  }
  const std::string schema_name = source_.schema.empty() ? source_.kind : source_.schema;
  if (schema_name == "file") throw ConfigError("dataset.schema is required for source = file");
  const Schema schema = Schema::named_or_file(schema_name);
  if (source_.train_path.empty()) throw ConfigError("dataset.train_path is required");
  pool_ = binarize_labels(load_kdd_style(source_.train_path, schema));
  if (!source_.test_path.empty()) {
    test_ = binarize_labels(load_kdd_style(source_.test_path, schema));
  }
  if (source_.train_counts.empty()) {
    if (schema.grouping != "kdd") {
      throw ConfigError("dataset.train_counts is required for non-KDD data");
    }
    source_.train_counts = kdd_training_counts();
  }
  if (source_.eval_counts.empty() && schema.grouping == "kdd") {
    source_.eval_counts = kdd_evaluating_counts();
  }
}

PreparedData DataProvider::draw(std::uint64_t seed) const {
  PreparedData out;
  if (source_.kind == "moons") {
    out.train = make_moons(source_.moons_n, source_.moons_noise, derive_seed(seed, 0));
    Dataset eval =
        make_moons(source_.moons_eval_n, source_.moons_noise, derive_seed(seed, 1));
    if (source_.normalize) {
      out.normalization = fit_normalize(out.train);
      out.train = apply_normalize(out.normalization, std::move(out.train));
      eval = apply_normalize(out.normalization, std::move(eval));
    }
    out.evals.push_back({"evaluating", std::move(eval)});
    return out;
  }
  auto train_split = stratified_sample(pool_, source_.train_counts, derive_seed(seed, 0));
  out.encoder = fit_encoder(train_split.selected);
  out.train = encode(out.encoder, train_split.selected);
  std::vector<NamedDataset> evals;
  if (!source_.eval_counts.empty()) {
    auto eval_split =
        stratified_sample(train_split.remainder, source_.eval_counts, derive_seed(seed, 1));
    evals.push_back({"evaluating", encode(out.encoder, eval_split.selected)});
  }
  if (test_) evals.push_back({"testing", encode(out.encoder, *test_)});
  if (source_.normalize) {
    out.normalization = fit_normalize(out.train);
    out.train = apply_normalize(out.normalization, std::move(out.train));
    for (auto& e : evals) e.data = apply_normalize(out.normalization, std::move(e.data));
  }
  out.evals = std::move(evals);
  return out;
}

// -------------------------------------------------------------- experiments

std::vector<std::uint64_t> ExperimentSpec::repetition_seeds() const {
  std::vector<std::uint64_t> seeds;
  for (std::size_t r = 0; r < repetitions; ++r) seeds.push_back(derive_seed(seed, r));
  return seeds;
}

const VictimResult& ExperimentResult::victim(const std::string& name) const {
  for (const auto& v : victims) {
    if (v.victim == name) return v;
  }
  throw Error("no result for victim '" + name + "'");
}

namespace {

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

}  // namespace

std::vector<RoundAggregate> aggregate(const std::vector<std::vector<RoundReport>>& reps) {
  // Keyed by (round, dataset position) to keep dataset order stable.
  std::map<std::pair<std::size_t, std::size_t>, std::string> names;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> accs, drs, injected;
  for (const auto& rep : reps) {
    for (const auto& report : rep) {
      for (std::size_t k = 0; k < report.evals.size(); ++k) {
        const auto key = std::make_pair(report.round, k);
        names[key] = report.evals[k].dataset;
        accs[key].push_back(report.evals[k].acc);
        if (report.evals[k].dr) drs[key].push_back(*report.evals[k].dr);
        injected[key].push_back(static_cast<double>(report.injected));
      }
    }
  }
  std::vector<RoundAggregate> out;
  for (const auto& [key, name] : names) {
    RoundAggregate a;
    a.round = key.first;
    a.dataset = name;
    const auto& acc_values = accs[key];
    a.samples = acc_values.size();
    const Moments ma = moments(acc_values);
    a.acc_mean = ma.mean;
    a.acc_std = ma.std;
    const auto& dr_values = drs[key];
    a.dr_samples = dr_values.size();
    if (!dr_values.empty()) {
      const Moments md = moments(dr_values);
      a.dr_mean = md.mean;
      a.dr_std = md.std;
    }
    a.injected_mean = moments(injected[key]).mean;
    out.push_back(std::move(a));
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const DataProvider& data,
                                const RepetitionObserver& observer) {
  spec.attack.validate();
  if (spec.victims.empty()) throw ConfigError("experiment needs at least one victim");
  ExperimentResult result;
  result.spec = spec;
  for (const auto& v : spec.victims) result.victims.push_back({v.name, {}, {}, {}});

  const auto seeds = spec.repetition_seeds();
  for (std::size_t rep = 0; rep < seeds.size(); ++rep) {
    std::optional<PreparedData> prepared;
    std::string data_error;
    try {
      prepared = data.draw(derive_seed(seeds[rep], 0));
    } catch (const Error& e) {
      data_error = e.what();
    }
    for (std::size_t v = 0; v < spec.victims.size(); ++v) {
      auto& vr = result.victims[v];
      if (!prepared) {
        vr.errors.push_back(data_error);
        result.complete = false;
        continue;
      }
      AttackConfig cfg = spec.attack;
      cfg.seed = derive_seed(seeds[rep], 1);
      try {
        ChronicResult chronic =
            chronic_attack(prepared->train, spec.victims[v], cfg, prepared->evals);
        std::vector<RoundReport> reports;
        for (const auto& round : chronic.rounds) reports.push_back(round.report);
        vr.repetitions.push_back(std::move(reports));
        vr.errors.emplace_back();
        if (observer) observer(vr.victim, rep, chronic);
      } catch (const Error& e) {
        vr.errors.push_back(e.what());
        result.complete = false;
      }
    }
  }
  for (auto& vr : result.victims) vr.aggregate = aggregate(vr.repetitions);
  return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const RepetitionObserver& observer) {
  const DataProvider data(spec.data);
  return run_experiment(spec, data, observer);
}

std::vector<EtaResult> sweep_eta(const ExperimentSpec& spec, const std::vector<double>& etas) {
  for (double eta : etas) {
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("sweep: every eta must lie in (0, 1)");
  }
  const DataProvider data(spec.data);
  std::vector<EtaResult> out;
  for (double eta : etas) {
    ExperimentSpec s = spec;
    s.attack.eta = eta;
    out.push_back({eta, run_experiment(s, data)});
  }
  return out;
}

std::vector<MethodResult> compare_baselines(const ExperimentSpec& spec) {
  const DataProvider data(spec.data);
  std::vector<MethodResult> out;
  for (auto method : {PoisonMethod::kBebp, PoisonMethod::kBasic, PoisonMethod::kRandom}) {
    ExperimentSpec s = spec;
    s.attack.method = method;
    out.push_back({method, run_experiment(s, data)});
  }
  return out;
}

// ------------------------------------------------------------------ raster

Box data_bounds(const Dataset& data, double pad) {
  if (data.empty() || data.dim() != 2) {
    throw SchemaError("data_bounds: need nonempty 2-D data");
  }
  Box b{data.samples[0].features[0], data.samples[0].features[0],
        data.samples[0].features[1], data.samples[0].features[1]};
  for (const auto& s : data.samples) {
    b.x_min = std::min(b.x_min, s.features[0]);
    b.x_max = std::max(b.x_max, s.features[0]);
    b.y_min = std::min(b.y_min, s.features[1]);
    b.y_max = std::max(b.y_max, s.features[1]);
  }
  const double px = (b.x_max - b.x_min) * pad;
  const double py = (b.y_max - b.y_min) * pad;
  return {b.x_min - px, b.x_max + px, b.y_min - py, b.y_max + py};
}

std::size_t Raster::count(Label label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

Raster boundary_raster(const Model& model, const Box& box, std::size_t resolution) {
  if (model.dim() != 2) {
    throw SchemaError("boundary_raster: model has " + std::to_string(model.dim()) +
                      " features; rasters need exactly 2");
  }
  if (resolution < 2) throw SizeError("boundary_raster: resolution must be >= 2");
  Raster r;
  r.box = box;
  r.resolution = resolution;
  const double step_x = (box.x_max - box.x_min) / static_cast<double>(resolution - 1);
  const double step_y = (box.y_max - box.y_min) / static_cast<double>(resolution - 1);
  for (std::size_t iy = 0; iy < resolution; ++iy) {
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      const double p[2] = {box.x_min + step_x * static_cast<double>(ix),
                           box.y_min + step_y * static_cast<double>(iy)};
      const double value = model.decision_value(p);
      r.x.push_back(p[0]);
      r.y.push_back(p[1]);
      r.values.push_back(value);
      r.labels.push_back(value > 0.0 ? Label::kAbnormal : Label::kNormal);
    }
  }
  return r;
}

// ----------------------------------------------------------------- writers

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string join_warnings(const std::vector<std::string>& warnings) {
  std::string out;
  for (const auto& w : warnings) {
    if (!out.empty()) out += ';';
    for (char c : w) out += (c == ',' || c == '\n') ? ' ' : c;
  }
  return out;
}

}  // namespace

void write_raster_csv(const Raster& raster, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "x,y,label,value\n";
  for (std::size_t i = 0; i < raster.labels.size(); ++i) {
    out << format_double(raster.x[i]) << ',' << format_double(raster.y[i]) << ','
        << to_string(raster.labels[i]) << ',' << format_double(raster.values[i]) << '\n';
  }
}

void write_round_reports_csv(const VictimResult& result, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "repetition,round,dataset,tp,tn,fp,fn,acc,dr,injected,train_size,warnings\n";
  for (std::size_t rep = 0; rep < result.repetitions.size(); ++rep) {
    for (const auto& report : result.repetitions[rep]) {
      for (const auto& e : report.evals) {
        out << rep << ',' << report.round << ',' << e.dataset << ',' << e.counts.tp << ','
            << e.counts.tn << ',' << e.counts.fp << ',' << e.counts.fn << ','
            << format_double(e.acc) << ',' << format_metric(e.dr) << ',' << report.injected
            << ',' << report.train_size << ',' << join_warnings(report.warnings) << '\n';
      }
    }
  }
}

void write_summary_csv(const ExperimentResult& result, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "victim,round,dataset,repetitions,acc_mean,acc_std,dr_repetitions,dr_mean,dr_std,"
         "injected_mean\n";
  for (const auto& v : result.victims) {
    for (const auto& a : v.aggregate) {
      out << v.victim << ',' << a.round << ',' << a.dataset << ',' << a.samples << ','
          << format_double(a.acc_mean) << ',' << format_double(a.acc_std) << ','
          << a.dr_samples << ',' << format_metric(a.dr_mean) << ','
          << format_metric(a.dr_std) << ',' << format_double(a.injected_mean) << '\n';
    }
  }
}

void write_sweep_csv(const std::vector<EtaResult>& sweep, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "eta,victim,round,dataset,acc_mean,acc_std,dr_mean,dr_std\n";
  for (const auto& s : sweep) {
    for (const auto& v : s.result.victims) {
      for (const auto& a : v.aggregate) {
        out << format_double(s.eta) << ',' << v.victim << ',' << a.round << ',' << a.dataset
            << ',' << format_double(a.acc_mean) << ',' << format_double(a.acc_std) << ','
            << format_metric(a.dr_mean) << ',' << format_metric(a.dr_std) << '\n';
      }
    }
  }
}

void write_baseline_csv(const std::vector<MethodResult>& methods,
                        const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "victim,round,dataset";
  for (const auto& m : methods) out << ",dr_" << to_string(m.method);
  out << '\n';
  if (methods.empty()) return;
  const auto& first = methods.front().result;
  for (std::size_t v = 0; v < first.victims.size(); ++v) {
    for (std::size_t k = 0; k < first.victims[v].aggregate.size(); ++k) {
      const auto& a = first.victims[v].aggregate[k];
      out << first.victims[v].victim << ',' << a.round << ',' << a.dataset;
      for (const auto& m : methods) {
        const auto& agg = m.result.victims[v].aggregate;
        out << ',' << (k < agg.size() ? format_metric(agg[k].dr_mean) : "NA");
      }
      out << '\n';
    }
  }
}

}  // namespace bebp
