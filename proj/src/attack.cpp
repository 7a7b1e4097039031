#include "bebp/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "bebp/random.hpp"

namespace bebp {

std::string_view to_string(BudgetMode mode) {
  return mode == BudgetMode::kPerRound ? "per-round" : "cumulative";
}

std::string_view to_string(PoisonMethod method) {
  switch (method) {
    case PoisonMethod::kBebp: return "bebp";
    case PoisonMethod::kBasic: return "basic";
    case PoisonMethod::kRandom: return "random";
  }
  return "?";
}

BudgetMode parse_budget_mode(std::string_view text) {
  if (text == "per-round") return BudgetMode::kPerRound;
  if (text == "cumulative") return BudgetMode::kCumulative;
  throw ConfigError("unknown budget mode '" + std::string(text) + "'");
}

PoisonMethod parse_poison_method(std::string_view text) {
  if (text == "bebp") return PoisonMethod::kBebp;
  if (text == "basic") return PoisonMethod::kBasic;
  if (text == "random") return PoisonMethod::kRandom;
  throw ConfigError("unknown poisoning method '" + std::string(text) + "'");
}

std::size_t AttackConfig::effective_batch_size(std::size_t normal_count) const {
  if (batch_size > 0) return batch_size;
  return std::min(normal_count, std::max<std::size_t>(50, normal_count / 10));
}

void AttackConfig::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("attack.eta must lie in (0, 1)");
  if (max_iters == 0) throw ConfigError("attack.max_iters must be positive");
  if (!(step > 0.0)) throw ConfigError("attack.step must be positive");
  if (epsilon < 0.0) throw ConfigError("attack.epsilon must be positive (0 = step)");
  if (epd_k == 0) throw ConfigError("attack.epd_k must be positive");
  if (!(epd_tau > 0.0 && epd_tau <= 1.0)) throw ConfigError("attack.epd_tau must lie in (0, 1]");
  if (random_candidate_factor == 0) {
    throw ConfigError("attack.random_candidate_factor must be positive");
  }
}

BpdResult bpd(const EdgePattern& edge, const LabelOracle& oracle, std::size_t max_iters,
              double step, double epsilon) {
  if (max_iters == 0) throw SizeError("bpd: max_iters must be >= 1");
  const Vector& normal = edge.normal;
  BpdResult out;
  out.trace.origin = edge;
  Vector x = edge.point;
  Vector probe(x.size());
  double shrink = 1.0;  // 3^j after j Abnormal answers
  std::set<Vector> seen;
  for (std::size_t i = 0; i < max_iters; ++i) {
    const double lambda = step / shrink;
    const Label label = oracle.query(x);
    if (label == Label::kNormal) {
      for (std::size_t f = 0; f < x.size(); ++f) probe[f] = x[f] + epsilon * normal[f];
      if (oracle.query(probe) == Label::kAbnormal && seen.insert(x).second) {
        out.boundary.push_back(x);
      }
      out.trace.steps.push_back({x, lambda, +1, label});
      for (std::size_t f = 0; f < x.size(); ++f) x[f] += lambda * normal[f];
    } else {
      out.trace.steps.push_back({x, lambda, -1, label});
      for (std::size_t f = 0; f < x.size(); ++f) x[f] -= lambda * normal[f];
      shrink *= 3.0;
    }
  }
  return out;
}

void AdversarialBatch::keep(const std::vector<std::size_t>& indices) {
  AdversarialBatch kept;
  for (std::size_t i : indices) {
    kept.samples.push_back(std::move(samples[i]));
    if (!directions.empty()) kept.directions.push_back(std::move(directions[i]));
    kept.source_index.push_back(source_index[i]);
  }
  samples = std::move(kept.samples);
  directions = std::move(kept.directions);
  source_index = std::move(kept.source_index);
}

AdversarialBatch bebp(const PointSet& train_normal, const LabelOracle& oracle,
                      const AttackConfig& cfg, std::uint64_t seed) {
  const std::size_t n = train_normal.size();
  const std::size_t batch = cfg.effective_batch_size(n);
  if (batch == 0 || n < batch) {
    throw SizeError("bebp: need at least " + std::to_string(batch) +
                    " normal training points, have " + std::to_string(n));
  }
  const std::size_t draws = n / batch;
  const double epsilon = cfg.effective_epsilon();
  AdversarialBatch out;
  std::set<Vector> seen;
  for (std::size_t it = 0; it < draws; ++it) {
    Rng rng(derive_seed(seed, it));
    const auto idx = rng.sample_without_replacement(n, batch);
    std::vector<Vector> pts;
    pts.reserve(batch);
    for (auto i : idx) pts.emplace_back(train_normal[i].begin(), train_normal[i].end());
    const PointSet subset(std::move(pts));
    for (const auto& edge : edge_detect(subset, cfg.epd())) {
      auto walked = bpd(edge, oracle, cfg.max_iters, cfg.step, epsilon);
      for (auto& p : walked.boundary) {
        if (!seen.insert(p).second) continue;
        out.samples.push_back(std::move(p));
        out.directions.push_back(edge.normal);
        out.source_index.push_back(idx[edge.source_index]);
      }
    }
  }
  return out;
}

std::size_t budget_cap(double eta, std::size_t train_size) {
  const double allowed = eta * static_cast<double>(train_size);
  if (!(allowed > 0.0)) return 0;
  const double nearest = std::nearbyint(allowed);
  // eta * n is often an integer that floating point lands a hair above
  // (0.07 * 100 = 7.000000000000001); the strict bound must still exclude it.
  if (std::abs(allowed - nearest) <= 1e-9 * std::max(1.0, allowed)) {
    return nearest >= 1.0 ? static_cast<std::size_t>(nearest) - 1 : 0;
  }
  return static_cast<std::size_t>(std::floor(allowed));
}

AdversarialBatch enforce_cap(AdversarialBatch batch, std::size_t cap, std::uint64_t seed) {
  if (batch.size() <= cap) return batch;
  Rng rng(seed);
  auto keep = rng.sample_without_replacement(batch.size(), cap);
  std::sort(keep.begin(), keep.end());
  batch.keep(keep);
  return batch;
}

AdversarialBatch enforce_budget(AdversarialBatch batch, double eta,
                                std::size_t train_size, std::uint64_t seed) {
  if (train_size == 0) throw SizeError("enforce_budget: empty training set");
  return enforce_cap(std::move(batch), budget_cap(eta, train_size), seed);
}

namespace {

std::vector<std::size_t> normal_rows(const Dataset& train) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.samples[i].label == Label::kNormal) rows.push_back(i);
  }
  return rows;
}

}  // namespace

AdversarialBatch baseline_basic(const Dataset& train, std::size_t n, std::uint64_t seed) {
  AdversarialBatch out;
  out.method = "basic";
  const auto rows = normal_rows(train);
  if (rows.empty() || n == 0) return out;
  Rng rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t row = rows[rng.index(rows.size())];
    out.samples.push_back(train.samples[row].features);
    out.source_index.push_back(row);
  }
  return out;
}

AdversarialBatch baseline_random(const Dataset& train, const LabelOracle& oracle,
                                 std::size_t n, std::size_t d, std::uint64_t seed,
                                 std::size_t candidate_factor) {
  AdversarialBatch out;
  out.method = "random";
  if (n == 0) return out;
  Rng rng(seed);
  const std::size_t max_candidates = candidate_factor * n;
  Vector candidate(d);
  for (std::size_t c = 0; c < max_candidates && out.size() < n; ++c) {
    for (double& v : candidate) v = rng.uniform();
    if (oracle.query(candidate) == Label::kNormal) {
      out.samples.push_back(candidate);
      out.source_index.push_back(kNoSource);
    }
  }
  if (out.empty()) return out;
  const auto rows = normal_rows(train);
  if (rows.empty()) return out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t row = rows[rng.index(rows.size())];
    out.samples.push_back(train.samples[row].features);
    out.source_index.push_back(row);
  }
  return out;
}

ChronicResult chronic_attack(const Dataset& train0, const VictimSpec& spec,
                             const AttackConfig& cfg,
                             const std::vector<NamedDataset>& eval_sets,
                             const RoundObserver& observer) {
  cfg.validate();
  ChronicResult result;
  Dataset train = train0;
  // Stream layout per round i: 4i fit, 4i+1 generation, 4i+2 budget.
  auto stream = [&](std::size_t round, std::uint64_t slot) {
    return derive_seed(cfg.seed, 4 * round + slot);
  };

  FittedModel model = fit(spec, train, stream(0, 0));
  {
    RoundOutcome clean;
    clean.model = model;
    clean.report = evaluate_round(0, *model, eval_sets);
    clean.report.train_size = train.size();
    clean.train_size_before = train.size();
    if (!model->converged()) clean.report.warnings.push_back(model->warning());
    if (observer) observer(clean, train);
    result.rounds.push_back(std::move(clean));
  }

  const std::size_t cumulative_cap = budget_cap(cfg.eta, train0.size());
  std::size_t injected_total = 0;
  const std::string method(to_string(cfg.method));
  for (std::size_t r = 1; r <= cfg.rounds; ++r) {
    const LabelOracle oracle(model);
    RoundOutcome out;
    out.train_size_before = train.size();
    out.budget_cap = cfg.budget_mode == BudgetMode::kPerRound
                         ? budget_cap(cfg.eta, train.size())
                         : cumulative_cap - std::min(cumulative_cap, injected_total);
    std::vector<std::string> warnings;

    AdversarialBatch batch;
    switch (cfg.method) {
      case PoisonMethod::kBebp: {
        const PointSet normals = train.points_with_label(Label::kNormal);
        if (normals.size() > cfg.epd_k &&
            normals.size() >= cfg.effective_batch_size(normals.size())) {
          batch = bebp(normals, oracle, cfg, stream(r, 1));
        } else {
          warnings.push_back("too few normal samples for edge detection");
        }
        break;
      }
      case PoisonMethod::kBasic:
        batch = baseline_basic(train, out.budget_cap, stream(r, 1));
        break;
      case PoisonMethod::kRandom:
        // Both the random keeps and the appended normal rows count against
        // the budget.
        batch = baseline_random(train, oracle, out.budget_cap / 2, train.dim(),
                                stream(r, 1), cfg.random_candidate_factor);
        if (batch.empty() && out.budget_cap >= 2) {
          warnings.push_back("random candidates exhausted with no Normal answers");
        }
        break;
    }
    batch.method = method;
    batch.round = r;
    batch = enforce_cap(std::move(batch), out.budget_cap, stream(r, 2));
    injected_total += batch.size();

    if (batch.empty()) {
      warnings.push_back("no adversarial samples injected");
    } else {
      for (const auto& x : batch.samples) {
        train.samples.push_back({x, Label::kNormal, "adversarial", Origin::kAdversarial});
      }
      model = fit(spec, train, stream(r, 0));
    }
    if (!model->converged()) warnings.push_back(model->warning());

    out.model = model;
    out.report = evaluate_round(r, *model, eval_sets);
    out.report.injected = batch.size();
    out.report.train_size = train.size();
    out.report.warnings = std::move(warnings);
    out.batch = std::move(batch);
    if (observer) observer(out, train);
    result.rounds.push_back(std::move(out));
  }
  result.final_train = std::move(train);
  return result;
}

void write_batch_csv(const std::vector<AdversarialBatch>& batches,
                     const std::vector<std::string>& feature_names,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& name : feature_names) out << name << ',';
  out << "round,origin,method\n";
  for (const auto& batch : batches) {
    for (const auto& x : batch.samples) {
      for (double v : x) out << format_double(v) << ',';
      out << batch.round << ",adversarial," << batch.method << '\n';
    }
  }
}

}  // namespace bebp
