#ifndef BEBP_ATTACK_HPP
#define BEBP_ATTACK_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bebp/data.hpp"
#include "bebp/geometry.hpp"
#include "bebp/metrics.hpp"
#include "bebp/victims.hpp"

namespace bebp {

enum class BudgetMode { kPerRound, kCumulative };
enum class PoisonMethod { kBebp, kBasic, kRandom };

std::string_view to_string(BudgetMode mode);
std::string_view to_string(PoisonMethod method);
BudgetMode parse_budget_mode(std::string_view text);
PoisonMethod parse_poison_method(std::string_view text);

struct AttackConfig {
  double eta = 0.07;           // poisoning ratio
  std::size_t max_iters = 20;  // shift iterations per edge point
  double step = 0.05;          // initial shift step
  double epsilon = 0.0;        // boundary-witness distance; <= 0 means `step`
  std::size_t batch_size = 0;  // 0 means max(50, |normal| / 10)
  std::size_t rounds = 15;
  std::size_t epd_k = 10;
  double epd_tau = 0.5;
  std::uint64_t seed = 0;
  BudgetMode budget_mode = BudgetMode::kPerRound;
  PoisonMethod method = PoisonMethod::kBebp;
  std::size_t random_candidate_factor = 100;

  double effective_epsilon() const { return epsilon > 0.0 ? epsilon : step; }
  std::size_t effective_batch_size(std::size_t normal_count) const;
  EdgeDetectOptions epd() const { return {epd_k, epd_tau}; }
  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct ShiftStep {
  Vector position;  // x_a^i
  double step;      // lambda_i
  int direction;    // +1 after a Normal answer, -1 after Abnormal
  Label label;      // oracle answer at position
};

struct ShiftTrace {
  EdgePattern origin;
  std::vector<ShiftStep> steps;
};

struct BpdResult {
  std::vector<Vector> boundary;  // distinct, in discovery order
  ShiftTrace trace;
};

// Walks an edge point outward along its normal, stepping forward while the
// oracle answers Normal and stepping back with a third of the step after an
// Abnormal answer. A Normal position is kept when the probe
// position + epsilon * normal is Abnormal.
BpdResult bpd(const EdgePattern& edge, const LabelOracle& oracle, std::size_t max_iters,
              double step, double epsilon);

inline constexpr std::size_t kNoSource = std::numeric_limits<std::size_t>::max();

struct AdversarialBatch {
  std::vector<Vector> samples;
  // Per sample: unit normal of the originating edge pattern (empty for the
  // baselines) and index into the normal point set (kNoSource if none).
  std::vector<Vector> directions;
  std::vector<std::size_t> source_index;
  std::size_t round = 0;
  std::string method = "bebp";

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  void keep(const std::vector<std::size_t>& indices);
};

// Batch-EPD boundary patterns: floor(|normal| / L) independent random draws of
// L points, edge detection inside each draw, then BPD from every edge point.
// The union is deduplicated by exact coordinates.
AdversarialBatch bebp(const PointSet& train_normal, const LabelOracle& oracle,
                      const AttackConfig& cfg, std::uint64_t seed);

// Largest integer strictly below eta * train_size.
std::size_t budget_cap(double eta, std::size_t train_size);

AdversarialBatch enforce_budget(AdversarialBatch batch, double eta,
                                std::size_t train_size, std::uint64_t seed);
AdversarialBatch enforce_cap(AdversarialBatch batch, std::size_t cap, std::uint64_t seed);

// n uniform draws (with replacement) from the Normal training rows.
AdversarialBatch baseline_basic(const Dataset& train, std::size_t n, std::uint64_t seed);

// Uniform vectors in [0,1]^d kept when the oracle says Normal, until n are kept
// or candidate_factor * n candidates are spent; then n Normal training rows
// are appended. Empty if nothing was kept.
AdversarialBatch baseline_random(const Dataset& train, const LabelOracle& oracle,
                                 std::size_t n, std::size_t d, std::uint64_t seed,
                                 std::size_t candidate_factor = 100);

struct RoundOutcome {
  FittedModel model;
  RoundReport report;
  AdversarialBatch batch;  // injected before fitting this round's model
  std::size_t budget_cap = 0;
  std::size_t train_size_before = 0;
};

struct ChronicResult {
  std::vector<RoundOutcome> rounds;  // rounds[0] is the clean model
  Dataset final_train;
};

using RoundObserver = std::function<void(const RoundOutcome&, const Dataset& train)>;

// Multi-round poisoning: fit M_0, then per round generate a batch against the
// current model's labels, cap it, append it as Normal samples, refit, and
// evaluate.
ChronicResult chronic_attack(const Dataset& train0, const VictimSpec& spec,
                             const AttackConfig& cfg,
                             const std::vector<NamedDataset>& eval_sets,
                             const RoundObserver& observer = {});

void write_batch_csv(const std::vector<AdversarialBatch>& batches,
                     const std::vector<std::string>& feature_names,
                     const std::filesystem::path& path);

}  // namespace bebp

#endif  // BEBP_ATTACK_HPP
