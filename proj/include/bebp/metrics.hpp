#ifndef BEBP_METRICS_HPP
#define BEBP_METRICS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bebp/data.hpp"
#include "bebp/victims.hpp"

namespace bebp {

// Abnormal is the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(const Model& model, const Dataset& data);
ConfusionCounts tally(Label truth, Label predicted, ConfusionCounts counts);

double acc(const ConfusionCounts& c);
// Empty when there are no Abnormal samples (tp + fn == 0).
std::optional<double> dr(const ConfusionCounts& c);

struct NamedDataset {
  std::string name;
  Dataset data;
};

struct EvalEntry {
  std::string dataset;
  ConfusionCounts counts;
  double acc = 0.0;
  std::optional<double> dr;
};

struct RoundReport {
  std::size_t round = 0;
  std::vector<EvalEntry> evals;
  std::size_t injected = 0;
  std::size_t train_size = 0;  // after injection
  std::vector<std::string> warnings;
};

RoundReport evaluate_round(std::size_t round, const Model& model,
                           const std::vector<NamedDataset>& eval_sets);

}  // namespace bebp

#endif  // BEBP_METRICS_HPP
