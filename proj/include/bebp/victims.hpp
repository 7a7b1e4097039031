#ifndef BEBP_VICTIMS_HPP
#define BEBP_VICTIMS_HPP

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bebp/data.hpp"
#include "bebp/types.hpp"

namespace bebp {

enum class Family { kGaussianNB, kLogReg, kSvm, kLssvm };
enum class KernelType { kLinear, kRbf, kPoly, kSigmoid };

std::string_view to_string(Family family);
std::string_view to_string(KernelType kernel);
KernelType parse_kernel(std::string_view name);

struct Kernel {
  KernelType type = KernelType::kRbf;
  double gamma = 0.0;  // <= 0 means 1/d, resolved at fit time
  double degree = 3.0;
  double coef0 = 0.0;

  double operator()(ConstRow x, ConstRow z) const;
};

struct VictimSpec {
  Family family = Family::kSvm;
  Kernel kernel;
  std::string name;  // nb, lr, svm-<kernel>, lssvm

  double nb_var_smoothing = 1e-9;

  double lr_c = 1.0;
  double lr_tol = 1e-4;
  std::size_t lr_max_iter = 1000;

  double svm_c = 1.0;
  double svm_tol = 1e-3;
  std::size_t svm_max_passes = 200;
  std::size_t svm_cache_mb = 256;

  double lssvm_gamma = 1.0;
  std::size_t lssvm_max_rows = 8000;
  std::size_t mi_features = 0;  // 0 disables feature selection
  std::size_t mi_bins = 10;

  // nb, lr, svm-linear, svm-rbf, svm-poly, svm-sigmoid, lssvm (RBF with
  // 18-feature MI selection).
  static VictimSpec named(std::string_view name);
  // The six models of the comparison study.
  static std::vector<std::string> standard_names();
};

// Fitted binary classifier. Decision values are positive for Abnormal;
// predict() maps exactly 0 to Normal.
class Model {
 public:
  virtual ~Model() = default;

  virtual double decision_value(ConstRow x) const = 0;
  virtual std::size_t dim() const = 0;
  virtual Family family() const = 0;

  Label predict(ConstRow x) const {
    return decision_value(x) > 0.0 ? Label::kAbnormal : Label::kNormal;
  }

  bool converged() const { return converged_; }
  const std::string& warning() const { return warning_; }
  void set_convergence(bool converged, std::string warning) {
    converged_ = converged;
    warning_ = std::move(warning);
  }

 protected:
  void check_dim(ConstRow x) const;

 private:
  bool converged_ = true;
  std::string warning_;
};

using FittedModel = std::shared_ptr<const Model>;

class GaussianNbModel final : public Model {
 public:
  GaussianNbModel(std::array<double, 2> log_prior, std::array<Vector, 2> mean,
                  std::array<Vector, 2> var);

  double decision_value(ConstRow x) const override;
  std::size_t dim() const override { return mean_[0].size(); }
  Family family() const override { return Family::kGaussianNB; }

  // Index 0 = Normal, 1 = Abnormal.
  const std::array<double, 2>& log_prior() const { return log_prior_; }
  const std::array<Vector, 2>& mean() const { return mean_; }
  const std::array<Vector, 2>& var() const { return var_; }

 private:
  std::array<double, 2> log_prior_;
  std::array<Vector, 2> mean_;
  std::array<Vector, 2> var_;
  std::array<double, 2> log_norm_;
};

class LinearModel final : public Model {
 public:
  LinearModel(Vector weights, double bias) : weights_(std::move(weights)), bias_(bias) {}

  double decision_value(ConstRow x) const override;
  std::size_t dim() const override { return weights_.size(); }
  Family family() const override { return Family::kLogReg; }

  const Vector& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  Vector weights_;
  double bias_;
};

// Kernel expansion sum_i coef_i k(sv_i, x) + bias, optionally over a subset of
// the input features. Used by both SVM and LSSVM.
class KernelModel final : public Model {
 public:
  KernelModel(Family family, Kernel kernel, std::size_t input_dim,
              std::vector<std::size_t> feature_mask, std::vector<Vector> support,
              Vector coef, double bias);

  double decision_value(ConstRow x) const override;
  std::size_t dim() const override { return input_dim_; }
  Family family() const override { return family_; }

  const Kernel& kernel() const { return kernel_; }
  const std::vector<std::size_t>& feature_mask() const { return mask_; }
  const std::vector<Vector>& support() const { return support_; }
  const Vector& coef() const { return coef_; }
  double bias() const { return bias_; }

 private:
  Family family_;
  Kernel kernel_;
  std::size_t input_dim_;
  std::vector<std::size_t> mask_;  // empty = all features
  std::vector<Vector> support_;
  Vector coef_;
  double bias_;
};

// Trains the victim. `seed` only matters where the family draws randomness
// (LSSVM row subsampling). Throws DegenerateError on single-class data.
FittedModel fit(const VictimSpec& spec, const Dataset& train, std::uint64_t seed = 0);

// Regularized logistic loss averaged over samples, over params = (w, b):
//   J = mean_i log(1 + exp(-y_i (w.x_i + b))) + |w|^2 / (2 C n)
// with y = +1 for Abnormal. The intercept is not penalized.
class LogisticObjective {
 public:
  LogisticObjective(const Dataset& train, double c);

  double value(const Vector& params) const;
  Vector gradient(const Vector& params) const;
  std::size_t param_count() const { return dim_ + 1; }

 private:
  friend FittedModel fit_logreg(const VictimSpec&, const Dataset&);
  std::vector<Vector> x_;
  std::vector<double> y_;
  std::size_t dim_;
  double c_;
};

FittedModel fit_logreg(const VictimSpec& spec, const Dataset& train);

struct SvmDualSolution {
  Vector alpha;  // one per training sample
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  Kernel kernel;  // gamma resolved
};

// SMO with second-order working set selection on the soft-margin dual.
SvmDualSolution solve_svm_dual(const Dataset& train, const VictimSpec& spec);

// Fraction of training points meeting the KKT conditions within tol.
double kkt_satisfaction(const SvmDualSolution& solution, const Dataset& train,
                        double c, double tol);

// Mutual information (nats) between two discretized variables.
double mutual_information(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> discretize(const Dataset& data, std::size_t feature, std::size_t bins);

// Greedy relevance-minus-redundancy selection of q features; returns the
// selected feature indices in ascending order.
std::vector<std::size_t> mi_feature_select(const Dataset& train, std::size_t q,
                                           std::size_t bins = 10);

// Black-box view of a classifier: labels only, with a query counter.
class LabelOracle {
 public:
  using QueryFn = std::function<Label(ConstRow)>;

  explicit LabelOracle(FittedModel model);
  explicit LabelOracle(QueryFn fn);

  Label query(ConstRow x) const {
    counter_->fetch_add(1, std::memory_order_relaxed);
    return fn_(x);
  }
  std::uint64_t queries() const { return counter_->load(std::memory_order_relaxed); }

 private:
  QueryFn fn_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

void save_model(const Model& model, const std::filesystem::path& path);
void save_model(const Model& model, std::ostream& out);
FittedModel load_model(const std::filesystem::path& path);
FittedModel load_model(std::istream& in);

}  // namespace bebp

#endif  // BEBP_VICTIMS_HPP
