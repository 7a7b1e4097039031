#include "bebp/victims.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numbers>
#include <unordered_map>

#include "bebp/random.hpp"

namespace bebp {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::kGaussianNB: return "gaussian_nb";
    case Family::kLogReg: return "logreg";
    case Family::kSvm: return "svm";
    case Family::kLssvm: return "lssvm";
  }
  return "?";
}

std::string_view to_string(KernelType kernel) {
  switch (kernel) {
    case KernelType::kLinear: return "linear";
    case KernelType::kRbf: return "rbf";
    case KernelType::kPoly: return "poly";
    case KernelType::kSigmoid: return "sigmoid";
  }
  return "?";
}

KernelType parse_kernel(std::string_view name) {
  if (name == "linear") return KernelType::kLinear;
  if (name == "rbf") return KernelType::kRbf;
  if (name == "poly") return KernelType::kPoly;
  if (name == "sigmoid") return KernelType::kSigmoid;
  throw ConfigError("unknown kernel '" + std::string(name) + "'");
}

double Kernel::operator()(ConstRow x, ConstRow z) const {
  switch (type) {
    case KernelType::kLinear: return dot(x, z);
    case KernelType::kRbf: return std::exp(-gamma * squared_distance(x, z));
    case KernelType::kPoly: return std::pow(gamma * dot(x, z) + coef0, degree);
    case KernelType::kSigmoid: return std::tanh(gamma * dot(x, z) + coef0);
  }
  return 0.0;
}

VictimSpec VictimSpec::named(std::string_view name) {
  VictimSpec spec;
  spec.name = std::string(name);
  if (name == "nb") {
    spec.family = Family::kGaussianNB;
  } else if (name == "lr") {
    spec.family = Family::kLogReg;
  } else if (name.starts_with("svm-")) {
    spec.family = Family::kSvm;
    spec.kernel.type = parse_kernel(name.substr(4));
  } else if (name == "lssvm") {
    spec.family = Family::kLssvm;
    spec.kernel.type = KernelType::kRbf;
    spec.mi_features = 18;
  } else {
    throw ConfigError("unknown victim '" + std::string(name) + "'");
  }
  return spec;
}

std::vector<std::string> VictimSpec::standard_names() {
  return {"nb", "lr", "svm-sigmoid", "svm-poly", "svm-rbf", "svm-linear"};
}

void Model::check_dim(ConstRow x) const {
  if (x.size() != dim()) {
    throw SchemaError("model expects " + std::to_string(dim()) + " features, got " +
                      std::to_string(x.size()));
  }
}

// ---------------------------------------------------------------- Gaussian NB

GaussianNbModel::GaussianNbModel(std::array<double, 2> log_prior,
                                 std::array<Vector, 2> mean, std::array<Vector, 2> var)
    : log_prior_(log_prior), mean_(std::move(mean)), var_(std::move(var)) {
  for (int c = 0; c < 2; ++c) {
    double s = 0.0;
    for (double v : var_[c]) s += std::log(2.0 * std::numbers::pi * v);
    log_norm_[c] = -0.5 * s;
  }
}

double GaussianNbModel::decision_value(ConstRow x) const {
  check_dim(x);
  double joint[2];
  for (int c = 0; c < 2; ++c) {
    double q = 0.0;
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double diff = x[f] - mean_[c][f];
      q += diff * diff / var_[c][f];
    }
    joint[c] = log_prior_[c] + log_norm_[c] - 0.5 * q;
  }
  return joint[1] - joint[0];
}

namespace {

void require_two_classes(const Dataset& train) {
  if (train.empty()) throw DegenerateError("cannot train on an empty dataset");
  train.validate();
  if (train.count(Label::kNormal) == 0 || train.count(Label::kAbnormal) == 0) {
    throw DegenerateError("training data contains a single class");
  }
}

double sign_of(Label label) { return label == Label::kAbnormal ? 1.0 : -1.0; }

FittedModel fit_gaussian_nb(const VictimSpec& spec, const Dataset& train) {
  const std::size_t d = train.dim();
  const double n = static_cast<double>(train.size());
  std::array<double, 2> count{0.0, 0.0};
  std::array<Vector, 2> mean{Vector(d, 0.0), Vector(d, 0.0)};
  std::array<Vector, 2> var{Vector(d, 0.0), Vector(d, 0.0)};
  Vector all_mean(d, 0.0), all_var(d, 0.0);
  for (const auto& s : train.samples) {
    const int c = s.label == Label::kAbnormal ? 1 : 0;
    count[c] += 1.0;
    for (std::size_t f = 0; f < d; ++f) {
      mean[c][f] += s.features[f];
      all_mean[f] += s.features[f];
    }
  }
  for (int c = 0; c < 2; ++c) {
    for (double& m : mean[c]) m /= count[c];
  }
  for (double& m : all_mean) m /= n;
  for (const auto& s : train.samples) {
    const int c = s.label == Label::kAbnormal ? 1 : 0;
    for (std::size_t f = 0; f < d; ++f) {
      const double dc = s.features[f] - mean[c][f];
      const double da = s.features[f] - all_mean[f];
      var[c][f] += dc * dc;
      all_var[f] += da * da;
    }
  }
  double max_var = 0.0;
  for (double v : all_var) max_var = std::max(max_var, v / n);
  double epsilon = spec.nb_var_smoothing * max_var;
  if (!(epsilon > 0.0)) epsilon = std::numeric_limits<double>::min();
  for (int c = 0; c < 2; ++c) {
    for (double& v : var[c]) v = v / count[c] + epsilon;
  }
  return std::make_shared<GaussianNbModel>(
      std::array<double, 2>{std::log(count[0] / n), std::log(count[1] / n)},
      std::move(mean), std::move(var));
}

}  // namespace

// ------------------------------------------------------- logistic regression

double LinearModel::decision_value(ConstRow x) const {
  check_dim(x);
  return dot(weights_, x) + bias_;
}

LogisticObjective::LogisticObjective(const Dataset& train, double c)
    : dim_(train.dim()), c_(c) {
  x_.reserve(train.size());
  y_.reserve(train.size());
  for (const auto& s : train.samples) {
    x_.push_back(s.features);
    y_.push_back(sign_of(s.label));
  }
}

namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

double LogisticObjective::value(const Vector& params) const {
  const double n = static_cast<double>(x_.size());
  const ConstRow w(params.data(), dim_);
  const double b = params[dim_];
  double loss = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    loss += softplus(-y_[i] * (dot(w, x_[i]) + b));
  }
  return loss / n + dot(w, w) / (2.0 * c_ * n);
}

Vector LogisticObjective::gradient(const Vector& params) const {
  const double n = static_cast<double>(x_.size());
  const ConstRow w(params.data(), dim_);
  const double b = params[dim_];
  Vector g(dim_ + 1, 0.0);
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double coeff = -y_[i] * logistic(-y_[i] * (dot(w, x_[i]) + b));
    for (std::size_t f = 0; f < dim_; ++f) g[f] += coeff * x_[i][f];
    g[dim_] += coeff;
  }
  for (std::size_t f = 0; f < dim_; ++f) g[f] = g[f] / n + w[f] / (c_ * n);
  g[dim_] /= n;
  return g;
}

// Newton steps with Armijo backtracking. The problem is at most ~130
// parameters, so the dense Hessian is cheap and the gradient-norm target is
// reached in a handful of iterations.
FittedModel fit_logreg(const VictimSpec& spec, const Dataset& train) {
  require_two_classes(train);
  const LogisticObjective obj(train, spec.lr_c);
  const std::size_t p = obj.param_count();
  const std::size_t d = p - 1;
  const double n = static_cast<double>(train.size());
  Vector params(p, 0.0);
  double value = obj.value(params);
  bool converged = false;
  for (std::size_t iter = 0; iter < spec.lr_max_iter; ++iter) {
    const Vector grad = obj.gradient(params);
    if (norm2(grad) <= spec.lr_tol) {
      converged = true;
      break;
    }
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                                 static_cast<Eigen::Index>(p));
    Eigen::VectorXd xi(static_cast<Eigen::Index>(p));
    const ConstRow w(params.data(), d);
    for (std::size_t i = 0; i < obj.x_.size(); ++i) {
      const double s = logistic(dot(w, obj.x_[i]) + params[d]);
      const double weight = s * (1.0 - s) / n;
      for (std::size_t f = 0; f < d; ++f) xi[static_cast<Eigen::Index>(f)] = obj.x_[i][f];
      xi[static_cast<Eigen::Index>(d)] = 1.0;
      hess.selfadjointView<Eigen::Lower>().rankUpdate(xi, weight);
    }
    hess = hess.selfadjointView<Eigen::Lower>();
    for (std::size_t f = 0; f < d; ++f) {
      hess(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(f)) += 1.0 / (spec.lr_c * n);
    }
    // The intercept is unregularized; a tiny ridge keeps the solve defined
    // when the data is (nearly) separable.
    hess(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) += 1e-12;
    const Eigen::Map<const Eigen::VectorXd> g(grad.data(), static_cast<Eigen::Index>(p));
    const Eigen::VectorXd step = hess.ldlt().solve(-g);
    double slope = g.dot(step);
    Eigen::VectorXd dir = step;
    if (!(slope < 0.0)) {
      dir = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    Vector trial(p);
    double trial_value = value;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t k = 0; k < p; ++k) {
        trial[k] = params[k] + t * dir[static_cast<Eigen::Index>(k)];
      }
      trial_value = obj.value(trial);
      if (trial_value <= value + 1e-4 * t * slope) break;
      t *= 0.5;
    }
    if (!(trial_value < value)) {
      // No further decrease is representable; check the gradient once more.
      converged = norm2(obj.gradient(params)) <= spec.lr_tol;
      break;
    }
    params = trial;
    value = trial_value;
  }
  if (!converged && norm2(obj.gradient(params)) <= spec.lr_tol) converged = true;
  Vector weights(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d));
  auto model = std::make_shared<LinearModel>(std::move(weights), params[d]);
  if (!converged) model->set_convergence(false, "logreg: iteration cap reached");
  return model;
}

// ------------------------------------------------------------------ kernels

KernelModel::KernelModel(Family family, Kernel kernel, std::size_t input_dim,
                         std::vector<std::size_t> feature_mask,
                         std::vector<Vector> support, Vector coef, double bias)
    : family_(family),
      kernel_(kernel),
      input_dim_(input_dim),
      mask_(std::move(feature_mask)),
      support_(std::move(support)),
      coef_(std::move(coef)),
      bias_(bias) {
  if (support_.size() != coef_.size()) {
    throw SchemaError("KernelModel: support/coef size mismatch");
  }
}

double KernelModel::decision_value(ConstRow x) const {
  check_dim(x);
  Vector projected;
  ConstRow input = x;
  if (!mask_.empty()) {
    projected.reserve(mask_.size());
    for (std::size_t f : mask_) projected.push_back(x[f]);
    input = projected;
  }
  double sum = bias_;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    sum += coef_[i] * kernel_(support_[i], input);
  }
  return sum;
}

namespace {

Kernel resolve_gamma(Kernel kernel, std::size_t d) {
  if (!(kernel.gamma > 0.0)) kernel.gamma = 1.0 / static_cast<double>(d);
  return kernel;
}

// LRU cache of signed kernel rows Q_i[j] = y_i y_j k(x_i, x_j).
class KernelRowCache {
 public:
  KernelRowCache(const std::vector<Vector>& x, const std::vector<double>& y,
                 const Kernel& kernel, std::size_t budget_bytes)
      : x_(x), y_(y), kernel_(kernel) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.size() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  const Vector& row(std::size_t i) {
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    Vector r;
    if (lru_.size() >= capacity_) {
      r = std::move(lru_.back().second);
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    r.resize(x_.size());
    for (std::size_t j = 0; j < x_.size(); ++j) {
      r[j] = y_[i] * y_[j] * kernel_(x_[i], x_[j]);
    }
    lru_.emplace_front(i, std::move(r));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  const std::vector<Vector>& x_;
  const std::vector<double>& y_;
  Kernel kernel_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, Vector>> lru_;
  std::unordered_map<std::size_t, std::list<std::pair<std::size_t, Vector>>::iterator>
      index_;
};

}  // namespace

SvmDualSolution solve_svm_dual(const Dataset& train, const VictimSpec& spec) {
  require_two_classes(train);
  const std::size_t n = train.size();
  const double c = spec.svm_c;
  const double eps = spec.svm_tol;
  constexpr double kTau = 1e-12;

  SvmDualSolution sol;
  sol.kernel = resolve_gamma(spec.kernel, train.dim());
  std::vector<Vector> x;
  std::vector<double> y;
  x.reserve(n);
  y.reserve(n);
  for (const auto& s : train.samples) {
    x.push_back(s.features);
    y.push_back(sign_of(s.label));
  }
  Vector diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = sol.kernel(x[i], x[i]);

  KernelRowCache cache(x, y, sol.kernel, spec.svm_cache_mb << 20);
  Vector& alpha = sol.alpha;
  alpha.assign(n, 0.0);
  Vector grad(n, -1.0);
  const std::size_t max_iter = std::max<std::size_t>(spec.svm_max_passes * n, 1000);

  auto is_upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto is_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // Working set selection (second order, Fan et al.).
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!is_upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i = t;
        }
      } else if (!is_lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    if (i == n) {
      sol.converged = true;
      break;
    }
    const Vector& qi = cache.row(i);
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!is_lower(t)) {
          const double grad_diff = gmax + grad[t];
          gmax2 = std::max(gmax2, grad[t]);
          if (grad_diff > 0.0) {
            double quad = diag[i] + diag[t] - 2.0 * y[i] * qi[t];
            if (quad <= 0.0) quad = kTau;
            const double obj_diff = -(grad_diff * grad_diff) / quad;
            if (obj_diff <= best_obj) {
              best_obj = obj_diff;
              j = t;
            }
          }
        }
      } else if (!is_upper(t)) {
        const double grad_diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (grad_diff > 0.0) {
          double quad = diag[i] + diag[t] + 2.0 * y[i] * qi[t];
          if (quad <= 0.0) quad = kTau;
          const double obj_diff = -(grad_diff * grad_diff) / quad;
          if (obj_diff <= best_obj) {
            best_obj = obj_diff;
            j = t;
          }
        }
      }
    }
    if (gmax + gmax2 < eps || j == n) {
      sol.converged = true;
      break;
    }
    // `qi` may be evicted by fetching row j; copy what is needed first.
    const double qij = qi[j];
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = diag[i] + diag[j] + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    {
      const Vector& row_i = cache.row(i);
      for (std::size_t t = 0; t < n; ++t) grad[t] += row_i[t] * dai;
    }
    {
      const Vector& row_j = cache.row(j);
      for (std::size_t t = 0; t < n; ++t) grad[t] += row_j[t] * daj;
    }
  }
  sol.iterations = iter;

  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (is_upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (is_lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  sol.bias = -rho;
  return sol;
}

double kkt_satisfaction(const SvmDualSolution& solution, const Dataset& train, double c,
                        double tol) {
  const std::size_t n = train.size();
  if (n == 0 || solution.alpha.size() != n) {
    throw SizeError("kkt_satisfaction: solution does not match training data");
  }
  std::size_t ok = 0;
  for (std::size_t t = 0; t < n; ++t) {
    double f = solution.bias;
    for (std::size_t i = 0; i < n; ++i) {
      if (solution.alpha[i] == 0.0) continue;
      f += solution.alpha[i] * sign_of(train.samples[i].label) *
           solution.kernel(train.samples[i].features, train.samples[t].features);
    }
    const double margin = sign_of(train.samples[t].label) * f;
    const double a = solution.alpha[t];
    bool satisfied;
    if (a <= 0.0) satisfied = margin >= 1.0 - tol;
    else if (a >= c) satisfied = margin <= 1.0 + tol;
    else satisfied = std::abs(margin - 1.0) <= tol;
    if (satisfied) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(n);
}

namespace {

FittedModel fit_svm(const VictimSpec& spec, const Dataset& train) {
  const SvmDualSolution sol = solve_svm_dual(train, spec);
  std::vector<Vector> support;
  Vector coef;
  for (std::size_t i = 0; i < sol.alpha.size(); ++i) {
    if (sol.alpha[i] > 0.0) {
      support.push_back(train.samples[i].features);
      coef.push_back(sol.alpha[i] * sign_of(train.samples[i].label));
    }
  }
  auto model = std::make_shared<KernelModel>(Family::kSvm, sol.kernel, train.dim(),
                                             std::vector<std::size_t>{},
                                             std::move(support), std::move(coef),
                                             sol.bias);
  if (!sol.converged) {
    model->set_convergence(false, "svm: iteration cap reached after " +
                                      std::to_string(sol.iterations) + " iterations");
  }
  return model;
}

FittedModel fit_lssvm(const VictimSpec& spec, const Dataset& full, std::uint64_t seed) {
  const Dataset* train = &full;
  Dataset subsampled;
  if (full.size() > spec.lssvm_max_rows) {
    Rng rng(seed);
    auto idx = rng.sample_without_replacement(full.size(), spec.lssvm_max_rows);
    std::sort(idx.begin(), idx.end());
    subsampled.schema = full.schema;
    subsampled.provenance = full.provenance;
    for (auto i : idx) subsampled.samples.push_back(full.samples[i]);
    require_two_classes(subsampled);
    train = &subsampled;
  }
  std::vector<std::size_t> mask;
  if (spec.mi_features > 0 && spec.mi_features < full.dim()) {
    mask = mi_feature_select(*train, spec.mi_features, spec.mi_bins);
  }
  const std::size_t n = train->size();
  const std::size_t d_eff = mask.empty() ? full.dim() : mask.size();
  const Kernel kernel = resolve_gamma(spec.kernel, d_eff);

  std::vector<Vector> x(n);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = train->samples[i];
    if (mask.empty()) {
      x[i] = s.features;
    } else {
      for (std::size_t f : mask) x[i].push_back(s.features[f]);
    }
    y[static_cast<Eigen::Index>(i)] = sign_of(s.label);
  }
  // H = Omega + I/gamma with Omega_ij = y_i y_j k(x_i, x_j). Eliminating the
  // bias from the bordered system leaves two solves against H.
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd h(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = y[i] * y[j] * kernel(x[static_cast<std::size_t>(i)],
                                            x[static_cast<std::size_t>(j)]);
      h(i, j) = v;
      h(j, i) = v;
    }
    h(i, i) += 1.0 / spec.lssvm_gamma;
  }
  // Blocked Cholesky when H is positive definite (any PSD kernel), LDLT for
  // indefinite kernels such as sigmoid.
  Eigen::MatrixXd rhs(ni, 2);
  rhs.col(0) = y;
  rhs.col(1).setOnes();
  Eigen::MatrixXd sol;
  if (const Eigen::LLT<Eigen::MatrixXd> llt(h); llt.info() == Eigen::Success) {
    sol = llt.solve(rhs);
  } else {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() != Eigen::Success) throw DegenerateError("lssvm: factorization failed");
    sol = ldlt.solve(rhs);
  }
  const Eigen::VectorXd eta = sol.col(0);
  const Eigen::VectorXd nu = sol.col(1);
  const double s = y.dot(eta);
  const double bias = y.dot(nu) / s;
  const Eigen::VectorXd alpha = nu - bias * eta;

  Vector coef(n);
  for (std::size_t i = 0; i < n; ++i) {
    coef[i] = alpha[static_cast<Eigen::Index>(i)] * y[static_cast<Eigen::Index>(i)];
  }
  return std::make_shared<KernelModel>(Family::kLssvm, kernel, full.dim(), std::move(mask),
                                       std::move(x), std::move(coef), bias);
}

}  // namespace

FittedModel fit(const VictimSpec& spec, const Dataset& train, std::uint64_t seed) {
  require_two_classes(train);
  switch (spec.family) {
    case Family::kGaussianNB: return fit_gaussian_nb(spec, train);
    case Family::kLogReg: return fit_logreg(spec, train);
    case Family::kSvm: return fit_svm(spec, train);
    case Family::kLssvm: return fit_lssvm(spec, train, seed);
  }
  throw ConfigError("fit: unknown family");
}

// ------------------------------------------------------- feature selection

std::vector<int> discretize(const Dataset& data, std::size_t feature, std::size_t bins) {
  std::vector<int> out;
  out.reserve(data.size());
  const double b = static_cast<double>(bins);
  for (const auto& s : data.samples) {
    const double v = std::clamp(s.features[feature], 0.0, 1.0);
    out.push_back(static_cast<int>(std::min(b - 1.0, std::floor(v * b))));
  }
  return out;
}

double mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw SizeError("mutual_information: inputs must be nonempty and equal length");
  }
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> pa, pb;
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
  }
  double mi = 0.0;
  for (const auto& [key, count] : joint) {
    const double pxy = count / n;
    mi += pxy * std::log(pxy * n * n / (pa[key.first] * pb[key.second]));
  }
  return std::max(0.0, mi);
}

std::vector<std::size_t> mi_feature_select(const Dataset& train, std::size_t q,
                                           std::size_t bins) {
  const std::size_t d = train.dim();
  if (q == 0 || q > d) {
    throw SizeError("mi_feature_select: need 0 < q <= d (q=" + std::to_string(q) +
                    ", d=" + std::to_string(d) + ")");
  }
  std::vector<std::vector<int>> disc(d);
  for (std::size_t f = 0; f < d; ++f) disc[f] = discretize(train, f, bins);
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const auto& s : train.samples) labels.push_back(s.label == Label::kAbnormal);

  Vector relevance(d);
  for (std::size_t f = 0; f < d; ++f) relevance[f] = mutual_information(disc[f], labels);
  Vector redundancy_sum(d, 0.0);
  std::vector<char> taken(d, 0);
  std::vector<std::size_t> selected;
  while (selected.size() < q) {
    std::size_t best = d;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < d; ++f) {
      if (taken[f]) continue;
      const double redundancy =
          selected.empty() ? 0.0 : redundancy_sum[f] / static_cast<double>(selected.size());
      const double score = relevance[f] - redundancy;
      if (score > best_score) {
        best_score = score;
        best = f;
      }
    }
    taken[best] = 1;
    selected.push_back(best);
    for (std::size_t f = 0; f < d; ++f) {
      if (!taken[f]) redundancy_sum[f] += mutual_information(disc[f], disc[best]);
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

// ------------------------------------------------------------------ oracle

LabelOracle::LabelOracle(FittedModel model)
    : counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (!model) throw Error("LabelOracle: null model");
  fn_ = [m = std::move(model)](ConstRow x) { return m->predict(x); };
}

LabelOracle::LabelOracle(QueryFn fn)
    : fn_(std::move(fn)), counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

}  // namespace bebp
