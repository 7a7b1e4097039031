#include <fstream>
#include <map>
#include <sstream>

#include "bebp/victims.hpp"
#include "strings.hpp"

namespace bebp {

// Flat "key = value" text. Arrays are space separated; every double is written
// in shortest round-trip form so a reloaded model predicts bit-identically.

namespace {

std::string join(const Vector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

Vector parse_vector(const std::string& text) {
  Vector out;
  for (const auto& w : split_whitespace(text)) out.push_back(parse_double(w));
  return out;
}

class Reader {
 public:
  explicit Reader(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto body = trim(line);
      if (body.empty() || body.front() == '#') continue;
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw ParseError("model file line " + std::to_string(line_no) + ": missing '='");
      }
      values_[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
    }
  }

  const std::string& get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ParseError("model file: missing key '" + key + "'");
    return it->second;
  }
  double number(const std::string& key) const { return parse_double(get(key)); }
  std::size_t count(const std::string& key) const { return parse_size(get(key), key); }
  Vector vector(const std::string& key) const { return parse_vector(get(key)); }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace

void save_model(const Model& model, std::ostream& out) {
  out << "family = " << to_string(model.family()) << '\n';
  out << "dim = " << model.dim() << '\n';
  out << "converged = " << (model.converged() ? "true" : "false") << '\n';
  if (const auto* nb = dynamic_cast<const GaussianNbModel*>(&model)) {
    out << "log_prior = " << format_double(nb->log_prior()[0]) << ' '
        << format_double(nb->log_prior()[1]) << '\n';
    for (int c = 0; c < 2; ++c) {
      out << "mean." << c << " = " << join(nb->mean()[c]) << '\n';
      out << "var." << c << " = " << join(nb->var()[c]) << '\n';
    }
  } else if (const auto* lin = dynamic_cast<const LinearModel*>(&model)) {
    out << "weights = " << join(lin->weights()) << '\n';
    out << "bias = " << format_double(lin->bias()) << '\n';
  } else if (const auto* km = dynamic_cast<const KernelModel*>(&model)) {
    const Kernel& k = km->kernel();
    out << "kernel = " << to_string(k.type) << '\n';
    out << "gamma = " << format_double(k.gamma) << '\n';
    out << "degree = " << format_double(k.degree) << '\n';
    out << "coef0 = " << format_double(k.coef0) << '\n';
    out << "bias = " << format_double(km->bias()) << '\n';
    out << "mask =";
    for (auto f : km->feature_mask()) out << ' ' << f;
    out << '\n';
    out << "support_count = " << km->support().size() << '\n';
    out << "coef = " << join(km->coef()) << '\n';
    for (std::size_t i = 0; i < km->support().size(); ++i) {
      out << "sv." << i << " = " << join(km->support()[i]) << '\n';
    }
  } else {
    throw Error("save_model: unsupported model type");
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  save_model(model, out);
}

FittedModel load_model(std::istream& in) {
  const Reader r(in);
  const std::string& family = r.get("family");
  const std::size_t dim = r.count("dim");
  std::shared_ptr<Model> model;
  if (family == "gaussian_nb") {
    const Vector prior = r.vector("log_prior");
    if (prior.size() != 2) throw ParseError("model file: log_prior needs 2 values");
    model = std::make_shared<GaussianNbModel>(
        std::array<double, 2>{prior[0], prior[1]},
        std::array<Vector, 2>{r.vector("mean.0"), r.vector("mean.1")},
        std::array<Vector, 2>{r.vector("var.0"), r.vector("var.1")});
  } else if (family == "logreg") {
    model = std::make_shared<LinearModel>(r.vector("weights"), r.number("bias"));
  } else if (family == "svm" || family == "lssvm") {
    Kernel k;
    k.type = parse_kernel(r.get("kernel"));
    k.gamma = r.number("gamma");
    k.degree = r.number("degree");
    k.coef0 = r.number("coef0");
    std::vector<std::size_t> mask;
    for (const auto& w : split_whitespace(r.get("mask"))) mask.push_back(parse_size(w, "mask"));
    const std::size_t count = r.count("support_count");
    std::vector<Vector> support;
    support.reserve(count);
    for (std::size_t i = 0; i < count; ++i) support.push_back(r.vector("sv." + std::to_string(i)));
    model = std::make_shared<KernelModel>(
        family == "svm" ? Family::kSvm : Family::kLssvm, k, dim, std::move(mask),
        std::move(support), r.vector("coef"), r.number("bias"));
  } else {
    throw ParseError("model file: unknown family '" + family + "'");
  }
  if (model->dim() != dim) throw ParseError("model file: dim does not match parameters");
  if (!parse_bool(r.get("converged"), "converged")) {
    model->set_convergence(false, "loaded model was not converged");
  }
  return model;
}

FittedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace bebp
