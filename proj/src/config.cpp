#include "bebp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "strings.hpp"

namespace bebp {

namespace {

struct KeyInfo {
  const char* key;
  const char* fallback;
};

// Section-qualified keys with their defaults. "" means unset.
constexpr KeyInfo kKeys[] = {
    {"dataset.source", "moons"},
    {"dataset.train_path", ""},
    {"dataset.test_path", ""},
    {"dataset.schema", ""},
    {"dataset.train_counts", ""},
    {"dataset.eval_counts", ""},
    {"dataset.moons_n", "100"},
    {"dataset.moons_noise", "0.2"},
    {"dataset.moons_eval_n", "1000"},
    {"dataset.normalize", "true"},
    {"victims.models", "nb,lr,svm-sigmoid,svm-poly,svm-rbf,svm-linear"},
    {"victims.gamma", "auto"},
    {"victims.degree", "3"},
    {"victims.coef0", "0"},
    {"victims.svm_c", "1"},
    {"victims.svm_tol", "0.001"},
    {"victims.svm_max_passes", "200"},
    {"victims.svm_cache_mb", "256"},
    {"victims.lr_c", "1"},
    {"victims.lr_tol", "0.0001"},
    {"victims.lr_max_iter", "1000"},
    {"victims.nb_var_smoothing", "1e-09"},
    {"victims.lssvm_gamma", "1"},
    {"victims.lssvm_max_rows", "8000"},
    {"victims.mi_features", "18"},
    {"victims.mi_bins", "10"},
    {"attack.eta", "0.07"},
    {"attack.max_iters", "20"},
    {"attack.step", "0.05"},
    {"attack.epsilon", "auto"},
    {"attack.batch_size", "auto"},
    {"attack.epd_k", "10"},
    {"attack.epd_tau", "0.5"},
    {"attack.budget_mode", "per-round"},
    {"attack.method", "bebp"},
    {"attack.random_candidate_factor", "100"},
    {"experiment.rounds", "15"},
    {"experiment.repetitions", "10"},
    {"experiment.seed", "1"},
    {"experiment.eta_list", "0.01,0.04,0.07,0.1"},
    {"experiment.raster_resolution", "200"},
    {"output.dir", ""},
    // Written by runs into their manifest; accepted so a manifest can be
    // replayed as a config.
    {"manifest.command", ""},
    {"manifest.status", ""},
    {"manifest.repetition_seeds", ""},
    {"manifest.error", ""},
};

bool known_key(const std::string& key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return true;
  }
  return false;
}

void set_value(std::map<std::string, std::string>& values, const std::string& key,
               const std::string& value, const std::string& where) {
  if (!known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  values[key] = value;
}

class Fields {
 public:
  explicit Fields(const std::map<std::string, std::string>& values) : values_(values) {}

  const std::string& text(const std::string& key) const { return values_.at(key); }

  double real(const std::string& key) const {
    try {
      return parse_double(text(key));
    } catch (const ParseError&) {
      throw ConfigError(key + ": expected a number, got '" + text(key) + "'");
    }
  }
  double real_in(const std::string& key, double lo, double hi, bool lo_open,
                 bool hi_open) const {
    const double v = real(key);
    const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
    if (!ok) {
      throw ConfigError(key + " = " + text(key) + " is out of range " + (lo_open ? "(" : "[") +
                        format_double(lo) + ", " + format_double(hi) + (hi_open ? ")" : "]"));
    }
    return v;
  }
  double positive(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0.0)) throw ConfigError(key + " must be positive, got " + text(key));
    return v;
  }
  std::size_t count(const std::string& key, std::size_t min = 0) const {
    const std::size_t v = parse_size(text(key), key);
    if (v < min) {
      throw ConfigError(key + " must be >= " + std::to_string(min) + ", got " + text(key));
    }
    return v;
  }
  bool flag(const std::string& key) const { return parse_bool(text(key), key); }

 private:
  const std::map<std::string, std::string>& values_;
};

RunConfig build(std::map<std::string, std::string> values) {
  for (const auto& k : kKeys) values.emplace(k.key, k.fallback);
  if (values["output.dir"].empty()) {
    const char* root = std::getenv(kOutputRootEnv);
    values["output.dir"] = root && *root ? root : "runs";
  }
  const Fields f(values);
  RunConfig cfg;
  auto& spec = cfg.experiment;

  auto& data = spec.data;
  data.kind = f.text("dataset.source");
  if (data.kind != "moons" && data.kind != "kdd" && data.kind != "kyoto" &&
      data.kind != "file") {
    throw ConfigError("dataset.source: unknown source '" + data.kind +
                      "' (expected moons, kdd, kyoto or file)");
  }
  data.train_path = f.text("dataset.train_path");
  data.test_path = f.text("dataset.test_path");
  data.schema = f.text("dataset.schema");
  data.train_counts = parse_stratum_counts(f.text("dataset.train_counts"));
  data.eval_counts = parse_stratum_counts(f.text("dataset.eval_counts"));
  data.moons_n = f.count("dataset.moons_n", 2);
  data.moons_noise = f.real_in("dataset.moons_noise", 0.0, 1e9, false, false);
  data.moons_eval_n = f.count("dataset.moons_eval_n", 2);
  data.normalize = f.flag("dataset.normalize");
  if (data.kind != "moons") {
    if (data.train_path.empty()) throw ConfigError("dataset.train_path is required");
    if (!std::filesystem::exists(data.train_path)) {
      throw ConfigError("dataset.train_path does not exist: " + data.train_path.string());
    }
    if (!data.test_path.empty() && !std::filesystem::exists(data.test_path)) {
      throw ConfigError("dataset.test_path does not exist: " + data.test_path.string());
    }
    if (data.kind == "file" && data.schema.empty()) {
      throw ConfigError("dataset.schema is required for source = file");
    }
  }

  VictimSpec base;
  const std::string gamma = f.text("victims.gamma");
  base.kernel.gamma = gamma == "auto" ? 0.0 : f.positive("victims.gamma");
  base.kernel.degree = f.positive("victims.degree");
  base.kernel.coef0 = f.real("victims.coef0");
  base.svm_c = f.positive("victims.svm_c");
  base.svm_tol = f.positive("victims.svm_tol");
  base.svm_max_passes = f.count("victims.svm_max_passes", 1);
  base.svm_cache_mb = f.count("victims.svm_cache_mb", 1);
  base.lr_c = f.positive("victims.lr_c");
  base.lr_tol = f.positive("victims.lr_tol");
  base.lr_max_iter = f.count("victims.lr_max_iter", 1);
  base.nb_var_smoothing = f.positive("victims.nb_var_smoothing");
  base.lssvm_gamma = f.positive("victims.lssvm_gamma");
  base.lssvm_max_rows = f.count("victims.lssvm_max_rows", 2);
  const std::size_t mi_features = f.count("victims.mi_features");
  base.mi_bins = f.count("victims.mi_bins", 2);
  for (const auto& item : split(f.text("victims.models"), ',')) {
    const std::string name(trim(item));
    if (name.empty()) continue;
    VictimSpec v = VictimSpec::named(name);
    const Kernel kernel{v.kernel.type, base.kernel.gamma, base.kernel.degree,
                        base.kernel.coef0};
    const Family family = v.family;
    v = base;
    v.name = name;
    v.family = family;
    v.kernel = kernel;
    v.mi_features = family == Family::kLssvm ? mi_features : 0;
    spec.victims.push_back(std::move(v));
  }
  if (spec.victims.empty()) throw ConfigError("victims.models lists no models");

  auto& atk = spec.attack;
  atk.eta = f.real_in("attack.eta", 0.0, 1.0, true, true);
  atk.max_iters = f.count("attack.max_iters", 1);
  atk.step = f.positive("attack.step");
  atk.epsilon = f.text("attack.epsilon") == "auto" ? 0.0 : f.positive("attack.epsilon");
  atk.batch_size = f.text("attack.batch_size") == "auto" ? 0 : f.count("attack.batch_size", 1);
  atk.epd_k = f.count("attack.epd_k", 1);
  atk.epd_tau = f.real_in("attack.epd_tau", 0.0, 1.0, true, false);
  try {
    atk.budget_mode = parse_budget_mode(f.text("attack.budget_mode"));
    atk.method = parse_poison_method(f.text("attack.method"));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("attack: ") + e.what());
  }
  atk.random_candidate_factor = f.count("attack.random_candidate_factor", 1);
  atk.rounds = f.count("experiment.rounds");
  atk.validate();

  spec.repetitions = f.count("experiment.repetitions", 1);
  spec.seed = parse_size(f.text("experiment.seed"), "experiment.seed");
  for (const auto& item : split(f.text("experiment.eta_list"), ',')) {
    if (trim(item).empty()) continue;
    const double eta = parse_double(item);
    if (!(eta > 0.0 && eta < 1.0)) {
      throw ConfigError("experiment.eta_list: " + std::string(trim(item)) +
                        " is out of range (0, 1)");
    }
    cfg.eta_list.push_back(eta);
  }
  cfg.raster_resolution = f.count("experiment.raster_resolution", 2);
  cfg.output_dir = f.text("output.dir");
  cfg.values = std::move(values);
  return cfg;
}

void apply_overrides(std::map<std::string, std::string>& values,
                     const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override '" + o + "' must look like section.key=value");
    }
    set_value(values, std::string(trim(std::string_view(o).substr(0, eq))),
              std::string(trim(std::string_view(o).substr(eq + 1))), "override");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides,
                            const std::string& origin) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    const auto body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": malformed section header");
      section = std::string(trim(body.substr(1, body.size() - 2)));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of any [section]");
    const std::string key = section + "." + std::string(trim(body.substr(0, eq)));
    set_value(values, key, std::string(trim(body.substr(eq + 1))), where);
  }
  apply_overrides(values, overrides);
  return build(std::move(values));
}

RunConfig parse_config(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides, path.string());
}

std::string RunConfig::render() const {
  std::string out;
  std::string section;
  for (const auto& k : kKeys) {
    const std::string key = k.key;
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec == "manifest") continue;
    if (sec != section) {
      if (!section.empty()) out += '\n';
      out += "[" + sec + "]\n";
      section = sec;
    }
    const auto it = values.find(key);
    out += key.substr(dot + 1) + " = " + (it == values.end() ? "" : it->second) + '\n';
  }
  return out;
}

}  // namespace bebp
