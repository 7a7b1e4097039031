#include "bebp/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "bebp/random.hpp"
#include "strings.hpp"

namespace bebp {

namespace {

constexpr const char* kKddFeatureNames[] = {
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes",
    "land", "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in",
    "num_compromised", "root_shell", "su_attempted", "num_root",
    "num_file_creations", "num_shells", "num_access_files", "num_outbound_cmds",
    "is_host_login", "is_guest_login", "count", "srv_count", "serror_rate",
    "srv_serror_rate", "rerror_rate", "srv_rerror_rate", "same_srv_rate",
    "diff_srv_rate", "srv_diff_host_rate", "dst_host_count", "dst_host_srv_count",
    "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate", "dst_host_srv_serror_rate", "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate"};

std::string strip_label(std::string_view value) {
  value = trim(value);
  if (!value.empty() && value.back() == '.') value.remove_suffix(1);
  return std::string(value);
}

FeatureKind parse_kind(const std::string& text, const std::string& where) {
  if (text == "numeric") return FeatureKind::kNumeric;
  if (text == "categorical") return FeatureKind::kCategorical;
  throw ConfigError(where + ": unknown feature kind '" + text + "'");
}

}  // namespace

std::vector<FeatureSpec> Schema::features() const {
  std::vector<FeatureSpec> out;
  for (const auto& c : columns) {
    if (c.role == ColumnRole::kFeature) out.push_back({c.name, c.kind});
  }
  return out;
}

std::size_t Schema::feature_count() const {
  return static_cast<std::size_t>(std::count_if(
      columns.begin(), columns.end(),
      [](const Column& c) { return c.role == ColumnRole::kFeature; }));
}

Schema Schema::kdd() {
  Schema s;
  for (const char* name : kKddFeatureNames) {
    const std::string n(name);
    const bool categorical = n == "protocol_type" || n == "service" || n == "flag";
    s.columns.push_back({n, ColumnRole::kFeature,
                         categorical ? FeatureKind::kCategorical : FeatureKind::kNumeric});
  }
  s.columns.push_back({"class", ColumnRole::kLabel, FeatureKind::kNumeric});
  s.normal_tags = {"normal"};
  s.allow_trailing_extra = true;
  s.grouping = "kdd";
  return s;
}

Schema Schema::kyoto() {
  using R = ColumnRole;
  using K = FeatureKind;
  Schema s;
  s.delimiter = '\t';
  s.columns = {
      {"duration", R::kFeature, K::kNumeric},
      {"service", R::kFeature, K::kCategorical},
      {"source_bytes", R::kFeature, K::kNumeric},
      {"destination_bytes", R::kFeature, K::kNumeric},
      {"count", R::kFeature, K::kNumeric},
      {"same_srv_rate", R::kFeature, K::kNumeric},
      {"serror_rate", R::kFeature, K::kNumeric},
      {"srv_serror_rate", R::kFeature, K::kNumeric},
      {"dst_host_count", R::kFeature, K::kNumeric},
      {"dst_host_srv_count", R::kFeature, K::kNumeric},
      {"dst_host_same_src_port_rate", R::kFeature, K::kNumeric},
      {"dst_host_serror_rate", R::kFeature, K::kNumeric},
      {"dst_host_srv_serror_rate", R::kFeature, K::kNumeric},
      {"flag", R::kFeature, K::kCategorical},
      {"ids_detection", R::kFeature, K::kCategorical},
      {"malware_detection", R::kFeature, K::kCategorical},
      {"ashula_detection", R::kFeature, K::kCategorical},
      {"label", R::kLabel, K::kNumeric},
      {"source_ip", R::kIgnore, K::kNumeric},
      {"source_port", R::kIgnore, K::kNumeric},
      {"destination_ip", R::kIgnore, K::kNumeric},
      {"destination_port", R::kFeature, K::kNumeric},
      {"start_time", R::kIgnore, K::kNumeric},
      {"protocol", R::kFeature, K::kCategorical},
  };
  s.normal_tags = {"1"};
  return s;
}

// Schema files are line oriented:
//   delimiter = comma | tab | <char>
//   normal_tag = <value>            (repeatable)
//   trailing_extra = true | false
//   grouping = none | kdd
//   column <name> numeric | categorical
//   label <name>
//   ignore <name>
Schema Schema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file " + path.string());
  Schema s;
  s.normal_tags.clear();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    auto body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (const auto eq = body.find('='); eq != std::string_view::npos) {
      const std::string key(trim(body.substr(0, eq)));
      const std::string value(trim(body.substr(eq + 1)));
      if (key == "delimiter") {
        if (value == "comma") s.delimiter = ',';
        else if (value == "tab") s.delimiter = '\t';
        else if (value.size() == 1) s.delimiter = value[0];
        else throw ConfigError(where + ": bad delimiter '" + value + "'");
      } else if (key == "normal_tag") {
        s.normal_tags.push_back(value);
      } else if (key == "trailing_extra") {
        s.allow_trailing_extra = parse_bool(value, where);
      } else if (key == "grouping") {
        if (value != "none" && value != "kdd") {
          throw ConfigError(where + ": unknown grouping '" + value + "'");
        }
        s.grouping = value;
      } else {
        throw ConfigError(where + ": unknown schema key '" + key + "'");
      }
      continue;
    }
    const auto words = split_whitespace(body);
    if (words[0] == "column" && words.size() == 3) {
      s.columns.push_back({words[1], ColumnRole::kFeature, parse_kind(words[2], where)});
    } else if (words[0] == "label" && words.size() == 2) {
      s.columns.push_back({words[1], ColumnRole::kLabel, FeatureKind::kNumeric});
    } else if (words[0] == "ignore" && words.size() == 2) {
      s.columns.push_back({words[1], ColumnRole::kIgnore, FeatureKind::kNumeric});
    } else {
      throw ConfigError(where + ": cannot parse schema line '" + std::string(body) + "'");
    }
  }
  const auto labels = std::count_if(s.columns.begin(), s.columns.end(), [](const Column& c) {
    return c.role == ColumnRole::kLabel;
  });
  if (labels != 1) throw ConfigError(path.string() + ": schema needs exactly one label column");
  if (s.feature_count() == 0) throw ConfigError(path.string() + ": schema has no features");
  if (s.normal_tags.empty()) s.normal_tags = {"normal"};
  return s;
}

Schema Schema::named_or_file(const std::string& name_or_path) {
  if (name_or_path == "kdd" || name_or_path == "nsl-kdd" || name_or_path == "kddcup99") {
    return kdd();
  }
  if (name_or_path == "kyoto") return kyoto();
  return load(name_or_path);
}

std::size_t Dataset::dim() const {
  if (!schema.empty()) return schema.size();
  return samples.empty() ? 0 : samples.front().features.size();
}

std::size_t Dataset::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(),
      [label](const LabeledSample& s) { return s.label == label; }));
}

PointSet Dataset::points_with_label(Label label) const {
  std::vector<Vector> pts;
  for (const auto& s : samples) {
    if (s.label == label) pts.push_back(s.features);
  }
  return PointSet(std::move(pts));
}

void Dataset::validate() const {
  const std::size_t d = dim();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].features.size() != d) {
      throw SchemaError("sample " + std::to_string(i) + " has dimension " +
                        std::to_string(samples[i].features.size()) + ", expected " +
                        std::to_string(d));
    }
  }
}

Dataset make_moons(std::size_t n, double noise, std::uint64_t seed) {
  if (n < 2) throw SizeError("make_moons: need n >= 2");
  if (noise < 0.0) throw SizeError("make_moons: noise must be nonnegative");
  const std::size_t n_normal = (n + 1) / 2;
  const std::size_t n_abnormal = n / 2;
  Dataset out;
  out.schema = {{"x0", FeatureKind::kNumeric}, {"x1", FeatureKind::kNumeric}};
  out.provenance = "moons";
  auto arc = [](std::size_t i, std::size_t count) {
    return count > 1 ? std::numbers::pi * static_cast<double>(i) /
                           static_cast<double>(count - 1)
                     : 0.0;
  };
  for (std::size_t i = 0; i < n_normal; ++i) {
    const double t = arc(i, n_normal);
    out.samples.push_back({{std::cos(t), std::sin(t)}, Label::kNormal, "normal",
                           Origin::kGenuine});
  }
  for (std::size_t i = 0; i < n_abnormal; ++i) {
    const double t = arc(i, n_abnormal);
    out.samples.push_back({{1.0 - std::cos(t), 0.5 - std::sin(t)}, Label::kAbnormal,
                           "abnormal", Origin::kGenuine});
  }
  Rng rng(seed);
  rng.shuffle(out.samples);
  if (noise > 0.0) {
    for (auto& s : out.samples) {
      for (double& v : s.features) v += noise * rng.normal();
    }
  }
  return out;
}

RawDataset parse_kdd_style(std::istream& in, const Schema& schema,
                           const std::string& provenance) {
  RawDataset out;
  out.schema = schema;
  out.provenance = provenance;
  const std::size_t arity = schema.columns.size();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, schema.delimiter);
    if (fields.size() == arity + 1 && schema.allow_trailing_extra) {
      fields.pop_back();
    }
    if (fields.size() != arity) {
      throw ParseError(provenance + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(arity) + " fields, found " +
                       std::to_string(fields.size()));
    }
    RawRecord rec;
    rec.line = line_no;
    rec.fields.reserve(schema.feature_count());
    for (std::size_t c = 0; c < arity; ++c) {
      switch (schema.columns[c].role) {
        case Schema::ColumnRole::kFeature:
          rec.fields.emplace_back(trim(fields[c]));
          break;
        case Schema::ColumnRole::kLabel:
          rec.category = strip_label(fields[c]);
          break;
        case Schema::ColumnRole::kIgnore:
          break;
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

RawDataset load_kdd_style(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file " + path.string());
  return parse_kdd_style(in, schema, path.string());
}

RawDataset binarize_labels(RawDataset dataset) {
  const auto& tags = dataset.schema.normal_tags;
  std::set<std::string> unknown;
  for (auto& rec : dataset.records) {
    const bool normal = std::find(tags.begin(), tags.end(), rec.category) != tags.end();
    rec.label = normal ? Label::kNormal : Label::kAbnormal;
    if (!normal && dataset.schema.grouping == "kdd" &&
        kdd_attack_class(rec.category) == "UNKNOWN") {
      unknown.insert(rec.category);
    }
  }
  for (const auto& tag : unknown) {
    std::clog << "bebp: unrecognised label '" << tag << "' treated as abnormal\n";
  }
  return dataset;
}

std::string kdd_attack_class(std::string_view raw) {
  static const std::map<std::string, std::string, std::less<>> kClasses = {
      {"normal", "NORMAL"},
      {"back", "DOS"}, {"land", "DOS"}, {"neptune", "DOS"}, {"pod", "DOS"},
      {"smurf", "DOS"}, {"teardrop", "DOS"}, {"apache2", "DOS"},
      {"mailbomb", "DOS"}, {"processtable", "DOS"}, {"udpstorm", "DOS"},
      {"worm", "DOS"},
      {"ipsweep", "PROB"}, {"nmap", "PROB"}, {"portsweep", "PROB"},
      {"satan", "PROB"}, {"mscan", "PROB"}, {"saint", "PROB"},
      {"ftp_write", "R2L"}, {"guess_passwd", "R2L"}, {"imap", "R2L"},
      {"multihop", "R2L"}, {"phf", "R2L"}, {"spy", "R2L"},
      {"warezclient", "R2L"}, {"warezmaster", "R2L"}, {"named", "R2L"},
      {"sendmail", "R2L"}, {"snmpgetattack", "R2L"}, {"snmpguess", "R2L"},
      {"xlock", "R2L"}, {"xsnoop", "R2L"}, {"httptunnel", "R2L"},
      {"buffer_overflow", "U2R"}, {"loadmodule", "U2R"}, {"perl", "U2R"},
      {"rootkit", "U2R"}, {"ps", "U2R"}, {"sqlattack", "U2R"}, {"xterm", "U2R"},
  };
  const std::string tag = strip_label(raw);
  const auto it = kClasses.find(tag);
  return it == kClasses.end() ? "UNKNOWN" : it->second;
}

std::string stratum_of(const Schema& schema, const std::string& category) {
  if (schema.grouping == "kdd") return kdd_attack_class(category);
  return category;
}

CategoricalEncoder fit_encoder(const RawDataset& train) {
  CategoricalEncoder enc;
  enc.features = train.schema.features();
  for (std::size_t f = 0; f < enc.features.size(); ++f) {
    if (enc.features[f].kind != FeatureKind::kCategorical) continue;
    std::set<std::string> vocab;
    for (const auto& rec : train.records) vocab.insert(rec.fields[f]);
    enc.vocabularies[f] = std::vector<std::string>(vocab.begin(), vocab.end());
  }
  return enc;
}

Dataset encode(const CategoricalEncoder& encoder, const RawDataset& raw) {
  Dataset out;
  out.schema = encoder.features;
  out.provenance = raw.provenance;
  out.samples.reserve(raw.records.size());
  const std::size_t d = encoder.features.size();
  for (const auto& rec : raw.records) {
    if (!rec.label) {
      throw SchemaError(raw.provenance + ":" + std::to_string(rec.line) +
                        ": record not binarized");
    }
    if (rec.fields.size() != d) {
      throw SchemaError(raw.provenance + ":" + std::to_string(rec.line) +
                        ": feature count differs from encoder");
    }
    LabeledSample s;
    s.features.resize(d);
    for (std::size_t f = 0; f < d; ++f) {
      if (const auto it = encoder.vocabularies.find(f); it != encoder.vocabularies.end()) {
        const auto& vocab = it->second;
        const auto pos = std::lower_bound(vocab.begin(), vocab.end(), rec.fields[f]);
        if (pos != vocab.end() && *pos == rec.fields[f]) {
          s.features[f] = static_cast<double>(pos - vocab.begin());
        } else {
          s.features[f] = vocab.empty() ? 0.0 : static_cast<double>(vocab.size() - 1);
        }
      } else {
        try {
          s.features[f] = parse_double(rec.fields[f]);
        } catch (const ParseError&) {
          throw ParseError(raw.provenance + ":" + std::to_string(rec.line) +
                           ": feature '" + encoder.features[f].name +
                           "' is not numeric: '" + rec.fields[f] + "'");
        }
      }
    }
    s.label = *rec.label;
    s.category = rec.category;
    out.samples.push_back(std::move(s));
  }
  return out;
}

void CategoricalEncoder::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [feature, vocab] : vocabularies) {
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      out << features[feature].name << ',' << vocab[i] << ',' << i << '\n';
    }
  }
}

NormalizationParams fit_normalize(const Dataset& train) {
  if (train.empty()) throw SizeError("fit_normalize: empty training data");
  train.validate();
  const std::size_t d = train.dim();
  NormalizationParams p;
  p.min.assign(d, std::numeric_limits<double>::infinity());
  p.max.assign(d, -std::numeric_limits<double>::infinity());
  for (const auto& s : train.samples) {
    for (std::size_t f = 0; f < d; ++f) {
      p.min[f] = std::min(p.min[f], s.features[f]);
      p.max[f] = std::max(p.max[f], s.features[f]);
    }
  }
  return p;
}

Dataset apply_normalize(const NormalizationParams& params, Dataset dataset) {
  dataset.validate();
  if (!dataset.empty() && dataset.dim() != params.dim()) {
    throw SchemaError("apply_normalize: dataset has " + std::to_string(dataset.dim()) +
                      " features, params have " + std::to_string(params.dim()));
  }
  for (auto& s : dataset.samples) {
    for (std::size_t f = 0; f < params.dim(); ++f) {
      const double range = params.max[f] - params.min[f];
      if (!(range > 0.0)) {
        s.features[f] = 0.0;
        continue;
      }
      const double v = (s.features[f] - params.min[f]) / range;
      s.features[f] = std::clamp(v, 0.0, 1.0);
    }
  }
  return dataset;
}

void NormalizationParams::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t f = 0; f < dim(); ++f) {
    out << f << ',' << format_double(min[f]) << ',' << format_double(max[f]) << '\n';
  }
}

NormalizationParams NormalizationParams::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  NormalizationParams p;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected feature,min,max");
    }
    p.min.push_back(parse_double(fields[1]));
    p.max.push_back(parse_double(fields[2]));
  }
  return p;
}

namespace {

template <class Item, class KeyFn>
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_indices(
    const std::vector<Item>& items, KeyFn key, const StratumCounts& counts,
    std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> pools;
  for (std::size_t i = 0; i < items.size(); ++i) pools[key(items[i])].push_back(i);
  std::vector<char> chosen(items.size(), 0);
  std::uint64_t stream = 0;
  for (const auto& [stratum, want] : counts) {
    const auto it = pools.find(stratum);
    const std::size_t have = it == pools.end() ? 0 : it->second.size();
    if (want > have) {
      throw QuotaError("stratified_sample: category '" + stratum + "' requests " +
                       std::to_string(want) + " but only " + std::to_string(have) +
                       " available");
    }
    Rng rng(derive_seed(seed, stream++));
    for (std::size_t j : rng.sample_without_replacement(have, want)) {
      chosen[it->second[j]] = 1;
    }
  }
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    (chosen[i] ? out.first : out.second).push_back(i);
  }
  return out;
}

}  // namespace

Split<RawDataset> stratified_sample(const RawDataset& dataset,
                                    const StratumCounts& counts, std::uint64_t seed) {
  const auto [sel, rem] = stratified_indices(
      dataset.records,
      [&](const RawRecord& r) { return stratum_of(dataset.schema, r.category); }, counts,
      seed);
  Split<RawDataset> out{RawDataset{dataset.schema, {}, dataset.provenance},
                        RawDataset{dataset.schema, {}, dataset.provenance}};
  for (auto i : sel) out.selected.records.push_back(dataset.records[i]);
  for (auto i : rem) out.remainder.records.push_back(dataset.records[i]);
  return out;
}

Split<Dataset> stratified_sample(const Dataset& dataset, const StratumCounts& counts,
                                 std::uint64_t seed) {
  const auto [sel, rem] = stratified_indices(
      dataset.samples, [](const LabeledSample& s) { return s.category; }, counts, seed);
  Split<Dataset> out{Dataset{{}, dataset.schema, dataset.provenance},
                     Dataset{{}, dataset.schema, dataset.provenance}};
  for (auto i : sel) out.selected.samples.push_back(dataset.samples[i]);
  for (auto i : rem) out.remainder.samples.push_back(dataset.samples[i]);
  return out;
}

StratumCounts parse_stratum_counts(const std::string& text) {
  StratumCounts counts;
  for (const auto& item : split(text, ',')) {
    const auto entry = trim(item);
    if (entry.empty()) continue;
    const auto colon = entry.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError("bad stratum count '" + std::string(entry) +
                        "', expected NAME:COUNT");
    }
    const std::string name(trim(entry.substr(0, colon)));
    counts[name] = parse_size(trim(entry.substr(colon + 1)), "stratum " + name);
  }
  return counts;
}

std::string format_stratum_counts(const StratumCounts& counts) {
  std::string out;
  for (const auto& [name, n] : counts) {
    if (!out.empty()) out += ',';
    out += name + ':' + std::to_string(n);
  }
  return out;
}

StratumCounts kdd_training_counts() {
  return {{"NORMAL", 2000}, {"PROB", 300}, {"DOS", 3790}, {"U2R", 32}, {"R2L", 350}};
}

StratumCounts kdd_evaluating_counts() {
  return {{"NORMAL", 2000}, {"PROB", 500}, {"DOS", 3900}, {"U2R", 20}, {"R2L", 400}};
}

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& f : dataset.schema) out << f.name << ',';
  out << "origin,category,label\n";
  for (const auto& s : dataset.samples) {
    for (double v : s.features) out << format_double(v) << ',';
    out << (s.origin == Origin::kGenuine ? "genuine" : "adversarial") << ','
        << s.category << ',' << to_string(s.label) << '\n';
  }
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Dataset out;
  out.provenance = path.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  const auto header = split(line, ',');
  if (header.size() < 4) throw ParseError(path.string() + ": header too short");
  const std::size_t d = header.size() - 3;
  for (std::size_t f = 0; f < d; ++f) out.schema.push_back({header[f], FeatureKind::kNumeric});
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    LabeledSample s;
    for (std::size_t f = 0; f < d; ++f) s.features.push_back(parse_double(fields[f]));
    s.origin = fields[d] == "adversarial" ? Origin::kAdversarial : Origin::kGenuine;
    s.category = fields[d + 1];
    if (fields[d + 2] == "normal") s.label = Label::kNormal;
    else if (fields[d + 2] == "abnormal") s.label = Label::kAbnormal;
    else throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad label");
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace bebp
