#ifndef BEBP_DATA_HPP
#define BEBP_DATA_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bebp/geometry.hpp"
#include "bebp/types.hpp"

namespace bebp {

enum class Origin { kGenuine, kAdversarial };

struct LabeledSample {
  Vector features;
  Label label = Label::kNormal;
  std::string category;
  Origin origin = Origin::kGenuine;
};

enum class FeatureKind { kNumeric, kCategorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
};

// Column layout of a delimited traffic file.
struct Schema {
  enum class ColumnRole { kFeature, kLabel, kIgnore };
  struct Column {
    std::string name;
    ColumnRole role = ColumnRole::kFeature;
    FeatureKind kind = FeatureKind::kNumeric;
  };

  std::vector<Column> columns;
  char delimiter = ',';
  // Label values (after trimming a trailing '.') that mean Normal.
  std::vector<std::string> normal_tags{"normal"};
  // NSL-KDD appends a difficulty score after the label; one extra trailing
  // column is accepted and dropped.
  bool allow_trailing_extra = false;
  // Stratum names for stratified sampling: "none" keeps the raw label value,
  // "kdd" maps attack names to NORMAL/PROB/DOS/U2R/R2L.
  std::string grouping = "none";

  std::vector<FeatureSpec> features() const;
  std::size_t feature_count() const;

  static Schema kdd();      // KDDCUP99 / NSL-KDD: 41 features + label
  static Schema kyoto();    // Kyoto 2006+: 24 columns, session label {1,-1,-2}
  static Schema load(const std::filesystem::path& path);
  static Schema named_or_file(const std::string& name_or_path);
};

// Dataset of encoded, numeric samples.
struct Dataset {
  std::vector<LabeledSample> samples;
  std::vector<FeatureSpec> schema;
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::size_t dim() const;
  std::size_t count(Label label) const;
  PointSet points_with_label(Label label) const;
  // Throws SchemaError if any sample's dimension differs from schema.
  void validate() const;
};

// One parsed line of a traffic file, before categorical encoding.
struct RawRecord {
  std::vector<std::string> fields;  // feature columns only, in schema order
  std::string category;             // label column value, trailing '.' removed
  std::optional<Label> label;       // filled by binarize_labels
  std::size_t line = 0;
};

struct RawDataset {
  Schema schema;
  std::vector<RawRecord> records;
  std::string provenance;

  std::size_t size() const { return records.size(); }
};

struct NormalizationParams {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dim() const { return min.size(); }
  void save(const std::filesystem::path& path) const;
  static NormalizationParams load(const std::filesystem::path& path);
};

// Ordinal encoder for categorical columns: index over the sorted vocabulary
// seen in training data; unseen values map to the largest index.
struct CategoricalEncoder {
  std::vector<FeatureSpec> features;
  std::map<std::size_t, std::vector<std::string>> vocabularies;

  void save(const std::filesystem::path& path) const;
};

Dataset make_moons(std::size_t n, double noise, std::uint64_t seed);

RawDataset load_kdd_style(const std::filesystem::path& path, const Schema& schema);
RawDataset parse_kdd_style(std::istream& in, const Schema& schema,
                           const std::string& provenance);

// Normal <-> schema normal tag, anything else -> Abnormal.
RawDataset binarize_labels(RawDataset dataset);

// KDD attack name -> NORMAL / PROB / DOS / U2R / R2L ("UNKNOWN" otherwise).
std::string kdd_attack_class(std::string_view tag);
std::string stratum_of(const Schema& schema, const std::string& category);

CategoricalEncoder fit_encoder(const RawDataset& train);
// Records must be binarized. Numeric fields that fail to parse raise
// ParseError naming the line.
Dataset encode(const CategoricalEncoder& encoder, const RawDataset& raw);

NormalizationParams fit_normalize(const Dataset& train);
Dataset apply_normalize(const NormalizationParams& params, Dataset dataset);

using StratumCounts = std::map<std::string, std::size_t>;

template <class D>
struct Split {
  D selected;
  D remainder;
};

// Uniform sampling without replacement within each stratum.
Split<RawDataset> stratified_sample(const RawDataset& dataset,
                                    const StratumCounts& counts,
                                    std::uint64_t seed);
Split<Dataset> stratified_sample(const Dataset& dataset, const StratumCounts& counts,
                                 std::uint64_t seed);

StratumCounts parse_stratum_counts(const std::string& text);
std::string format_stratum_counts(const StratumCounts& counts);

// Per-class draw sizes for the KDD training and evaluating splits
// (same for KDDCUP99 and NSL-KDD).
StratumCounts kdd_training_counts();
StratumCounts kdd_evaluating_counts();

// CSV with features then the label tag last ("normal" or the category).
void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace bebp

#endif  // BEBP_DATA_HPP
