// Synthetic 2D datasets, threshold encoders, CSV ingestion, and the analytic
// Bayes accuracy for the two-Gaussian family.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pst/ternary.hpp"

namespace pst {

/// Malformed or missing input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DatasetKind { kMoons, kCircles, kSpirals, kGaussians, kRingSector };

std::string to_string(DatasetKind kind);
/// Throws std::invalid_argument for unknown names.
DatasetKind parse_dataset_kind(const std::string& name);

struct Dataset {
  std::size_t dim = 0;
  int num_classes = 2;
  std::vector<double> features;  // row-major n x dim
  std::vector<int> labels;
  /// Generator kind, parameters, seed, split role, source path.
  std::map<std::string, std::string> meta;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }
  void validate() const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.dim == b.dim && a.num_classes == b.num_classes && a.features == b.features &&
           a.labels == b.labels;
  }
};

struct GenParams {
  DatasetKind kind = DatasetKind::kMoons;
  std::size_t n = 2500;
  double noise = 0.5;
  /// GAUSSIANS only: distance between the class means in units of sigma.
  double separation = 3.0;
  std::uint64_t seed = 0;
};

/// Balanced classes, shuffled, deterministic per seed.
Dataset gen_dataset(const GenParams& params);

/// The generator's own decision rule for noiseless MOONS/CIRCLES/GAUSSIANS/
/// RING_SECTOR points (nearest class manifold). Used to sanity-check shapes.
int generating_rule_label(DatasetKind kind, double x, double y, double separation = 0.0);

struct SplitDataset {
  Dataset train;
  Dataset test;
};

/// First n - n_test rows train, the rest test. Disjoint and exhaustive.
SplitDataset split_dataset(const Dataset& ds, std::size_t n_test);

enum class EncodingMode { kTernary, kBinaryThermometer };
enum class ThresholdPlacement { kUniform, kQuantile };

struct FeatureRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct EncoderConfig {
  std::size_t thresholds = 3;  // K; resolution is K + 1 bins
  double delta = 1.0;          // UNKNOWN band width as a fraction of spacing
  EncodingMode mode = EncodingMode::kTernary;
  ThresholdPlacement placement = ThresholdPlacement::kUniform;
  std::vector<FeatureRange> ranges;

  /// Per feature: K threshold positions and half-band widths.
  std::vector<std::vector<double>> theta;
  std::vector<std::vector<double>> half_band;

  std::size_t encoded_dim() const { return ranges.size() * thresholds; }
  void validate() const;
};

/// Fits ranges (and quantiles) on the training split.
EncoderConfig fit_encoder(const Dataset& train, std::size_t thresholds, double delta,
                          EncodingMode mode,
                          ThresholdPlacement placement = ThresholdPlacement::kUniform);

std::vector<Trit> encode_ternary(std::span<const double> x, const EncoderConfig& cfg);
std::vector<std::uint8_t> encode_binary(std::span<const double> x, const EncoderConfig& cfg);

/// Encoded samples stored as reals: trits as -1/0/+1, bits as 0/1.
struct EncodedSet {
  std::size_t dim = 0;
  int num_classes = 2;
  EncodingMode mode = EncodingMode::kTernary;
  std::vector<double> x;
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(x).subspan(i * dim, dim);
  }
  /// Circuit inputs: trits unchanged, bits mapped 0 -> FALSE, 1 -> TRUE.
  std::vector<Trit> trits(std::size_t i) const;
};

EncodedSet encode_dataset(const Dataset& ds, const EncoderConfig& cfg);

/// Share of encoded input trits equal to UNKNOWN; 0 for binary sets.
double unknown_input_share(const EncodedSet& set);

/// Bayes accuracy for two unit-variance isotropic Gaussians whose means are
/// `separation` sigmas apart: Phi(separation / 2).
double bayes_accuracy_gaussians(double separation);

struct CsvSchema {
  std::string label_column = "label";
  char delimiter = ',';
};

/// Throws DataError naming the line and column of the first bad cell.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
void save_csv(const std::filesystem::path& path, const Dataset& ds, const CsvSchema& schema = {});

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Strict full-string parse; returns false on any trailing garbage.
bool parse_double(std::string_view s, double& out);

}  // namespace pst
