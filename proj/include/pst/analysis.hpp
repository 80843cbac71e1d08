// Selective prediction, gate-diversity statistics, and circuit spectral
// profiles.
#pragma once

#include <map>
#include <span>
#include <vector>

#include "pst/circuit.hpp"
#include "pst/fourier.hpp"

namespace pst {

struct CoveragePoint {
  double coverage = 0.0;
  std::size_t retained = 0;
  double accuracy = 0.0;
};

struct CoverageCurve {
  std::vector<CoveragePoint> points;  // in retention-grid order
  /// Mean accuracy over the grid. Reports print it negated.
  double auc = 0.0;
};

/// {1.00, 0.95, ..., 0.05}.
std::vector<double> default_retention_grid();

/// Retains the ceil(r * n) highest-margin samples per grid fraction r; equal
/// margins keep sample order. Throws std::invalid_argument on an empty grid or
/// fractions outside (0, 1], DataError on an empty prediction set.
CoverageCurve selective_curve(const CircuitPredictions& preds, std::span<const double> retention_grid);
CoverageCurve selective_curve(const Circuit& circuit, const EncodedSet& set,
                              std::span<const double> retention_grid);

/// Accuracy on the ceil(r * n) most confident samples.
double accuracy_at(const CircuitPredictions& preds, double retention);

struct DiversityReport {
  std::size_t neurons = 0;
  std::size_t unique = 0;
  double effective_diversity = 0.0;  // exp of Shannon entropy (nats)
  double gini = 0.0;
  double redundancy = 0.0;  // 1 - unique / neurons
  std::size_t max_copies = 0;
  std::size_t singletons = 0;
  std::map<GateId, std::size_t> counts;
};

/// Gini is taken over the count vector of the whole vocabulary (unused gates
/// contribute zeros).
DiversityReport diversity_report(const Circuit& circuit, std::size_t vocabulary_size = kNumGates);
DiversityReport diversity_from_counts(const std::map<GateId, std::size_t>& counts,
                                      std::size_t vocabulary_size);
/// Half the relative mean absolute difference.
double gini_coefficient(std::span<const double> values);

struct SpectralProfile {
  std::size_t unique_gates = 0;
  EnergyBands bands;  // pooled over unique gates, normalized
  double ternary_share = 0.0;  // unique gates that are not binary-equivalent
  std::map<SpectralClass, std::size_t> classes;
};

SpectralProfile spectral_profile(const Circuit& circuit);
SpectralProfile spectral_profile(std::span<const GateId> unique_gates);

/// Rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Number of adjacent increases in a sequence expected to be nonincreasing.
std::size_t count_increases(std::span<const double> seq, double tol = 0.0);

}  // namespace pst
