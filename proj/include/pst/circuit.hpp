// Discrete ternary circuits: hardening, lookup evaluation, and the
// soft-versus-circuit gap report.
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pst/data.hpp"
#include "pst/network.hpp"
#include "pst/ternary.hpp"

namespace pst {

struct Provenance {
  std::string source_arch;  // "ternary" or "binary"
  std::string source_hash;  // SHA-256 of the source checkpoint, when known
  std::string hardened_at;  // UTC ISO-8601

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Circuit {
  ConnectivityMap wiring;
  GroupSumConfig readout;
  std::vector<std::vector<GateId>> gates;  // per layer, one per neuron
  Provenance provenance;

  std::size_t depth() const { return wiring.depth(); }
  std::size_t input_dim() const { return wiring.input_dim; }
  std::size_t neuron_count() const { return wiring.neuron_count(); }
  void validate() const;

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.wiring == b.wiring && a.readout.k == b.readout.k && a.readout.tau == b.readout.tau &&
           a.gates == b.gates && a.provenance == b.provenance;
  }
};

/// Rounds every neuron's table; wiring and readout copied unchanged.
Circuit harden_network(const PstNetwork& net);

/// Strong Kleene extension of Boolean gate k to the ternary grid: bits map
/// 0 -> FALSE, 1 -> TRUE; an entry with UNKNOWN inputs is the common output
/// over all Boolean completions, or UNKNOWN if they disagree.
TruthTable9 kleene_extension(std::size_t boolean_gate);

/// Index of the most probable gate; ties go to the lowest index.
std::size_t select_boolean_gate(std::span<const double, 16> logits);

/// Argmax gate per neuron, embedded through kleene_extension.
Circuit harden_binary(const BinaryDlgnNetwork& net);

/// Network whose coefficients reproduce each circuit gate exactly.
PstNetwork exact_network(const Circuit& circuit);

struct CircuitOutput {
  std::vector<Trit> outputs;
  std::vector<double> scores;
  int predicted = 0;
  double margin = 0.0;
};

/// Top score minus runner-up; 0 for a single class.
double score_margin(std::span<const double> scores);

/// Each gate materialized as its 9-entry lookup row; evaluation is pure table
/// indexing.
class CircuitEvaluator {
 public:
  explicit CircuitEvaluator(const Circuit& circuit);

  /// Throws std::invalid_argument on a wrong-length input.
  CircuitOutput eval(std::span<const Trit> x) const;
  /// Values of every neuron, layer by layer.
  std::vector<std::vector<Trit>> trace(std::span<const Trit> x) const;

  const Circuit& circuit() const { return circuit_; }

 private:
  void run(std::span<const Trit> x, std::vector<std::vector<std::int8_t>>& values) const;

  Circuit circuit_;
  std::vector<std::vector<std::array<std::int8_t, 9>>> rows_;
};

CircuitOutput eval_circuit(const Circuit& circuit, std::span<const Trit> x);

/// Right-hand side of the hardening identity: mean over neurons of
/// (1/9) * ||t_j - round(t_j)||^2.
double hardening_error(const PstNetwork& net);

struct CircuitPredictions {
  std::vector<int> predicted;
  std::vector<double> margin;
  std::vector<int> labels;
  std::size_t unknown_outputs = 0;
  std::size_t total_outputs = 0;

  double accuracy() const;
  double unknown_fraction() const;
};

/// Circuit predictions for every sample of an encoded set.
CircuitPredictions predict_all(const Circuit& circuit, const EncodedSet& set);

struct GapReport {
  std::size_t samples = 0;
  double soft_accuracy = 0.0;
  double circuit_accuracy = 0.0;
  double gap_pp = 0.0;  // 100 * (soft - circuit)
  std::optional<double> hardening_error;  // ternary only
  double unknown_fraction = 0.0;
};

/// Throws DataError on an empty set.
GapReport gap_report(const PstNetwork& net, const Circuit& circuit, const EncodedSet& set);
GapReport gap_report(const BinaryDlgnNetwork& net, const Circuit& circuit, const EncodedSet& set);

}  // namespace pst
