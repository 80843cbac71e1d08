// Soft forward models: the PST ternary network and the softmax-over-16-gates
// binary baseline. Both share the connectivity map and GroupSum readout.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pst/ternary.hpp"

namespace pst {

/// Class scores are (1/tau) * sum of a contiguous block of n_L / k outputs.
struct GroupSumConfig {
  int k = 2;
  double tau = 10.0;

  void validate(std::size_t output_width) const;
};

struct LayerWiring {
  std::vector<std::uint32_t> src_a;
  std::vector<std::uint32_t> src_b;

  std::size_t width() const { return src_a.size(); }
  friend bool operator==(const LayerWiring&, const LayerWiring&) = default;
};

/// Parents of every gate neuron; layer 0 of `layers` reads the input vector.
struct ConnectivityMap {
  std::uint64_t seed = 0;
  std::size_t input_dim = 0;
  std::vector<LayerWiring> layers;

  /// Uniform with replacement over the previous layer, parents independent.
  static ConnectivityMap generate(std::size_t input_dim, std::span<const std::size_t> widths,
                                  std::uint64_t seed);

  std::size_t depth() const { return layers.size(); }
  std::size_t width(std::size_t layer) const { return layers[layer].width(); }
  std::size_t fan_in_width(std::size_t layer) const {
    return layer == 0 ? input_dim : layers[layer - 1].width();
  }
  std::size_t output_width() const { return layers.back().width(); }
  std::size_t neuron_count() const;
  std::vector<std::size_t> widths() const;
  void validate() const;

  friend bool operator==(const ConnectivityMap&, const ConnectivityMap&) = default;
};

inline constexpr double kInitStd = 0.45;

struct PstNetwork {
  ConnectivityMap wiring;
  GroupSumConfig readout;
  /// Per layer, 9 coefficients per neuron, contiguous.
  std::vector<std::vector<double>> coeffs;

  std::size_t depth() const { return wiring.depth(); }
  std::size_t input_dim() const { return wiring.input_dim; }
  std::size_t neuron_count() const { return wiring.neuron_count(); }

  std::span<const double, 9> weights(std::size_t layer, std::size_t j) const {
    return std::span<const double, 9>(coeffs[layer].data() + 9 * j, 9);
  }
  std::span<double, 9> weights(std::size_t layer, std::size_t j) {
    return std::span<double, 9>(coeffs[layer].data() + 9 * j, 9);
  }
  void set_weights(std::size_t layer, std::size_t j, const PolyCoeffs9& p);

  void validate() const;
};

/// Coefficients i.i.d. N(0, init_std^2); connectivity and coefficients drawn
/// from independent streams of the same seed.
PstNetwork init_network(std::span<const std::size_t> widths, std::size_t input_dim,
                        GroupSumConfig readout, std::uint64_t seed, double init_std = kInitStd);

inline double clip_unit(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

std::vector<double> group_sum(std::span<const double> outputs, const GroupSumConfig& cfg);
/// Ties resolve to the lowest index.
int argmax_lowest(std::span<const double> scores);

struct SoftForward {
  std::vector<std::vector<double>> pre;          // before clip
  std::vector<std::vector<double>> activations;  // after clip
  std::vector<double> scores;
};

inline constexpr double kInputSlack = 1e-9;

/// Throws std::invalid_argument for inputs outside [-1, 1] (beyond slack).
SoftForward forward_soft(const PstNetwork& net, std::span<const double> x);

/// Batched activations, neuron-major: value of neuron j on sample b sits at
/// [j * batch + b].
struct BatchTrace {
  std::size_t batch = 0;
  std::vector<double> inputs;
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
};

/// Transposes row-major samples into the neuron-major input buffer.
void load_batch(BatchTrace& trace, std::span<const double> rows, std::size_t dim, std::size_t batch);

void forward_batch(const PstNetwork& net, BatchTrace& trace);

/// Per-sample class scores from the output layer of a trace; row-major
/// [b * k + c].
std::vector<double> batch_scores(const BatchTrace& trace, const GroupSumConfig& cfg);

// ---------------------------------------------------------------------------
// Binary baseline

inline constexpr std::size_t kNumBooleanGates = 16;

/// Multilinear relaxation c0 + c1 a + c2 b + c3 ab of Boolean gate k on [0,1]^2.
/// Order: FALSE, AND, A&!B, A, !A&B, B, XOR, OR, NOR, XNOR, !B, A|!B, !A, !A|B, NAND, TRUE.
const std::array<std::array<double, 4>, kNumBooleanGates>& boolean_gate_forms();

double boolean_gate_soft(std::size_t k, double a, double b);
/// Output of gate k on bits.
int boolean_gate_bit(std::size_t k, int a, int b);

struct BinaryDlgnNetwork {
  ConnectivityMap wiring;
  GroupSumConfig readout;
  /// Per layer, 16 logits per neuron, contiguous.
  std::vector<std::vector<double>> logits;

  std::size_t depth() const { return wiring.depth(); }
  std::size_t input_dim() const { return wiring.input_dim; }
  std::size_t neuron_count() const { return wiring.neuron_count(); }
  std::span<const double, 16> gate_logits(std::size_t layer, std::size_t j) const {
    return std::span<const double, 16>(logits[layer].data() + 16 * j, 16);
  }
  std::span<double, 16> gate_logits(std::size_t layer, std::size_t j) {
    return std::span<double, 16>(logits[layer].data() + 16 * j, 16);
  }
  void validate() const;
};

/// Logits i.i.d. N(0, 1).
BinaryDlgnNetwork init_binary_network(std::span<const std::size_t> widths, std::size_t input_dim,
                                      GroupSumConfig readout, std::uint64_t seed);

std::array<double, kNumBooleanGates> softmax16(std::span<const double, 16> logits);

struct BinaryForward {
  std::vector<std::vector<double>> activations;
  std::vector<double> scores;
};

/// Throws std::invalid_argument for inputs outside [0, 1].
BinaryForward forward_binary(const BinaryDlgnNetwork& net, std::span<const double> x);

/// Batched forward. `probs` receives per-layer softmax probabilities
/// (16 per neuron) for reuse by the backward pass.
void forward_binary_batch(const BinaryDlgnNetwork& net, BatchTrace& trace,
                          std::vector<std::vector<double>>& probs);

}  // namespace pst
