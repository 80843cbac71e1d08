// End-to-end runs: data -> encoding -> training -> hardening -> metrics, the
// three trend sweeps, and the per-step timing benchmark.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pst/analysis.hpp"
#include "pst/circuit.hpp"
#include "pst/data.hpp"
#include "pst/network.hpp"
#include "pst/training.hpp"

namespace pst {

struct Recipe {
  DatasetKind kind = DatasetKind::kMoons;
  std::size_t n_train = 2000;
  std::size_t n_test = 500;
  double noise = 0.5;
  double separation = 3.0;
  std::uint64_t data_seed = 0;

  std::size_t thresholds = 3;
  double delta = 1.0;
  ThresholdPlacement placement = ThresholdPlacement::kUniform;

  std::vector<std::size_t> body_widths{512, 512, 512};
  std::size_t output_width = 200;
  GroupSumConfig readout;
  std::uint64_t net_seed = 0;

  TrainConfig ternary;
  TrainConfig binary;

  std::vector<std::size_t> widths() const;
};

/// Defaults of the desk-scale synthetic recipe for both architectures.
Recipe default_recipe();

struct PreparedData {
  SplitDataset split;
  EncoderConfig encoder;
  EncodedSet train;
  EncodedSet test;
};

PreparedData prepare_data(const Recipe& recipe, EncodingMode mode);

struct TernaryRun {
  PstNetwork net;
  Circuit circuit;
  History history;
  GapReport gap;
  CircuitPredictions predictions;
  double encoder_unknown_share = 0.0;  // on the test inputs
  double train_seconds = 0.0;
};

struct BinaryRun {
  BinaryDlgnNetwork net;
  Circuit circuit;
  History history;
  GapReport gap;
  CircuitPredictions predictions;
  double train_seconds = 0.0;
};

TernaryRun run_ternary(const Recipe& recipe, const PreparedData& data);
TernaryRun run_ternary(const Recipe& recipe);
BinaryRun run_binary(const Recipe& recipe, const PreparedData& data);
BinaryRun run_binary(const Recipe& recipe);

struct SeparationRow {
  double separation = 0.0;
  double ternary_accuracy = 0.0;
  double unknown_fraction = 0.0;
  double binary_accuracy = 0.0;
  double bayes_accuracy = 0.0;
  std::optional<std::string> error;
};

struct DeltaRow {
  double delta = 0.0;
  std::vector<double> accuracies;  // one per seed
  double mean_accuracy = 0.0;
  double unknown_fraction = 0.0;   // mean over seeds
  double encoder_unknown_share = 0.0;
  std::optional<std::string> error;
};

struct ResolutionRow {
  std::size_t resolution = 0;  // bins per feature; thresholds = resolution - 1
  std::size_t thresholds = 0;
  std::vector<std::size_t> body_widths;
  std::size_t input_dim = 0;
  double accuracy = 0.0;
  double unknown_fraction = 0.0;
  double encoder_unknown_share = 0.0;
  std::optional<std::string> error;
};

/// Trains both architectures per separation; a failing row records its error
/// and the sweep continues.
std::vector<SeparationRow> separation_sweep(const std::vector<double>& seps, const Recipe& recipe,
                                            bool with_binary = true);
std::vector<DeltaRow> delta_sweep(const std::vector<double>& deltas, const Recipe& recipe,
                                  const std::vector<std::uint64_t>& seeds);
/// Three body layers of 64 * resolution neurons each.
std::vector<std::size_t> resolution_body_widths(std::size_t resolution);
/// Resolutions must be >= 2.
std::vector<ResolutionRow> resolution_sweep(const std::vector<std::size_t>& resolutions, const Recipe& recipe);

struct BenchResult {
  std::size_t steps = 0;
  std::size_t warmup = 0;
  double ternary_seconds_per_step = 0.0;
  double binary_seconds_per_step = 0.0;
  double ratio = 0.0;  // binary / ternary
  bool high_variance = false;
};

/// Times training steps of both architectures at the recipe's widths,
/// excluding warmup steps.
BenchResult bench_step_time(const Recipe& recipe, std::size_t steps, std::size_t warmup);

}  // namespace pst
