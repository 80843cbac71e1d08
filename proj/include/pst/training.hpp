// Losses, regularizers, lambda annealing, analytic gradients, Adam, and the
// minibatch training loops for both architectures.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pst/data.hpp"
#include "pst/network.hpp"

namespace pst {

/// A non-finite loss during training.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(std::size_t step, const std::string& what)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

enum class LossKind { kMse, kCrossEntropy };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& name);

struct TrainConfig {
  std::size_t steps = 5000;
  std::size_t batch_size = 100;
  double learning_rate = 0.01;
  double lambda_max = 0.1;
  double gamma = 2.0;
  double fourier_weight = 0.0;  // beta
  LossKind loss = LossKind::kMse;
  std::uint64_t seed = 0;
  /// Record eval accuracy every this many steps (0 disables).
  std::size_t eval_every = 0;

  void validate() const;
};

/// lambda(t) = lambda_max * (t / T)^gamma.
double lambda_schedule(std::size_t t, const TrainConfig& cfg);

/// dist(x, {-1,0,+1})^2.
double lattice_distance_sq(double x);

/// Mean over neurons of (1/9) sum over the grid of squared lattice distance.
double commitment_loss(const PstNetwork& net);
/// Mean over neurons of the Fourier L1 norm of each neuron's polynomial.
double fourier_regularizer(const PstNetwork& net);

/// MSE against the one-hot target in score space, or softmax cross-entropy.
double task_loss(std::span<const double> scores, int target, LossKind kind);

struct GradientSet {
  std::vector<std::vector<double>> layers;
};

struct LossBreakdown {
  double task = 0.0;
  double commitment = 0.0;
  double fourier = 0.0;
  double lambda = 0.0;
  double total = 0.0;
};

/// task (mean over batch) + lambda(t) * R_A + beta * R_F.
LossBreakdown total_loss(const PstNetwork& net, const EncodedSet& batch, std::size_t t,
                         const TrainConfig& cfg);
GradientSet backward(const PstNetwork& net, const EncodedSet& batch, std::size_t t,
                     const TrainConfig& cfg);

/// Reusable buffers for repeated loss/gradient evaluation.
struct Workspace {
  BatchTrace trace;
  std::vector<std::vector<double>> grad_post;
  std::vector<std::vector<double>> probs;
  std::vector<double> batch_rows;
  std::vector<int> batch_labels;
};

/// Loss at an explicit lambda; fills `grad` when non-null.
LossBreakdown evaluate(const PstNetwork& net, std::span<const double> rows,
                       std::span<const int> labels, double lambda, const TrainConfig& cfg,
                       Workspace& ws, GradientSet* grad);

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t t = 0;
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& cfg);

struct StepRecord {
  std::size_t step = 0;
  double task_loss = 0.0;
  double commit_loss = 0.0;
  double lambda = 0.0;
  double total_loss = 0.0;
  std::optional<double> eval_accuracy;
};

struct History {
  std::vector<StepRecord> records;
};

/// Soft argmax accuracy on an encoded set.
double soft_accuracy(const PstNetwork& net, const EncodedSet& set);
double soft_accuracy(const BinaryDlgnNetwork& net, const EncodedSet& set);

/// Runs cfg.steps minibatch Adam steps in place. Throws NumericalFailure on a
/// non-finite loss.
History train(PstNetwork& net, const EncodedSet& data, const TrainConfig& cfg,
              const EncodedSet* eval = nullptr);

// Binary baseline -----------------------------------------------------------

double binary_total_loss(const BinaryDlgnNetwork& net, const EncodedSet& batch,
                         const TrainConfig& cfg);
GradientSet binary_backward(const BinaryDlgnNetwork& net, const EncodedSet& batch,
                            const TrainConfig& cfg);
double evaluate_binary(const BinaryDlgnNetwork& net, std::span<const double> rows,
                       std::span<const int> labels, const TrainConfig& cfg, Workspace& ws,
                       GradientSet* grad);
History train_binary(BinaryDlgnNetwork& net, const EncodedSet& data, const TrainConfig& cfg,
                     const EncodedSet* eval = nullptr);

}  // namespace pst
