#include "pst/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pst/fourier.hpp"

namespace pst {

namespace {

// Nearest lattice value for differentiation; at the +-0.5 breakpoints this is
// the value approached from the left.
double left_nearest(double x) {
  if (x > 0.5) return 1.0;
  if (x > -0.5) return 0.0;
  return -1.0;
}

// Per-sample task losses and d(mean loss)/d(score), row-major [b * k + c].
double task_losses(std::span<const double> scores, std::span<const int> labels, int k,
                   LossKind kind, std::vector<double>* dscores) {
  const std::size_t batch = labels.size();
  double total = 0.0;
  if (dscores) dscores->assign(scores.size(), 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    const auto s = scores.subspan(b * static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    total += task_loss(s, labels[b], kind);
    if (!dscores) continue;
    double* d = dscores->data() + b * static_cast<std::size_t>(k);
    if (kind == LossKind::kMse) {
      for (int c = 0; c < k; ++c) {
        const double target = c == labels[b] ? 1.0 : 0.0;
        d[c] = 2.0 * (s[static_cast<std::size_t>(c)] - target) / k / static_cast<double>(batch);
      }
    } else {
      const double mx = *std::max_element(s.begin(), s.end());
      double z = 0.0;
      for (double v : s) z += std::exp(v - mx);
      for (int c = 0; c < k; ++c) {
        const double p = std::exp(s[static_cast<std::size_t>(c)] - mx) / z;
        d[c] = (p - (c == labels[b] ? 1.0 : 0.0)) / static_cast<double>(batch);
      }
    }
  }
  return total / static_cast<double>(batch);
}

// Seeds d(loss)/d(output activation) for the last layer from score gradients.
void seed_output_gradient(const std::vector<double>& dscores, const GroupSumConfig& readout,
                          std::size_t width, std::size_t batch, std::vector<double>& gpost) {
  const std::size_t k = static_cast<std::size_t>(readout.k);
  const std::size_t group = width / k;
  gpost.assign(width * batch, 0.0);
  for (std::size_t j = 0; j < width; ++j) {
    const std::size_t c = j / group;
    for (std::size_t b = 0; b < batch; ++b) gpost[j * batch + b] = dscores[b * k + c] / readout.tau;
  }
}

class MinibatchSampler {
 public:
  MinibatchSampler(std::size_t n, std::uint64_t seed) : order_(n), rng_(seed) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  void fill(const EncodedSet& data, std::size_t batch, Workspace& ws) {
    ws.batch_rows.resize(batch * data.dim);
    ws.batch_labels.resize(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      if (cursor_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        cursor_ = 0;
      }
      const std::size_t i = order_[cursor_++];
      const auto r = data.row(i);
      std::copy(r.begin(), r.end(), ws.batch_rows.begin() + static_cast<std::ptrdiff_t>(b * data.dim));
      ws.batch_labels[b] = data.y[i];
    }
  }

 private:
  std::vector<std::size_t> order_;
  std::mt19937_64 rng_;
  std::size_t cursor_ = 0;
};

void check_data(const EncodedSet& data, std::size_t input_dim, const GroupSumConfig& readout) {
  if (data.size() == 0) throw DataError("training set is empty");
  if (data.dim != input_dim) throw DataError("encoded dimension does not match network input");
  if (data.num_classes > readout.k) throw DataError("dataset has more classes than GroupSum k");
}

}  // namespace

std::string to_string(LossKind kind) { return kind == LossKind::kMse ? "mse" : "cross_entropy"; }

LossKind parse_loss_kind(const std::string& name) {
  if (name == "mse") return LossKind::kMse;
  if (name == "cross_entropy" || name == "ce") return LossKind::kCrossEntropy;
  throw std::invalid_argument("unknown loss kind: " + name);
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(lambda_max >= 0.0)) throw std::invalid_argument("lambda_max must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(fourier_weight >= 0.0)) throw std::invalid_argument("fourier weight must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
}

double lambda_schedule(std::size_t t, const TrainConfig& cfg) {
  if (cfg.steps == 0) return cfg.lambda_max;
  const double frac = std::min(1.0, static_cast<double>(t) / static_cast<double>(cfg.steps));
  return cfg.lambda_max * std::pow(frac, cfg.gamma);
}

double lattice_distance_sq(double x) {
  const double d = x - to_real(round_to_trit(x));
  return d * d;
}

double commitment_loss(const PstNetwork& net) {
  double total = 0.0;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    for (std::size_t j = 0; j < net.wiring.width(l); ++j) {
      for (double v : table_of(net.weights(l, j))) total += lattice_distance_sq(v);
    }
  }
  return total / (9.0 * static_cast<double>(net.neuron_count()));
}

double fourier_regularizer(const PstNetwork& net) {
  double total = 0.0;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    for (std::size_t j = 0; j < net.wiring.width(l); ++j) {
      total += fourier_l1(monomial_to_fourier(net.weights(l, j)));
    }
  }
  return total / static_cast<double>(net.neuron_count());
}

double task_loss(std::span<const double> scores, int target, LossKind kind) {
  if (target < 0 || static_cast<std::size_t>(target) >= scores.size()) {
    throw std::out_of_range("target class out of range");
  }
  if (kind == LossKind::kMse) {
    double s = 0.0;
    for (std::size_t c = 0; c < scores.size(); ++c) {
      const double d = scores[c] - (static_cast<int>(c) == target ? 1.0 : 0.0);
      s += d * d;
    }
    return s / static_cast<double>(scores.size());
  }
  const double mx = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double v : scores) z += std::exp(v - mx);
  return mx + std::log(z) - scores[static_cast<std::size_t>(target)];
}

LossBreakdown evaluate(const PstNetwork& net, std::span<const double> rows,
                       std::span<const int> labels, double lambda, const TrainConfig& cfg,
                       Workspace& ws, GradientSet* grad) {
  const std::size_t batch = labels.size();
  const std::size_t depth = net.depth();
  load_batch(ws.trace, rows, net.input_dim(), batch);
  forward_batch(net, ws.trace);
  const auto scores = batch_scores(ws.trace, net.readout);

  LossBreakdown out;
  out.lambda = lambda;
  std::vector<double> dscores;
  out.task = task_losses(scores, labels, net.readout.k, cfg.loss, grad ? &dscores : nullptr);

  const double n_neurons = static_cast<double>(net.neuron_count());
  const auto& vand = vandermonde();
  const auto& to_fourier = monomial_to_fourier_matrix();
  const bool want_fourier = cfg.fourier_weight > 0.0;

  if (grad) {
    grad->layers.resize(depth);
    ws.grad_post.resize(depth);
    seed_output_gradient(dscores, net.readout, net.wiring.output_width(), batch, ws.grad_post[depth - 1]);
  }

  double commit_sum = 0.0;
  double fourier_sum = 0.0;
  for (std::size_t li = depth; li-- > 0;) {
    const auto& wiring = net.wiring.layers[li];
    const std::size_t width = wiring.width();
    const std::vector<double>& prev = li == 0 ? ws.trace.inputs : ws.trace.post[li - 1];
    std::vector<double>* gprev = nullptr;
    if (grad) {
      grad->layers[li].assign(9 * width, 0.0);
      if (li > 0) {
        gprev = &ws.grad_post[li - 1];
        gprev->assign(prev.size(), 0.0);
      }
    }
    for (std::size_t j = 0; j < width; ++j) {
      const auto w = net.weights(li, j);
      const GridValues t = table_of(w);
      double gt[9];
      for (std::size_t i = 0; i < 9; ++i) {
        commit_sum += lattice_distance_sq(t[i]);
        gt[i] = 2.0 * (t[i] - left_nearest(t[i]));
      }
      FourierCoeffs9 fhat;
      if (want_fourier) {
        fhat = monomial_to_fourier(w);
        fourier_sum += fourier_l1(fhat);
      }
      if (!grad) continue;

      double acc[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
      const double* g = ws.grad_post[li].data() + j * batch;
      const double* pre = ws.trace.pre[li].data() + j * batch;
      const double* xa = prev.data() + wiring.src_a[j] * batch;
      const double* xb = prev.data() + wiring.src_b[j] * batch;
      for (std::size_t b = 0; b < batch; ++b) {
        const double gb = g[b];
        if (gb == 0.0 || pre[b] < -1.0 || pre[b] > 1.0) continue;
        const double a = xa[b];
        const double c = xb[b];
        const double a2 = a * a;
        const double c2 = c * c;
        acc[0] += gb;
        acc[1] += gb * a;
        acc[2] += gb * c;
        acc[3] += gb * a * c;
        acc[4] += gb * a2;
        acc[5] += gb * c2;
        acc[6] += gb * a2 * c;
        acc[7] += gb * a * c2;
        acc[8] += gb * a2 * c2;
        if (gprev) {
          const double da = (w[1] + 2.0 * a * w[4]) + c * (w[3] + 2.0 * a * w[6]) +
                            c2 * (w[7] + 2.0 * a * w[8]);
          const double db = (w[2] + a * w[3] + a2 * w[6]) + 2.0 * c * (w[5] + a * w[7] + a2 * w[8]);
          (*gprev)[wiring.src_a[j] * batch + b] += gb * da;
          (*gprev)[wiring.src_b[j] * batch + b] += gb * db;
        }
      }
      double* gw = grad->layers[li].data() + 9 * j;
      const double commit_scale = lambda / (9.0 * n_neurons);
      for (std::size_t k = 0; k < 9; ++k) {
        double r = 0.0;
        for (std::size_t i = 0; i < 9; ++i) r += gt[i] * vand[i][k];
        gw[k] = acc[k] + commit_scale * r;
      }
      if (want_fourier) {
        const double scale = cfg.fourier_weight / n_neurons;
        for (std::size_t r = 0; r < 9; ++r) {
          const double s = fhat.c[r] > 0.0 ? 1.0 : (fhat.c[r] < 0.0 ? -1.0 : 0.0);
          if (s == 0.0) continue;
          for (std::size_t k = 0; k < 9; ++k) gw[k] += scale * s * to_fourier[r][k];
        }
      }
    }
  }
  out.commitment = commit_sum / (9.0 * n_neurons);
  out.fourier = want_fourier ? fourier_sum / n_neurons : 0.0;
  out.total = out.task + lambda * out.commitment + cfg.fourier_weight * out.fourier;
  return out;
}

LossBreakdown total_loss(const PstNetwork& net, const EncodedSet& batch, std::size_t t,
                         const TrainConfig& cfg) {
  Workspace ws;
  return evaluate(net, batch.x, batch.y, lambda_schedule(t, cfg), cfg, ws, nullptr);
}

GradientSet backward(const PstNetwork& net, const EncodedSet& batch, std::size_t t,
                     const TrainConfig& cfg) {
  Workspace ws;
  GradientSet g;
  evaluate(net, batch.x, batch.y, lambda_schedule(t, cfg), cfg, ws, &g);
  return g;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& cfg) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam: shape mismatch");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.t = 0;
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

double soft_accuracy(const PstNetwork& net, const EncodedSet& set) {
  if (set.size() == 0) throw DataError("evaluation set is empty");
  constexpr std::size_t kChunk = 256;
  BatchTrace trace;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < set.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, set.size() - start);
    load_batch(trace, std::span<const double>(set.x).subspan(start * set.dim, n * set.dim), set.dim, n);
    forward_batch(net, trace);
    const auto scores = batch_scores(trace, net.readout);
    const std::size_t k = static_cast<std::size_t>(net.readout.k);
    for (std::size_t b = 0; b < n; ++b) {
      if (argmax_lowest(std::span<const double>(scores).subspan(b * k, k)) == set.y[start + b]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

double soft_accuracy(const BinaryDlgnNetwork& net, const EncodedSet& set) {
  if (set.size() == 0) throw DataError("evaluation set is empty");
  constexpr std::size_t kChunk = 256;
  BatchTrace trace;
  std::vector<std::vector<double>> probs;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < set.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, set.size() - start);
    load_batch(trace, std::span<const double>(set.x).subspan(start * set.dim, n * set.dim), set.dim, n);
    forward_binary_batch(net, trace, probs);
    const auto scores = batch_scores(trace, net.readout);
    const std::size_t k = static_cast<std::size_t>(net.readout.k);
    for (std::size_t b = 0; b < n; ++b) {
      if (argmax_lowest(std::span<const double>(scores).subspan(b * k, k)) == set.y[start + b]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

History train(PstNetwork& net, const EncodedSet& data, const TrainConfig& cfg,
              const EncodedSet* eval) {
  cfg.validate();
  net.validate();
  History history;
  if (cfg.steps == 0) return history;
  check_data(data, net.input_dim(), net.readout);

  const std::size_t batch = std::min(cfg.batch_size, data.size());
  MinibatchSampler sampler(data.size(), cfg.seed);
  Workspace ws;
  GradientSet grad;
  std::vector<AdamState> adam(net.depth());
  const AdamConfig adam_cfg{cfg.learning_rate};
  history.records.reserve(cfg.steps);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    sampler.fill(data, batch, ws);
    const double lambda = lambda_schedule(step + 1, cfg);
    const auto loss = evaluate(net, ws.batch_rows, ws.batch_labels, lambda, cfg, ws, &grad);
    if (!std::isfinite(loss.total)) throw NumericalFailure(step, "non-finite loss");
    for (std::size_t l = 0; l < net.depth(); ++l) adam_step(net.coeffs[l], grad.layers[l], adam[l], adam_cfg);

    StepRecord rec{step, loss.task, loss.commitment, lambda, loss.total, std::nullopt};
    if (eval && cfg.eval_every > 0 && (step + 1) % cfg.eval_every == 0) {
      rec.eval_accuracy = soft_accuracy(net, *eval);
    }
    history.records.push_back(rec);
  }
  return history;
}

// ---------------------------------------------------------------------------

double evaluate_binary(const BinaryDlgnNetwork& net, std::span<const double> rows,
                       std::span<const int> labels, const TrainConfig& cfg, Workspace& ws,
                       GradientSet* grad) {
  const std::size_t batch = labels.size();
  const std::size_t depth = net.depth();
  load_batch(ws.trace, rows, net.input_dim(), batch);
  forward_binary_batch(net, ws.trace, ws.probs);
  const auto scores = batch_scores(ws.trace, net.readout);
  std::vector<double> dscores;
  const double loss = task_losses(scores, labels, net.readout.k, cfg.loss, grad ? &dscores : nullptr);
  if (!grad) return loss;

  const auto& forms = boolean_gate_forms();
  grad->layers.resize(depth);
  ws.grad_post.resize(depth);
  seed_output_gradient(dscores, net.readout, net.wiring.output_width(), batch, ws.grad_post[depth - 1]);
  for (std::size_t li = depth; li-- > 0;) {
    const auto& wiring = net.wiring.layers[li];
    const std::size_t width = wiring.width();
    const std::vector<double>& prev = li == 0 ? ws.trace.inputs : ws.trace.post[li - 1];
    std::vector<double>* gprev = nullptr;
    grad->layers[li].assign(kNumBooleanGates * width, 0.0);
    if (li > 0) {
      gprev = &ws.grad_post[li - 1];
      gprev->assign(prev.size(), 0.0);
    }
    for (std::size_t j = 0; j < width; ++j) {
      const double* p = ws.probs[li].data() + j * kNumBooleanGates;
      double da_lin = 0.0, db_lin = 0.0, dab = 0.0;
      for (std::size_t k = 0; k < kNumBooleanGates; ++k) {
        da_lin += p[k] * forms[k][1];
        db_lin += p[k] * forms[k][2];
        dab += p[k] * forms[k][3];
      }
      double acc[kNumBooleanGates] = {};
      const double* g = ws.grad_post[li].data() + j * batch;
      const double* h = ws.trace.post[li].data() + j * batch;
      const double* xa = prev.data() + wiring.src_a[j] * batch;
      const double* xb = prev.data() + wiring.src_b[j] * batch;
      for (std::size_t b = 0; b < batch; ++b) {
        const double gb = g[b];
        if (gb == 0.0) continue;
        const double a = xa[b];
        const double c = xb[b];
        const double ac = a * c;
        for (std::size_t k = 0; k < kNumBooleanGates; ++k) {
          const auto& f = forms[k];
          const double gk = f[0] + f[1] * a + f[2] * c + f[3] * ac;
          acc[k] += gb * p[k] * (gk - h[b]);
        }
        if (gprev) {
          (*gprev)[wiring.src_a[j] * batch + b] += gb * (da_lin + dab * c);
          (*gprev)[wiring.src_b[j] * batch + b] += gb * (db_lin + dab * a);
        }
      }
      std::copy(acc, acc + kNumBooleanGates,
                grad->layers[li].begin() + static_cast<std::ptrdiff_t>(j * kNumBooleanGates));
    }
  }
  return loss;
}

double binary_total_loss(const BinaryDlgnNetwork& net, const EncodedSet& batch,
                         const TrainConfig& cfg) {
  Workspace ws;
  return evaluate_binary(net, batch.x, batch.y, cfg, ws, nullptr);
}

GradientSet binary_backward(const BinaryDlgnNetwork& net, const EncodedSet& batch,
                            const TrainConfig& cfg) {
  Workspace ws;
  GradientSet g;
  evaluate_binary(net, batch.x, batch.y, cfg, ws, &g);
  return g;
}

History train_binary(BinaryDlgnNetwork& net, const EncodedSet& data, const TrainConfig& cfg,
                     const EncodedSet* eval) {
  cfg.validate();
  net.validate();
  History history;
  if (cfg.steps == 0) return history;
  check_data(data, net.input_dim(), net.readout);

  const std::size_t batch = std::min(cfg.batch_size, data.size());
  MinibatchSampler sampler(data.size(), cfg.seed);
  Workspace ws;
  GradientSet grad;
  std::vector<AdamState> adam(net.depth());
  const AdamConfig adam_cfg{cfg.learning_rate};
  history.records.reserve(cfg.steps);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    sampler.fill(data, batch, ws);
    const double loss = evaluate_binary(net, ws.batch_rows, ws.batch_labels, cfg, ws, &grad);
    if (!std::isfinite(loss)) throw NumericalFailure(step, "non-finite loss");
    for (std::size_t l = 0; l < net.depth(); ++l) adam_step(net.logits[l], grad.layers[l], adam[l], adam_cfg);

    StepRecord rec{step, loss, 0.0, 0.0, loss, std::nullopt};
    if (eval && cfg.eval_every > 0 && (step + 1) % cfg.eval_every == 0) {
      rec.eval_accuracy = soft_accuracy(net, *eval);
    }
    history.records.push_back(rec);
  }
  return history;
}

}  // namespace pst
