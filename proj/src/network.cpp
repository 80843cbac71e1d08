#include "pst/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace pst {

namespace {

// Independent streams for wiring and parameters derived from one seed.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kWiringStream = 1;
constexpr std::uint64_t kParamStream = 2;

void check_widths(std::span<const std::size_t> widths, std::size_t input_dim) {
  if (widths.empty()) throw std::invalid_argument("widths must be nonempty");
  if (input_dim < 2) throw std::invalid_argument("input_dim must be >= 2");
  for (std::size_t w : widths) {
    if (w == 0) throw std::invalid_argument("layer widths must be positive");
  }
}

void check_range(std::span<const double> x, double lo, double hi) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lo - kInputSlack && x[i] <= hi + kInputSlack)) {
      throw std::invalid_argument("input " + std::to_string(i) + " out of range: " +
                                  std::to_string(x[i]));
    }
  }
}

}  // namespace

void GroupSumConfig::validate(std::size_t output_width) const {
  if (k < 2) throw std::invalid_argument("GroupSum needs k >= 2");
  if (!(tau > 0.0)) throw std::invalid_argument("GroupSum needs tau > 0");
  if (output_width % static_cast<std::size_t>(k) != 0) {
    throw std::invalid_argument("output width " + std::to_string(output_width) +
                                " not divisible by k=" + std::to_string(k));
  }
}

ConnectivityMap ConnectivityMap::generate(std::size_t input_dim,
                                          std::span<const std::size_t> widths,
                                          std::uint64_t seed) {
  check_widths(widths, input_dim);
  ConnectivityMap map;
  map.seed = seed;
  map.input_dim = input_dim;
  auto rng = stream(seed, kWiringStream);
  std::size_t prev = input_dim;
  for (std::size_t w : widths) {
    LayerWiring layer;
    layer.src_a.resize(w);
    layer.src_b.resize(w);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(prev - 1));
    for (std::size_t j = 0; j < w; ++j) {
      layer.src_a[j] = pick(rng);
      layer.src_b[j] = pick(rng);
    }
    map.layers.push_back(std::move(layer));
    prev = w;
  }
  return map;
}

std::size_t ConnectivityMap::neuron_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.width();
  return n;
}

std::vector<std::size_t> ConnectivityMap::widths() const {
  std::vector<std::size_t> w;
  for (const auto& l : layers) w.push_back(l.width());
  return w;
}

void ConnectivityMap::validate() const {
  if (layers.empty()) throw std::invalid_argument("network has no layers");
  if (input_dim < 2) throw std::invalid_argument("input_dim must be >= 2");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.width() == 0 || layer.src_b.size() != layer.src_a.size()) {
      throw std::invalid_argument("malformed wiring in layer " + std::to_string(l));
    }
    const std::size_t prev = fan_in_width(l);
    for (std::size_t j = 0; j < layer.width(); ++j) {
      if (layer.src_a[j] >= prev || layer.src_b[j] >= prev) {
        throw std::invalid_argument("parent index out of range in layer " + std::to_string(l) +
                                    ", neuron " + std::to_string(j));
      }
    }
  }
}

void PstNetwork::set_weights(std::size_t layer, std::size_t j, const PolyCoeffs9& p) {
  std::copy(p.w.begin(), p.w.end(), coeffs[layer].begin() + static_cast<std::ptrdiff_t>(9 * j));
}

void PstNetwork::validate() const {
  wiring.validate();
  readout.validate(wiring.output_width());
  if (coeffs.size() != wiring.depth()) throw std::invalid_argument("coefficient layer count mismatch");
  for (std::size_t l = 0; l < coeffs.size(); ++l) {
    if (coeffs[l].size() != 9 * wiring.width(l)) {
      throw std::invalid_argument("coefficient shape mismatch in layer " + std::to_string(l));
    }
    for (double v : coeffs[l]) {
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite coefficient in layer " + std::to_string(l));
    }
  }
}

PstNetwork init_network(std::span<const std::size_t> widths, std::size_t input_dim,
                        GroupSumConfig readout, std::uint64_t seed, double init_std) {
  PstNetwork net;
  net.wiring = ConnectivityMap::generate(input_dim, widths, seed);
  net.readout = readout;
  readout.validate(net.wiring.output_width());
  auto rng = stream(seed, kParamStream);
  std::normal_distribution<double> normal(0.0, init_std);
  for (std::size_t w : widths) {
    std::vector<double> layer(9 * w);
    for (double& v : layer) v = normal(rng);
    net.coeffs.push_back(std::move(layer));
  }
  return net;
}

std::vector<double> group_sum(std::span<const double> outputs, const GroupSumConfig& cfg) {
  cfg.validate(outputs.size());
  const std::size_t group = outputs.size() / static_cast<std::size_t>(cfg.k);
  std::vector<double> scores(static_cast<std::size_t>(cfg.k), 0.0);
  for (std::size_t c = 0; c < scores.size(); ++c) {
    double s = 0.0;
    for (std::size_t j = c * group; j < (c + 1) * group; ++j) s += outputs[j];
    scores[c] = s / cfg.tau;
  }
  return scores;
}

int argmax_lowest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<int>(best);
}

SoftForward forward_soft(const PstNetwork& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) throw std::invalid_argument("input dimension mismatch");
  check_range(x, -1.0, 1.0);
  SoftForward out;
  std::span<const double> prev = x;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto& wiring = net.wiring.layers[l];
    std::vector<double> pre(wiring.width());
    std::vector<double> post(wiring.width());
    for (std::size_t j = 0; j < wiring.width(); ++j) {
      pre[j] = eval_poly(net.weights(l, j), prev[wiring.src_a[j]], prev[wiring.src_b[j]]);
      post[j] = clip_unit(pre[j]);
    }
    out.pre.push_back(std::move(pre));
    out.activations.push_back(std::move(post));
    prev = out.activations.back();
  }
  out.scores = group_sum(out.activations.back(), net.readout);
  return out;
}

void load_batch(BatchTrace& trace, std::span<const double> rows, std::size_t dim, std::size_t batch) {
  trace.batch = batch;
  trace.inputs.resize(dim * batch);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t d = 0; d < dim; ++d) trace.inputs[d * batch + b] = rows[b * dim + d];
  }
}

void forward_batch(const PstNetwork& net, BatchTrace& trace) {
  const std::size_t batch = trace.batch;
  trace.pre.resize(net.depth());
  trace.post.resize(net.depth());
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto& wiring = net.wiring.layers[l];
    const std::vector<double>& prev = l == 0 ? trace.inputs : trace.post[l - 1];
    auto& pre = trace.pre[l];
    auto& post = trace.post[l];
    pre.resize(wiring.width() * batch);
    post.resize(wiring.width() * batch);
    for (std::size_t j = 0; j < wiring.width(); ++j) {
      const auto w = net.weights(l, j);
      const double* xa = prev.data() + wiring.src_a[j] * batch;
      const double* xb = prev.data() + wiring.src_b[j] * batch;
      double* p = pre.data() + j * batch;
      double* h = post.data() + j * batch;
      for (std::size_t b = 0; b < batch; ++b) {
        p[b] = eval_poly(w, xa[b], xb[b]);
        h[b] = clip_unit(p[b]);
      }
    }
  }
}

std::vector<double> batch_scores(const BatchTrace& trace, const GroupSumConfig& cfg) {
  const auto& out = trace.post.back();
  const std::size_t batch = trace.batch;
  const std::size_t width = out.size() / batch;
  cfg.validate(width);
  const std::size_t k = static_cast<std::size_t>(cfg.k);
  const std::size_t group = width / k;
  std::vector<double> scores(batch * k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = c * group; j < (c + 1) * group; ++j) {
      const double* h = out.data() + j * batch;
      for (std::size_t b = 0; b < batch; ++b) scores[b * k + c] += h[b];
    }
  }
  for (double& s : scores) s /= cfg.tau;
  return scores;
}

// ---------------------------------------------------------------------------

const std::array<std::array<double, 4>, kNumBooleanGates>& boolean_gate_forms() {
  static const std::array<std::array<double, 4>, kNumBooleanGates> forms = {{
      {0, 0, 0, 0},    // FALSE
      {0, 0, 0, 1},    // AND
      {0, 1, 0, -1},   // A AND NOT B
      {0, 1, 0, 0},    // A
      {0, 0, 1, -1},   // NOT A AND B
      {0, 0, 1, 0},    // B
      {0, 1, 1, -2},   // XOR
      {0, 1, 1, -1},   // OR
      {1, -1, -1, 1},  // NOR
      {1, -1, -1, 2},  // XNOR
      {1, 0, -1, 0},   // NOT B
      {1, 0, -1, 1},   // A OR NOT B
      {1, -1, 0, 0},   // NOT A
      {1, -1, 0, 1},   // NOT A OR B
      {1, 0, 0, -1},   // NAND
      {1, 0, 0, 0},    // TRUE
  }};
  return forms;
}

double boolean_gate_soft(std::size_t k, double a, double b) {
  const auto& f = boolean_gate_forms()[k];
  return f[0] + f[1] * a + f[2] * b + f[3] * a * b;
}

int boolean_gate_bit(std::size_t k, int a, int b) {
  return static_cast<int>(std::lround(boolean_gate_soft(k, a, b)));
}

void BinaryDlgnNetwork::validate() const {
  wiring.validate();
  readout.validate(wiring.output_width());
  if (logits.size() != wiring.depth()) throw std::invalid_argument("logit layer count mismatch");
  for (std::size_t l = 0; l < logits.size(); ++l) {
    if (logits[l].size() != kNumBooleanGates * wiring.width(l)) {
      throw std::invalid_argument("logit shape mismatch in layer " + std::to_string(l));
    }
  }
}

BinaryDlgnNetwork init_binary_network(std::span<const std::size_t> widths, std::size_t input_dim,
                                      GroupSumConfig readout, std::uint64_t seed) {
  BinaryDlgnNetwork net;
  net.wiring = ConnectivityMap::generate(input_dim, widths, seed);
  net.readout = readout;
  readout.validate(net.wiring.output_width());
  auto rng = stream(seed, kParamStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t w : widths) {
    std::vector<double> layer(kNumBooleanGates * w);
    for (double& v : layer) v = normal(rng);
    net.logits.push_back(std::move(layer));
  }
  return net;
}

std::array<double, kNumBooleanGates> softmax16(std::span<const double, 16> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::array<double, kNumBooleanGates> p{};
  double z = 0.0;
  for (std::size_t k = 0; k < kNumBooleanGates; ++k) {
    p[k] = std::exp(logits[k] - mx);
    z += p[k];
  }
  for (double& v : p) v /= z;
  return p;
}

BinaryForward forward_binary(const BinaryDlgnNetwork& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) throw std::invalid_argument("input dimension mismatch");
  check_range(x, 0.0, 1.0);
  BinaryForward out;
  std::span<const double> prev = x;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto& wiring = net.wiring.layers[l];
    std::vector<double> h(wiring.width());
    for (std::size_t j = 0; j < wiring.width(); ++j) {
      const auto p = softmax16(net.gate_logits(l, j));
      const double a = prev[wiring.src_a[j]];
      const double b = prev[wiring.src_b[j]];
      double s = 0.0;
      for (std::size_t k = 0; k < kNumBooleanGates; ++k) s += p[k] * boolean_gate_soft(k, a, b);
      h[j] = s;
    }
    out.activations.push_back(std::move(h));
    prev = out.activations.back();
  }
  out.scores = group_sum(out.activations.back(), net.readout);
  return out;
}

void forward_binary_batch(const BinaryDlgnNetwork& net, BatchTrace& trace,
                          std::vector<std::vector<double>>& probs) {
  const std::size_t batch = trace.batch;
  const auto& forms = boolean_gate_forms();
  trace.post.resize(net.depth());
  trace.pre.clear();
  probs.resize(net.depth());
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto& wiring = net.wiring.layers[l];
    const std::vector<double>& prev = l == 0 ? trace.inputs : trace.post[l - 1];
    auto& post = trace.post[l];
    post.resize(wiring.width() * batch);
    probs[l].resize(wiring.width() * kNumBooleanGates);
    for (std::size_t j = 0; j < wiring.width(); ++j) {
      const auto p = softmax16(net.gate_logits(l, j));
      std::copy(p.begin(), p.end(), probs[l].begin() + static_cast<std::ptrdiff_t>(j * kNumBooleanGates));
      const double* xa = prev.data() + wiring.src_a[j] * batch;
      const double* xb = prev.data() + wiring.src_b[j] * batch;
      double* h = post.data() + j * batch;
      for (std::size_t b = 0; b < batch; ++b) {
        const double a = xa[b];
        const double c = xb[b];
        const double ac = a * c;
        double s = 0.0;
        for (std::size_t k = 0; k < kNumBooleanGates; ++k) {
          const auto& f = forms[k];
          s += p[k] * (f[0] + f[1] * a + f[2] * c + f[3] * ac);
        }
        h[b] = s;
      }
    }
  }
}

}  // namespace pst
