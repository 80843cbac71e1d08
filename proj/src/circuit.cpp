#include "pst/circuit.hpp"

#include <algorithm>
#include <stdexcept>

#include "pst/training.hpp"

namespace pst {

void Circuit::validate() const {
  wiring.validate();
  readout.validate(wiring.output_width());
  if (gates.size() != wiring.depth()) throw std::invalid_argument("circuit layer count mismatch");
  for (std::size_t l = 0; l < gates.size(); ++l) {
    if (gates[l].size() != wiring.width(l)) {
      throw std::invalid_argument("gate count mismatch in layer " + std::to_string(l));
    }
    for (GateId g : gates[l]) {
      if (g.value >= kNumGates) throw std::invalid_argument("gate id out of range in layer " + std::to_string(l));
    }
  }
}

Circuit harden_network(const PstNetwork& net) {
  net.validate();
  Circuit c;
  c.wiring = net.wiring;
  c.readout = net.readout;
  c.provenance.source_arch = "ternary";
  c.gates.resize(net.depth());
  for (std::size_t l = 0; l < net.depth(); ++l) {
    c.gates[l].reserve(net.wiring.width(l));
    for (std::size_t j = 0; j < net.wiring.width(l); ++j) c.gates[l].push_back(harden_neuron(net.weights(l, j)));
  }
  return c;
}

TruthTable9 kleene_extension(std::size_t boolean_gate) {
  if (boolean_gate >= kNumBooleanGates) throw std::out_of_range("boolean gate index out of range");
  auto completions = [](int t) -> std::vector<int> {
    if (t == 0) return {0, 1};
    return {t > 0 ? 1 : 0};
  };
  return tabulate([&](int a, int b) {
    int seen = 0;  // bitmask of observed outputs
    for (int ba : completions(a)) {
      for (int bb : completions(b)) seen |= 1 << boolean_gate_bit(boolean_gate, ba, bb);
    }
    if (seen == 1) return -1;
    if (seen == 2) return 1;
    return 0;
  });
}

std::size_t select_boolean_gate(std::span<const double, 16> logits) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < logits.size(); ++k) {
    if (logits[k] > logits[best]) best = k;
  }
  return best;
}

Circuit harden_binary(const BinaryDlgnNetwork& net) {
  net.validate();
  std::array<GateId, kNumBooleanGates> embedded;
  for (std::size_t k = 0; k < kNumBooleanGates; ++k) embedded[k] = encode(kleene_extension(k));
  Circuit c;
  c.wiring = net.wiring;
  c.readout = net.readout;
  c.provenance.source_arch = "binary";
  c.gates.resize(net.depth());
  for (std::size_t l = 0; l < net.depth(); ++l) {
    c.gates[l].reserve(net.wiring.width(l));
    for (std::size_t j = 0; j < net.wiring.width(l); ++j) {
      c.gates[l].push_back(embedded[select_boolean_gate(net.gate_logits(l, j))]);
    }
  }
  return c;
}

PstNetwork exact_network(const Circuit& circuit) {
  circuit.validate();
  PstNetwork net;
  net.wiring = circuit.wiring;
  net.readout = circuit.readout;
  net.coeffs.resize(circuit.depth());
  for (std::size_t l = 0; l < circuit.depth(); ++l) {
    net.coeffs[l].assign(9 * circuit.wiring.width(l), 0.0);
    for (std::size_t j = 0; j < circuit.wiring.width(l); ++j) {
      net.set_weights(l, j, coeffs_of_table(decode(circuit.gates[l][j])));
    }
  }
  return net;
}

double score_margin(std::span<const double> scores) {
  if (scores.size() < 2) return 0.0;
  double top = scores[0];
  double second = scores[1];
  if (second > top) std::swap(top, second);
  for (std::size_t c = 2; c < scores.size(); ++c) {
    if (scores[c] > top) {
      second = top;
      top = scores[c];
    } else if (scores[c] > second) {
      second = scores[c];
    }
  }
  return top - second;
}

CircuitEvaluator::CircuitEvaluator(const Circuit& circuit) : circuit_(circuit) {
  circuit_.validate();
  rows_.resize(circuit_.depth());
  for (std::size_t l = 0; l < circuit_.depth(); ++l) {
    rows_[l].resize(circuit_.gates[l].size());
    for (std::size_t j = 0; j < circuit_.gates[l].size(); ++j) {
      const TruthTable9 t = decode(circuit_.gates[l][j]);
      for (std::size_t i = 0; i < kGridSize; ++i) rows_[l][j][i] = static_cast<std::int8_t>(to_int(t.entries[i]));
    }
  }
}

void CircuitEvaluator::run(std::span<const Trit> x, std::vector<std::vector<std::int8_t>>& values) const {
  if (x.size() != circuit_.input_dim()) throw std::invalid_argument("circuit input dimension mismatch");
  std::vector<std::int8_t> in(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) in[i] = static_cast<std::int8_t>(to_int(x[i]));
  values.resize(circuit_.depth());
  for (std::size_t l = 0; l < circuit_.depth(); ++l) {
    const auto& prev = l == 0 ? in : values[l - 1];
    const auto& w = circuit_.wiring.layers[l];
    auto& out = values[l];
    out.resize(w.width());
    for (std::size_t j = 0; j < w.width(); ++j) {
      out[j] = rows_[l][j][static_cast<std::size_t>(3 * (prev[w.src_a[j]] + 1) + (prev[w.src_b[j]] + 1))];
    }
  }
}

CircuitOutput CircuitEvaluator::eval(std::span<const Trit> x) const {
  std::vector<std::vector<std::int8_t>> values;
  run(x, values);
  CircuitOutput out;
  const auto& last = values.back();
  out.outputs.reserve(last.size());
  std::vector<double> reals(last.size());
  for (std::size_t j = 0; j < last.size(); ++j) {
    out.outputs.push_back(static_cast<Trit>(last[j]));
    reals[j] = last[j];
  }
  out.scores = group_sum(reals, circuit_.readout);
  out.predicted = argmax_lowest(out.scores);
  out.margin = score_margin(out.scores);
  return out;
}

std::vector<std::vector<Trit>> CircuitEvaluator::trace(std::span<const Trit> x) const {
  std::vector<std::vector<std::int8_t>> values;
  run(x, values);
  std::vector<std::vector<Trit>> out(values.size());
  for (std::size_t l = 0; l < values.size(); ++l) {
    out[l].reserve(values[l].size());
    for (auto v : values[l]) out[l].push_back(static_cast<Trit>(v));
  }
  return out;
}

CircuitOutput eval_circuit(const Circuit& circuit, std::span<const Trit> x) {
  return CircuitEvaluator(circuit).eval(x);
}

double hardening_error(const PstNetwork& net) {
  double total = 0.0;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    for (std::size_t j = 0; j < net.wiring.width(l); ++j) {
      const GridValues t = table_of(net.weights(l, j));
      const GridValues r = round_table(t).as_reals();
      double sq = 0.0;
      for (std::size_t i = 0; i < kGridSize; ++i) sq += (t[i] - r[i]) * (t[i] - r[i]);
      total += sq / 9.0;
    }
  }
  return total / static_cast<double>(net.neuron_count());
}

double CircuitPredictions::accuracy() const {
  if (labels.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predicted[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double CircuitPredictions::unknown_fraction() const {
  return total_outputs == 0 ? 0.0 : static_cast<double>(unknown_outputs) / static_cast<double>(total_outputs);
}

CircuitPredictions predict_all(const Circuit& circuit, const EncodedSet& set) {
  if (set.size() == 0) throw DataError("evaluation set is empty");
  const CircuitEvaluator ev(circuit);
  CircuitPredictions p;
  p.predicted.reserve(set.size());
  p.margin.reserve(set.size());
  p.labels = set.y;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto out = ev.eval(set.trits(i));
    p.predicted.push_back(out.predicted);
    p.margin.push_back(out.margin);
    p.unknown_outputs += static_cast<std::size_t>(std::count(out.outputs.begin(), out.outputs.end(), Trit::kUnknown));
    p.total_outputs += out.outputs.size();
  }
  return p;
}

namespace {

GapReport finish_report(double soft, const Circuit& circuit, const EncodedSet& set) {
  const auto p = predict_all(circuit, set);
  GapReport r;
  r.samples = set.size();
  r.soft_accuracy = soft;
  r.circuit_accuracy = p.accuracy();
  r.gap_pp = 100.0 * (r.soft_accuracy - r.circuit_accuracy);
  r.unknown_fraction = p.unknown_fraction();
  return r;
}

}  // namespace

GapReport gap_report(const PstNetwork& net, const Circuit& circuit, const EncodedSet& set) {
  if (set.size() == 0) throw DataError("evaluation set is empty");
  auto r = finish_report(soft_accuracy(net, set), circuit, set);
  r.hardening_error = hardening_error(net);
  return r;
}

GapReport gap_report(const BinaryDlgnNetwork& net, const Circuit& circuit, const EncodedSet& set) {
  if (set.size() == 0) throw DataError("evaluation set is empty");
  return finish_report(soft_accuracy(net, set), circuit, set);
}

}  // namespace pst
