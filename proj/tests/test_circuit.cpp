#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "pst/circuit.hpp"
#include "pst/training.hpp"

using namespace pst;

namespace {

int bit_oracle(std::size_t k, int a, int b) { return static_cast<int>((k >> (3 - (2 * a + b))) & 1u); }

// Completions of a trit to bits: FALSE -> {0}, TRUE -> {1}, UNKNOWN -> {0, 1}.
std::vector<int> completions(int t) {
  if (t < 0) return {0};
  if (t > 0) return {1};
  return {0, 1};
}

TruthTable9 extension_oracle(std::size_t k) {
  TruthTable9 t;
  for (std::size_t i = 0; i < 9; ++i) {
    const auto p = grid_point(i);
    std::set<int> outs;
    for (int a : completions(p.a)) {
      for (int b : completions(p.b)) outs.insert(bit_oracle(k, a, b));
    }
    t.entries[i] = outs.size() > 1 ? Trit::kUnknown : (*outs.begin() ? Trit::kTrue : Trit::kFalse);
  }
  return t;
}

EncodedSet all_trit_inputs(std::size_t dim) {
  EncodedSet s;
  s.dim = dim;
  std::size_t n = 1;
  for (std::size_t d = 0; d < dim; ++d) n *= 3;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = i;
    for (std::size_t d = 0; d < dim; ++d) {
      s.x.push_back(static_cast<double>(r % 3) - 1.0);
      r /= 3;
    }
    s.y.push_back(static_cast<int>(i % 2));
  }
  return s;
}

std::vector<Trit> as_trits(std::span<const double> row) {
  std::vector<Trit> t;
  for (double v : row) t.push_back(trit_from_int(static_cast<int>(v)));
  return t;
}

}  // namespace

TEST_CASE("hardening identity") {
  const std::vector<std::size_t> widths = {30, 20, 10};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto net = init_network(widths, 4, GroupSumConfig{2, 1.0}, seed);
    const auto c = harden_network(net);
    // Per neuron, the rounded table's coefficients sit at the hardening distance.
    double rhs = 0.0;
    for (std::size_t l = 0; l < net.depth(); ++l) {
      for (std::size_t j = 0; j < net.wiring.width(l); ++j) {
        const auto t = table_of(net.weights(l, j));
        const auto hard = decode(c.gates[l][j]).as_reals();
        const auto w_hat = coeffs_of_table(hard);
        const auto t_hat = table_of(w_hat);
        for (std::size_t i = 0; i < 9; ++i) {
          rhs += (t[i] - t_hat[i]) * (t[i] - t_hat[i]) / 9.0;
        }
      }
    }
    rhs /= static_cast<double>(net.neuron_count());
    CHECK(hardening_error(net) == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(hardening_error(net) == doctest::Approx(commitment_loss(net)).epsilon(1e-12));
  }
}

TEST_CASE("hardening is idempotent and exact networks reproduce circuits") {
  const std::vector<std::size_t> widths = {12, 9, 6};
  const auto net = init_network(widths, 3, GroupSumConfig{3, 2.0}, 4);
  const auto c = harden_network(net);
  CHECK_NOTHROW(c.validate());
  CHECK(c.wiring == net.wiring);
  CHECK(c.provenance.source_arch == "ternary");
  const auto exact = exact_network(c);
  CHECK(hardening_error(exact) <= 1e-20);
  auto again = harden_network(exact);
  again.provenance = c.provenance;
  CHECK(again == c);

  const auto inputs = all_trit_inputs(3);
  const CircuitEvaluator ev(c);
  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto soft = forward_soft(exact, inputs.row(i));
    const auto x = as_trits(inputs.row(i));
    const auto out = ev.eval(x);
    const auto tr = ev.trace(x);
    for (std::size_t l = 0; l < widths.size(); ++l) {
      for (std::size_t j = 0; j < widths[l]; ++j) {
        worst = std::max(worst, std::abs(soft.activations[l][j] - to_real(tr[l][j])));
      }
    }
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(soft.scores[k] - out.scores[k]));
    CHECK(out.predicted == argmax_lowest(soft.scores));
  }
  CHECK(worst <= 1e-9);

  const auto rep = gap_report(exact, c, inputs);
  CHECK(rep.gap_pp == 0.0);
  CHECK(rep.samples == 27);
  REQUIRE(rep.hardening_error.has_value());
  CHECK(*rep.hardening_error <= 1e-20);
}

TEST_CASE("all-unknown circuit") {
  const std::vector<std::size_t> widths = {6, 4};
  Circuit c;
  c.wiring = ConnectivityMap::generate(3, widths, 0);
  c.readout = {2, 1.0};
  c.gates = {std::vector<GateId>(6, GateId{9841}), std::vector<GateId>(4, GateId{9841})};
  const auto inputs = all_trit_inputs(3);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto out = eval_circuit(c, as_trits(inputs.row(i)));
    for (Trit t : out.outputs) CHECK(t == Trit::kUnknown);
    CHECK(out.scores[0] == 0.0);
    CHECK(out.predicted == 0);
    CHECK(out.margin == 0.0);
  }
  const auto p = predict_all(c, inputs);
  CHECK(p.unknown_fraction() == 1.0);
  CHECK(p.total_outputs == 4 * 27);
}

TEST_CASE("pass-through chain") {
  Circuit c;
  c.wiring.input_dim = 4;
  c.readout = {2, 1.0};
  const auto pass = encode(kleene_gate(KleeneKind::kPassA));
  for (int l = 0; l < 5; ++l) {
    c.wiring.layers.push_back(LayerWiring{{0, 1, 2, 3}, {3, 2, 1, 0}});
    c.gates.push_back(std::vector<GateId>(4, pass));
  }
  CHECK_NOTHROW(c.validate());
  const auto inputs = all_trit_inputs(4);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto x = as_trits(inputs.row(i));
    const auto out = eval_circuit(c, x);
    CHECK(out.outputs == x);
  }
  const std::vector<Trit> shorter(3, Trit::kTrue);
  CHECK_THROWS_AS(eval_circuit(c, shorter), std::invalid_argument);

  auto bad = c;
  bad.gates[2].pop_back();
  CHECK_THROWS(bad.validate());
}

TEST_CASE("score margin") {
  const std::vector<double> s = {0.3, 0.9, 0.5};
  CHECK(score_margin(s) == doctest::Approx(0.4));
  const std::vector<double> one = {0.7};
  CHECK(score_margin(one) == 0.0);
  const std::vector<double> tie = {0.2, 0.2};
  CHECK(score_margin(tie) == 0.0);
}

TEST_CASE("kleene extension of boolean gates") {
  for (std::size_t k = 0; k < kNumBooleanGates; ++k) CHECK(kleene_extension(k) == extension_oracle(k));
  CHECK(kleene_extension(1) == kleene_gate(KleeneKind::kMin));
  CHECK(kleene_extension(7) == kleene_gate(KleeneKind::kMax));
  CHECK(kleene_extension(3) == kleene_gate(KleeneKind::kPassA));
  CHECK(kleene_extension(12) == kleene_gate(KleeneKind::kNegA));
  CHECK(kleene_extension(15) == kleene_gate(KleeneKind::kConst, Trit::kTrue));
  const auto x = kleene_extension(6);
  CHECK(x.at(0, 1) == Trit::kUnknown);
  CHECK(x.at(1, -1) == Trit::kTrue);
  CHECK(x.at(1, 1) == Trit::kFalse);
}

TEST_CASE("binary hardening") {
  std::array<double, 16> l{};
  l[3] = 2.0;
  l[7] = 2.0;
  CHECK(select_boolean_gate(std::span<const double, 16>(l)) == 3);
  l[9] = 2.5;
  CHECK(select_boolean_gate(std::span<const double, 16>(l)) == 9);

  BinaryDlgnNetwork net;
  net.wiring.input_dim = 2;
  net.wiring.layers = {LayerWiring{{0, 0}, {1, 1}}};
  net.readout = {2, 1.0};
  net.logits = {std::vector<double>(32, 0.0)};
  net.gate_logits(0, 0)[1] = 40.0;
  net.gate_logits(0, 1)[6] = 40.0;
  const auto c = harden_binary(net);
  CHECK(c.provenance.source_arch == "binary");
  CHECK(decode(c.gates[0][0]) == kleene_extension(1));
  CHECK(decode(c.gates[0][1]) == kleene_extension(6));

  EncodedSet bits;
  bits.dim = 2;
  bits.mode = EncodingMode::kBinaryThermometer;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      bits.x.push_back(a);
      bits.x.push_back(b);
      bits.y.push_back(a ^ b);
    }
  }
  const auto rep = gap_report(net, c, bits);
  CHECK(rep.gap_pp == 0.0);
  CHECK_FALSE(rep.hardening_error.has_value());
  CHECK(rep.unknown_fraction == 0.0);

  EncodedSet empty;
  empty.dim = 2;
  CHECK_THROWS_AS(gap_report(net, c, empty), DataError);
}

TEST_CASE("gap report on a trained network") {
  EncodedSet data = all_trit_inputs(3);
  for (std::size_t i = 0; i < data.size(); ++i) data.y[i] = data.x[i * 3] > 0 ? 1 : 0;
  const std::vector<std::size_t> widths = {32, 16};
  auto net = init_network(widths, 3, GroupSumConfig{2, 4.0}, 1);
  TrainConfig cfg;
  cfg.steps = 300;
  cfg.batch_size = 27;
  cfg.lambda_max = 1.0;
  train(net, data, cfg);
  const auto c = harden_network(net);
  const auto rep = gap_report(net, c, data);
  CHECK(rep.gap_pp == doctest::Approx(100.0 * (rep.soft_accuracy - rep.circuit_accuracy)));
  CHECK(rep.unknown_fraction >= 0.0);
  CHECK(rep.unknown_fraction <= 1.0);
  const auto p = predict_all(c, data);
  CHECK(p.accuracy() == rep.circuit_accuracy);
}
