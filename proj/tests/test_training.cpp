#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "pst/fourier.hpp"
#include "pst/training.hpp"

using namespace pst;

namespace {

EncodedSet random_trits(std::size_t n, std::size_t dim, std::uint64_t seed, bool label_from_first) {
  EncodedSet s;
  s.dim = dim;
  s.num_classes = 2;
  s.mode = EncodingMode::kTernary;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> trit(-1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) s.x.push_back(trit(rng));
    const double first = s.x[i * dim];
    s.y.push_back(label_from_first ? (first > 0 ? 1 : 0) : static_cast<int>(rng() & 1u));
  }
  return s;
}

EncodedSet random_bits(std::size_t n, std::size_t dim, std::uint64_t seed) {
  EncodedSet s;
  s.dim = dim;
  s.num_classes = 2;
  s.mode = EncodingMode::kBinaryThermometer;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) s.x.push_back(static_cast<double>(rng() & 1u));
    s.y.push_back(static_cast<int>(s.x[i * dim]) ^ static_cast<int>(s.x[i * dim + 1]));
  }
  return s;
}

double loss_oracle(const PstNetwork& net, const EncodedSet& set, double lambda, const TrainConfig& cfg) {
  double task = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto f = forward_soft(net, set.row(i));
    task += task_loss(f.scores, set.y[i], cfg.loss);
  }
  task /= static_cast<double>(set.size());
  return task + lambda * commitment_loss(net) + cfg.fourier_weight * fourier_regularizer(net);
}

}  // namespace

TEST_CASE("lambda schedule") {
  TrainConfig cfg;
  cfg.steps = 100;
  cfg.lambda_max = 0.1;
  cfg.gamma = 2.0;
  CHECK(lambda_schedule(0, cfg) == 0.0);
  CHECK(lambda_schedule(50, cfg) == doctest::Approx(0.025));
  CHECK(lambda_schedule(100, cfg) == doctest::Approx(0.1));
  cfg.gamma = 1.0;
  CHECK(lambda_schedule(25, cfg) == doctest::Approx(0.025));
  cfg.steps = 0;
  CHECK(lambda_schedule(0, cfg) == doctest::Approx(0.1));
}

TEST_CASE("lattice distance") {
  CHECK(lattice_distance_sq(0.3) == doctest::Approx(0.09));
  CHECK(lattice_distance_sq(0.7) == doctest::Approx(0.09));
  CHECK(lattice_distance_sq(1.4) == doctest::Approx(0.16));
  CHECK(lattice_distance_sq(-0.5) == doctest::Approx(0.25));
  CHECK(lattice_distance_sq(-1.0) == 0.0);
  CHECK(lattice_distance_sq(0.0) == 0.0);
}

TEST_CASE("task loss") {
  const std::vector<double> s = {0.5, -0.5};
  CHECK(task_loss(s, 0, LossKind::kMse) == doctest::Approx(0.25));
  const std::vector<double> z = {0.0, 0.0};
  CHECK(task_loss(z, 1, LossKind::kCrossEntropy) == doctest::Approx(std::log(2.0)));
  const std::vector<double> big = {1000.0, 0.0};
  CHECK(task_loss(big, 0, LossKind::kCrossEntropy) == doctest::Approx(0.0));
  CHECK(std::isfinite(task_loss(big, 1, LossKind::kCrossEntropy)));
  CHECK_THROWS(task_loss(s, 2, LossKind::kMse));
  CHECK(parse_loss_kind(to_string(LossKind::kCrossEntropy)) == LossKind::kCrossEntropy);
  CHECK_THROWS(parse_loss_kind("hinge"));
}

TEST_CASE("regularizers") {
  const std::vector<std::size_t> widths = {2};
  auto net = init_network(widths, 2, GroupSumConfig{2, 1.0}, 0);
  net.set_weights(0, 0, coeffs_of_table(kleene_gate(KleeneKind::kMin)));
  net.set_weights(0, 1, coeffs_of_table(kleene_gate(KleeneKind::kMax)));
  CHECK(commitment_loss(net) <= 1e-20);
  PolyCoeffs9 half;
  half.w[0] = 0.25;
  net.set_weights(0, 1, half);
  CHECK(commitment_loss(net) == doctest::Approx(0.0625 / 2));
  // Constant 0.25: Fourier L1 is 0.25; MIN has its own L1.
  const double l1_min = fourier_l1(fourier_transform(kleene_gate(KleeneKind::kMin).as_reals()));
  CHECK(fourier_regularizer(net) == doctest::Approx((l1_min + 0.25) / 2));
}

TEST_CASE("loss value matches an independent recomputation") {
  const std::vector<std::size_t> widths = {12, 8, 6};
  const auto net = init_network(widths, 5, GroupSumConfig{2, 2.0}, 1);
  const auto data = random_trits(17, 5, 2, false);
  for (LossKind kind : {LossKind::kMse, LossKind::kCrossEntropy}) {
    TrainConfig cfg;
    cfg.loss = kind;
    cfg.fourier_weight = 0.03;
    Workspace ws;
    const auto l = evaluate(net, data.x, data.y, 0.4, cfg, ws, nullptr);
    CHECK(l.total == doctest::Approx(loss_oracle(net, data, 0.4, cfg)).epsilon(1e-12));
    CHECK(l.lambda == 0.4);
    CHECK(l.total == doctest::Approx(l.task + 0.4 * l.commitment + 0.03 * l.fourier).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradient matches finite differences") {
  const std::vector<std::size_t> widths = {10, 8, 6};
  auto net = init_network(widths, 4, GroupSumConfig{2, 1.5}, 7);
  const auto data = random_trits(11, 4, 8, false);
  for (LossKind kind : {LossKind::kMse, LossKind::kCrossEntropy}) {
    TrainConfig cfg;
    cfg.loss = kind;
    cfg.fourier_weight = 0.05;
    const double lambda = 0.3;
    Workspace ws;
    GradientSet g;
    evaluate(net, data.x, data.y, lambda, cfg, ws, &g);
    const double h = 1e-6;
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t l = 0; l < net.depth(); ++l) {
      for (std::size_t p = 0; p < net.coeffs[l].size(); ++p) {
        const double orig = net.coeffs[l][p];
        net.coeffs[l][p] = orig + h;
        const double up = loss_oracle(net, data, lambda, cfg);
        net.coeffs[l][p] = orig - h;
        const double down = loss_oracle(net, data, lambda, cfg);
        net.coeffs[l][p] = orig;
        const double fd = (up - down) / (2 * h);
        worst = std::max(worst, std::abs(fd - g.layers[l][p]) / std::max(1.0, std::abs(fd)));
        ++checked;
      }
    }
    CHECK(checked == 9 * 24);
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("saturated neuron passes no task gradient") {
  const std::vector<std::size_t> widths = {4};
  auto net = init_network(widths, 3, GroupSumConfig{2, 1.0}, 3);
  PolyCoeffs9 sat;
  sat.w[0] = 5.0;
  net.set_weights(0, 2, sat);
  const auto data = random_trits(9, 3, 4, false);
  TrainConfig cfg;
  Workspace ws;
  GradientSet g;
  evaluate(net, data.x, data.y, 0.0, cfg, ws, &g);
  for (int k = 0; k < 9; ++k) CHECK(g.layers[0][2 * 9 + k] == 0.0);
  double other = 0.0;
  for (int k = 0; k < 9; ++k) other += std::abs(g.layers[0][k]);
  CHECK(other > 0.0);
}

TEST_CASE("commitment gradient descends the commitment loss") {
  const std::vector<std::size_t> widths = {16, 8};
  auto net = init_network(widths, 3, GroupSumConfig{2, 1.0}, 5);
  const auto data = random_trits(8, 3, 6, false);
  TrainConfig cfg;
  Workspace ws;
  GradientSet g0, g1;
  evaluate(net, data.x, data.y, 0.0, cfg, ws, &g0);
  evaluate(net, data.x, data.y, 1.0, cfg, ws, &g1);
  const double before = commitment_loss(net);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    for (std::size_t p = 0; p < net.coeffs[l].size(); ++p) {
      net.coeffs[l][p] -= 1e-3 * (g1.layers[l][p] - g0.layers[l][p]);
    }
  }
  CHECK(commitment_loss(net) < before);
}

TEST_CASE("adam") {
  std::vector<double> p = {1.0, -2.0};
  const std::vector<double> g = {0.5, -4.0};
  AdamState st;
  const AdamConfig cfg{0.01};
  adam_step(p, g, st, cfg);
  // First step: bias-corrected m = g, v = g^2.
  CHECK(p[0] == doctest::Approx(1.0 - 0.01 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(-2.0 + 0.01 * 4.0 / (4.0 + 1e-8)).epsilon(1e-14));
  CHECK(st.t == 1);

  const std::vector<double> g2 = {-0.5, 0.0};
  const double m = 0.9 * 0.1 * 0.5 + 0.1 * -0.5;
  const double v = 0.999 * 0.001 * 0.25 + 0.001 * 0.25;
  const double mhat = m / (1 - 0.81), vhat = v / (1 - 0.999 * 0.999);
  const double expect = p[0] - 0.01 * mhat / (std::sqrt(vhat) + 1e-8);
  adam_step(p, g2, st, cfg);
  CHECK(p[0] == doctest::Approx(expect).epsilon(1e-14));

  std::vector<double> wrong = {1.0};
  CHECK_THROWS(adam_step(wrong, g, st, cfg));
}

TEST_CASE("zero steps leave the network at init") {
  const std::vector<std::size_t> widths = {8, 4};
  auto net = init_network(widths, 3, GroupSumConfig{2, 1.0}, 1);
  const auto before = net.coeffs;
  TrainConfig cfg;
  cfg.steps = 0;
  const auto h = train(net, random_trits(10, 3, 1, true), cfg);
  CHECK(h.records.empty());
  CHECK(net.coeffs == before);
}

TEST_CASE("training learns a separable rule and is deterministic") {
  const auto data = random_trits(400, 3, 10, true);
  const auto test = random_trits(200, 3, 11, true);
  const std::vector<std::size_t> widths = {32, 32};
  TrainConfig cfg;
  cfg.steps = 300;
  cfg.batch_size = 32;
  cfg.learning_rate = 0.02;
  cfg.eval_every = 100;
  auto net = init_network(widths, 3, GroupSumConfig{2, 4.0}, 2);
  const auto h = train(net, data, cfg, &test);
  REQUIRE(h.records.size() == 300);
  CHECK(h.records[99].eval_accuracy.has_value());
  CHECK_FALSE(h.records[98].eval_accuracy.has_value());
  CHECK(h.records.back().lambda == doctest::Approx(cfg.lambda_max));
  CHECK(h.records.back().task_loss < h.records.front().task_loss);
  CHECK(soft_accuracy(net, test) >= 0.95);

  auto again = init_network(widths, 3, GroupSumConfig{2, 4.0}, 2);
  train(again, data, cfg, &test);
  CHECK(again.coeffs == net.coeffs);
}

TEST_CASE("non-finite loss raises with the step") {
  const std::vector<std::size_t> widths = {8};
  auto net = init_network(widths, 3, GroupSumConfig{2, 1.0}, 1);
  TrainConfig cfg;
  cfg.steps = 50;
  cfg.learning_rate = 1e308;
  bool thrown = false;
  try {
    train(net, random_trits(20, 3, 1, true), cfg);
  } catch (const NumericalFailure& e) {
    thrown = true;
    CHECK(e.step() >= 1);
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
  CHECK(thrown);
}

TEST_CASE("bad data is rejected") {
  const std::vector<std::size_t> widths = {8};
  auto net = init_network(widths, 3, GroupSumConfig{2, 1.0}, 1);
  TrainConfig cfg;
  cfg.steps = 5;
  CHECK_THROWS_AS(train(net, random_trits(20, 4, 1, true), cfg), DataError);
  EncodedSet empty;
  empty.dim = 3;
  CHECK_THROWS_AS(train(net, empty, cfg), DataError);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(train(net, random_trits(20, 3, 1, true), cfg), std::invalid_argument);
}

TEST_CASE("binary gradient matches finite differences") {
  const std::vector<std::size_t> widths = {8, 6};
  auto net = init_binary_network(widths, 4, GroupSumConfig{2, 1.5}, 3);
  const auto data = random_bits(9, 4, 2);
  TrainConfig cfg;
  cfg.loss = LossKind::kCrossEntropy;
  cfg.lambda_max = 0.0;
  Workspace ws;
  GradientSet g;
  evaluate_binary(net, data.x, data.y, cfg, ws, &g);
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    for (std::size_t p = 0; p < net.logits[l].size(); ++p) {
      const double orig = net.logits[l][p];
      net.logits[l][p] = orig + h;
      const double up = binary_total_loss(net, data, cfg);
      net.logits[l][p] = orig - h;
      const double down = binary_total_loss(net, data, cfg);
      net.logits[l][p] = orig;
      worst = std::max(worst, std::abs((up - down) / (2 * h) - g.layers[l][p]));
    }
  }
  CHECK(worst < 1e-6);
  const auto g2 = binary_backward(net, data, cfg);
  CHECK(g2.layers == g.layers);
}

TEST_CASE("binary training learns xor") {
  const auto data = random_bits(400, 4, 20);
  const auto test = random_bits(200, 4, 21);
  const std::vector<std::size_t> widths = {32, 32};
  TrainConfig cfg;
  cfg.steps = 400;
  cfg.batch_size = 32;
  cfg.learning_rate = 0.05;
  cfg.loss = LossKind::kCrossEntropy;
  cfg.lambda_max = 0.0;
  auto net = init_binary_network(widths, 4, GroupSumConfig{2, 2.0}, 1);
  const auto h = train_binary(net, data, cfg);
  CHECK(h.records.size() == 400);
  CHECK(soft_accuracy(net, test) >= 0.95);
}
