#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <set>

#include "pst/ternary.hpp"

using namespace pst;

namespace {

// Independent oracle: V built straight from the monomial definition, solved
// with a full-pivot LU.
Eigen::Matrix<double, 9, 9> oracle_vandermonde() {
  Eigen::Matrix<double, 9, 9> v;
  for (int i = 0; i < 9; ++i) {
    const double a = i / 3 - 1;
    const double b = i % 3 - 1;
    const double row[9] = {1, a, b, a * b, a * a, b * b, a * a * b, a * b * b, a * a * b * b};
    for (int k = 0; k < 9; ++k) v(i, k) = row[k];
  }
  return v;
}

TruthTable9 random_table(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-1, 1);
  TruthTable9 t;
  for (auto& e : t.entries) e = trit_from_int(d(rng));
  return t;
}

}  // namespace

TEST_CASE("trit values and conversions") {
  CHECK(to_int(Trit::kFalse) == -1);
  CHECK(to_int(Trit::kUnknown) == 0);
  CHECK(to_int(Trit::kTrue) == 1);
  CHECK(trit_from_int(1) == Trit::kTrue);
  CHECK_THROWS_AS(trit_from_int(2), std::invalid_argument);
  CHECK_THROWS(trit_from_int(-2));
}

TEST_CASE("grid order is row-major with a outer") {
  CHECK(grid_point(0).a == -1);
  CHECK(grid_point(0).b == -1);
  CHECK(grid_point(1).a == -1);
  CHECK(grid_point(1).b == 0);
  CHECK(grid_point(3).a == 0);
  CHECK(grid_point(3).b == -1);
  CHECK(grid_point(8).a == 1);
  CHECK(grid_point(8).b == 1);
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < kGridSize; ++i) {
    const auto p = grid_point(i);
    CHECK(grid_index(p.a, p.b) == i);
    seen.insert({p.a, p.b});
  }
  CHECK(seen.size() == 9);
}

TEST_CASE("gate ids are a bijection over all 19683 tables") {
  std::set<std::uint16_t> ids;
  for (std::uint32_t raw = 0; raw < kNumGates; ++raw) {
    const GateId id{static_cast<std::uint16_t>(raw)};
    const TruthTable9 t = decode(id);
    REQUIRE(encode(t) == id);
    ids.insert(id.value);
  }
  CHECK(ids.size() == 19683);

  TruthTable9 all_false, all_unknown, all_true;
  all_false.entries.fill(Trit::kFalse);
  all_unknown.entries.fill(Trit::kUnknown);
  all_true.entries.fill(Trit::kTrue);
  CHECK(encode(all_false).value == 0);
  CHECK(encode(all_unknown).value == 9841);  // (3^9 - 1) / 2
  CHECK(encode(all_true).value == 19682);
  CHECK_THROWS_AS(gate_id_checked(19683), std::out_of_range);
  CHECK_THROWS(gate_id_checked(-1));
  CHECK(gate_id_checked(42).value == 42);
}

TEST_CASE("vandermonde matches the definition and its inverse matches an LU solve") {
  const auto ov = oracle_vandermonde();
  const Eigen::Matrix<double, 9, 9> oinv = ov.fullPivLu().inverse();
  const auto& v = vandermonde();
  const auto& vinv = vandermonde_inverse();
  for (int i = 0; i < 9; ++i) {
    for (int k = 0; k < 9; ++k) {
      CHECK(v[i][k] == ov(i, k));
      CHECK(std::abs(vinv[i][k] - oinv(i, k)) <= 1e-12);
    }
  }
  double worst = 0.0;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      double s = 0.0;
      for (int k = 0; k < 9; ++k) s += v[i][k] * vinv[k][j];
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("eval_poly") {
  PolyCoeffs9 one;
  one.w[0] = 1;
  CHECK(eval_poly(one, 0.3, -0.7) == 1.0);
  PolyCoeffs9 proj_a;
  proj_a.w[1] = 1;
  CHECK(eval_poly(proj_a, -1.0, 0.5) == -1.0);

  // The nested form agrees with the plain monomial dot product.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    PolyCoeffs9 w;
    for (auto& c : w.w) c = n(rng);
    const double a = u(rng), b = u(rng);
    const auto m = monomials(a, b);
    double dot = 0.0;
    for (int k = 0; k < 9; ++k) dot += w.w[k] * m[k];
    CHECK(std::abs(eval_poly(w, a, b) - dot) <= 1e-12);
  }

  // KleeneMIN coefficients from an LU solve reproduce min on the grid.
  const TruthTable9 mn = kleene_gate(KleeneKind::kMin);
  Eigen::Matrix<double, 9, 1> t;
  for (int i = 0; i < 9; ++i) t(i) = to_real(mn.entries[i]);
  const Eigen::Matrix<double, 9, 1> w_oracle = oracle_vandermonde().fullPivLu().solve(t);
  const PolyCoeffs9 w = coeffs_of_table(mn);
  for (int k = 0; k < 9; ++k) CHECK(std::abs(w.w[k] - w_oracle(k)) <= 1e-12);
  CHECK(eval_poly(w, 0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 9; ++i) {
    const auto p = grid_point(i);
    CHECK(std::abs(eval_poly(w, p.a, p.b) - std::min(p.a, p.b)) <= 1e-12);
  }
}

TEST_CASE("table_of and coeffs_of_table") {
  PolyCoeffs9 one;
  one.w[0] = 1;
  for (double v : table_of(one)) CHECK(v == 1.0);
  for (double v : table_of(PolyCoeffs9{})) CHECK(v == 0.0);

  GridValues ones;
  ones.fill(1.0);
  const auto c1 = coeffs_of_table(ones);
  CHECK(c1.w[0] == doctest::Approx(1.0));
  for (int k = 1; k < 9; ++k) CHECK(std::abs(c1.w[k]) <= 1e-15);

  const auto pa = coeffs_of_table(kleene_gate(KleeneKind::kPassA));
  for (int k = 0; k < 9; ++k) CHECK(std::abs(pa.w[k] - (k == 1 ? 1.0 : 0.0)) <= 1e-15);

  // Exhaustive round trip through V^-1 then V.
  double worst = 0.0;
  for (std::uint32_t raw = 0; raw < kNumGates; ++raw) {
    const TruthTable9 t = decode(GateId{static_cast<std::uint16_t>(raw)});
    const auto back = table_of(coeffs_of_table(t));
    for (std::size_t i = 0; i < 9; ++i) worst = std::max(worst, std::abs(back[i] - to_real(t.entries[i])));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("round_to_trit") {
  CHECK(round_to_trit(0.4) == Trit::kUnknown);
  CHECK(round_to_trit(-0.6) == Trit::kFalse);
  CHECK(round_to_trit(0.5) == Trit::kTrue);
  CHECK(round_to_trit(-0.5) == Trit::kFalse);
  CHECK(round_to_trit(std::nextafter(0.5, 0.0)) == Trit::kUnknown);
  CHECK(round_to_trit(std::nextafter(-0.5, 0.0)) == Trit::kUnknown);
  CHECK(round_to_trit(7.0) == Trit::kTrue);
  CHECK(round_to_trit(-3.0) == Trit::kFalse);
  CHECK(round_to_trit(0.0) == Trit::kUnknown);
}

TEST_CASE("harden_neuron") {
  for (std::uint32_t raw = 0; raw < kNumGates; ++raw) {
    const GateId id{static_cast<std::uint16_t>(raw)};
    REQUIRE(harden_neuron(coeffs_of_table(decode(id))) == id);
  }
  TruthTable9 unk;
  unk.entries.fill(Trit::kUnknown);
  CHECK(harden_neuron(PolyCoeffs9{}) == encode(unk));

  // Table-space perturbations below 0.5 never move the gate.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.499, 0.499);
  for (int trial = 0; trial < 2000; ++trial) {
    const TruthTable9 t = random_table(rng);
    GridValues noisy = t.as_reals();
    for (auto& v : noisy) v += u(rng);
    CHECK(harden_neuron(coeffs_of_table(noisy)) == encode(t));
  }

  // Image of random draws stays in range.
  std::normal_distribution<double> n(0, 2.0);
  for (int trial = 0; trial < 100000; ++trial) {
    PolyCoeffs9 w;
    for (auto& c : w.w) c = n(rng);
    REQUIRE(harden_neuron(w).value < kNumGates);
  }
}

TEST_CASE("stability radius away from ties") {
  // Entries at distance m from the nearest tie point survive any table-space
  // perturbation with max-norm below m.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    PolyCoeffs9 w;
    for (auto& c : w.w) c = n(rng);
    double m = 1e9;
    for (double v : table_of(w)) m = std::min(m, std::abs(std::abs(v) - 0.5));
    GridValues delta;
    for (auto& d : delta) d = 0.999 * m * u(rng);
    const PolyCoeffs9 dw = coeffs_of_table(delta);
    PolyCoeffs9 w2 = w;
    for (int k = 0; k < 9; ++k) w2.w[k] += dw.w[k];
    CHECK(harden_neuron(w2) == harden_neuron(w));
  }
}

TEST_CASE("lattice geometry") {
  const auto g3 = lattice_geometry(3);
  CHECK(g3.spacing == doctest::Approx(1.0));
  CHECK(g3.entry_tolerance == doctest::Approx(0.5));
  CHECK(g3.covering_radius == doctest::Approx(1.5));
  CHECK(lattice_geometry(4).entry_tolerance == doctest::Approx(1.0 / 3.0));
  const auto g2 = lattice_geometry(2);
  CHECK(g2.entry_tolerance == doctest::Approx(1.0));
  CHECK(g2.covering_radius == doctest::Approx(2.0));
  for (int q = 2; q < 10; ++q) {
    const auto g = lattice_geometry(q);
    CHECK(g.covering_radius == doctest::Approx(q * g.spacing / 2));
    CHECK(g.entry_tolerance == doctest::Approx(g.spacing / 2));
  }
  CHECK_THROWS_AS(lattice_geometry(1), std::invalid_argument);
}

TEST_CASE("kleene gates") {
  const auto mn = kleene_gate(KleeneKind::kMin);
  const auto mx = kleene_gate(KleeneKind::kMax);
  CHECK(mn.at(0, 1) == Trit::kUnknown);
  CHECK(mx.at(-1, 0) == Trit::kUnknown);
  for (int b = -1; b <= 1; ++b) CHECK(kleene_gate(KleeneKind::kNegA).at(1, b) == Trit::kFalse);
  for (std::size_t i = 0; i < 9; ++i) {
    const auto p = grid_point(i);
    CHECK(to_int(mn.entries[i]) == std::min(p.a, p.b));
    CHECK(to_int(mx.entries[i]) == std::max(p.a, p.b));
    CHECK(to_int(kleene_gate(KleeneKind::kNegB).entries[i]) == -p.b);
    CHECK(to_int(kleene_gate(KleeneKind::kPassB).entries[i]) == p.b);
    CHECK(kleene_gate(KleeneKind::kConst, Trit::kTrue).entries[i] == Trit::kTrue);
  }
}

TEST_CASE("named gate library") {
  const auto& gates = named_gates();
  std::set<std::string> names;
  std::set<std::uint16_t> ids;
  for (const auto& g : gates) {
    names.insert(std::string(g.name));
    ids.insert(encode(g.table).value);
    CHECK(gate_name(encode(g.table)).value() == g.name);
    CHECK(gate_by_name(g.name).value() == g.table);
  }
  CHECK(names.size() == gates.size());
  CHECK(ids.size() == gates.size());
  CHECK_FALSE(gate_by_name("NO_SUCH_GATE").has_value());

  // XOR agrees with Boolean XOR on the corners and is UNKNOWN whenever an input is.
  const auto x = gate_by_name("XOR").value();
  CHECK(x.at(1, 1) == Trit::kFalse);
  CHECK(x.at(-1, -1) == Trit::kFalse);
  CHECK(x.at(1, -1) == Trit::kTrue);
  CHECK(x.at(-1, 1) == Trit::kTrue);
  for (int v = -1; v <= 1; ++v) {
    CHECK(x.at(0, v) == Trit::kUnknown);
    CHECK(x.at(v, 0) == Trit::kUnknown);
  }
}
