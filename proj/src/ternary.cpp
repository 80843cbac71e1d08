#include "pst/ternary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pst {

namespace {

// Inverse of the univariate Vandermonde [1, x, x^2] at x = -1, 0, +1.
// Row = monomial exponent, column = grid coordinate index.
constexpr double kUnivariateInverse[3][3] = {
    {0.0, 1.0, 0.0},
    {-0.5, 0.0, 0.5},
    {0.5, -1.0, 0.5},
};

constexpr double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

constexpr Matrix9 build_vandermonde() {
  Matrix9 v{};
  for (std::size_t i = 0; i < kGridSize; ++i) {
    const auto [a, b] = grid_point(i);
    for (std::size_t k = 0; k < 9; ++k) {
      v[i][k] = ipow(a, kMonomialExponents[k][0]) * ipow(b, kMonomialExponents[k][1]);
    }
  }
  return v;
}

// V^{-1} is the row-permuted Kronecker square of the univariate inverse, so
// all entries are exact dyadic rationals.
constexpr Matrix9 build_vandermonde_inverse() {
  Matrix9 inv{};
  for (std::size_t k = 0; k < 9; ++k) {
    const int pa = kMonomialExponents[k][0];
    const int pb = kMonomialExponents[k][1];
    for (std::size_t i = 0; i < kGridSize; ++i) {
      inv[k][i] = kUnivariateInverse[pa][i / 3] * kUnivariateInverse[pb][i % 3];
    }
  }
  return inv;
}

constexpr Matrix9 kVandermonde = build_vandermonde();
constexpr Matrix9 kVandermondeInverse = build_vandermonde_inverse();

}  // namespace

Trit trit_from_int(int v) {
  if (v < -1 || v > 1) {
    throw std::invalid_argument("not a trit: " + std::to_string(v));
  }
  return static_cast<Trit>(v);
}

GridValues TruthTable9::as_reals() const {
  GridValues out{};
  for (std::size_t i = 0; i < kGridSize; ++i) out[i] = to_real(entries[i]);
  return out;
}

GateId encode(const TruthTable9& table) {
  std::uint32_t id = 0;
  std::uint32_t place = 1;
  for (std::size_t i = 0; i < kGridSize; ++i) {
    id += static_cast<std::uint32_t>(to_int(table.entries[i]) + 1) * place;
    place *= 3;
  }
  return GateId{static_cast<std::uint16_t>(id)};
}

TruthTable9 decode(GateId id) {
  TruthTable9 t;
  std::uint32_t rest = id.value;
  for (std::size_t i = 0; i < kGridSize; ++i) {
    t.entries[i] = static_cast<Trit>(static_cast<int>(rest % 3) - 1);
    rest /= 3;
  }
  return t;
}

GateId gate_id_checked(long long raw) {
  if (raw < 0 || raw >= static_cast<long long>(kNumGates)) {
    throw std::out_of_range("gate id out of range: " + std::to_string(raw));
  }
  return GateId{static_cast<std::uint16_t>(raw)};
}

std::array<double, 9> monomials(double a, double b) {
  const double a2 = a * a;
  const double b2 = b * b;
  return {1.0, a, b, a * b, a2, b2, a2 * b, a * b2, a2 * b2};
}

const Matrix9& vandermonde() { return kVandermonde; }
const Matrix9& vandermonde_inverse() { return kVandermondeInverse; }

GridValues table_of(std::span<const double, 9> w) {
  GridValues t{};
  for (std::size_t i = 0; i < kGridSize; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < 9; ++k) s += kVandermonde[i][k] * w[k];
    t[i] = s;
  }
  return t;
}

PolyCoeffs9 coeffs_of_table(const GridValues& t) {
  PolyCoeffs9 p;
  for (std::size_t k = 0; k < 9; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < kGridSize; ++i) s += kVandermondeInverse[k][i] * t[i];
    p.w[k] = s;
  }
  return p;
}

PolyCoeffs9 coeffs_of_table(const TruthTable9& t) { return coeffs_of_table(t.as_reals()); }

Trit round_to_trit(double x) {
  if (x >= 0.5) return Trit::kTrue;
  if (x <= -0.5) return Trit::kFalse;
  return Trit::kUnknown;
}

TruthTable9 round_table(const GridValues& t) {
  TruthTable9 out;
  for (std::size_t i = 0; i < kGridSize; ++i) out.entries[i] = round_to_trit(t[i]);
  return out;
}

GateId harden_neuron(std::span<const double, 9> w) { return encode(round_table(table_of(w))); }

LatticeGeometry lattice_geometry(int q) {
  if (q < 2) throw std::invalid_argument("valence must be >= 2");
  const double spacing = 2.0 / (q - 1);
  return {q, spacing, spacing / 2.0, q * spacing / 2.0};
}

TruthTable9 kleene_gate(KleeneKind kind, Trit constant) {
  switch (kind) {
    case KleeneKind::kMin:
      return tabulate([](int a, int b) { return std::min(a, b); });
    case KleeneKind::kMax:
      return tabulate([](int a, int b) { return std::max(a, b); });
    case KleeneKind::kNegA:
      return tabulate([](int a, int) { return -a; });
    case KleeneKind::kNegB:
      return tabulate([](int, int b) { return -b; });
    case KleeneKind::kPassA:
      return tabulate([](int a, int) { return a; });
    case KleeneKind::kPassB:
      return tabulate([](int, int b) { return b; });
    case KleeneKind::kConst:
      return tabulate([constant](int, int) { return to_int(constant); });
  }
  throw std::invalid_argument("unknown gate kind");
}

const std::vector<NamedGate>& named_gates() {
  static const std::vector<NamedGate> gates = {
      {"FALSE", kleene_gate(KleeneKind::kConst, Trit::kFalse)},
      {"UNKNOWN", kleene_gate(KleeneKind::kConst, Trit::kUnknown)},
      {"TRUE", kleene_gate(KleeneKind::kConst, Trit::kTrue)},
      {"PASS_A", kleene_gate(KleeneKind::kPassA)},
      {"PASS_B", kleene_gate(KleeneKind::kPassB)},
      {"NOT_A", kleene_gate(KleeneKind::kNegA)},
      {"NOT_B", kleene_gate(KleeneKind::kNegB)},
      {"AND", kleene_gate(KleeneKind::kMin)},
      {"OR", kleene_gate(KleeneKind::kMax)},
      {"NAND", tabulate([](int a, int b) { return -std::min(a, b); })},
      {"NOR", tabulate([](int a, int b) { return -std::max(a, b); })},
      {"XOR", tabulate([](int a, int b) { return std::min(std::max(a, b), -std::min(a, b)); })},
      {"XNOR", tabulate([](int a, int b) { return -std::min(std::max(a, b), -std::min(a, b)); })},
      {"IMPLIES", tabulate([](int a, int b) { return std::max(-a, b); })},
      {"CONSENSUS", tabulate([](int a, int b) { return a == b ? a : 0; })},
  };
  return gates;
}

std::optional<std::string_view> gate_name(GateId id) {
  for (const auto& g : named_gates()) {
    if (encode(g.table) == id) return g.name;
  }
  return std::nullopt;
}

std::optional<TruthTable9> gate_by_name(std::string_view name) {
  for (const auto& g : named_gates()) {
    if (g.name == name) return g.table;
  }
  return std::nullopt;
}

}  // namespace pst
