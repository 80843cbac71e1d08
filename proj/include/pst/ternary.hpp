// Ternary truth values, two-input gate truth tables, and the multi-quadratic
// monomial parameterization of PST neurons.
//
// Grid order: the nine points of {-1,0,+1}^2 are enumerated row-major,
// i = 3*(a+1) + (b+1), a outer and b inner. Every 9-vector in this library
// (truth tables, soft tables, Vandermonde rows) uses this order.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pst {

enum class Trit : std::int8_t { kFalse = -1, kUnknown = 0, kTrue = 1 };

constexpr int to_int(Trit t) { return static_cast<int>(t); }
constexpr double to_real(Trit t) { return static_cast<double>(to_int(t)); }

/// Throws std::invalid_argument unless v is -1, 0 or +1.
Trit trit_from_int(int v);

inline constexpr std::size_t kGridSize = 9;
inline constexpr std::uint32_t kNumGates = 19683;  // 3^9

struct GridPoint {
  int a;
  int b;
};

constexpr GridPoint grid_point(std::size_t i) {
  return {static_cast<int>(i / 3) - 1, static_cast<int>(i % 3) - 1};
}
constexpr std::size_t grid_index(int a, int b) {
  return static_cast<std::size_t>(3 * (a + 1) + (b + 1));
}

/// Real-valued table: a function on the 3x3 grid, in grid order.
using GridValues = std::array<double, kGridSize>;

struct TruthTable9 {
  std::array<Trit, kGridSize> entries{};

  Trit at(int a, int b) const { return entries[grid_index(a, b)]; }
  GridValues as_reals() const;
  friend bool operator==(const TruthTable9&, const TruthTable9&) = default;
};

/// Base-3 little-endian key over grid order: sum_i (entries[i]+1) * 3^i.
struct GateId {
  std::uint16_t value = 0;
  friend auto operator<=>(const GateId&, const GateId&) = default;
};

GateId encode(const TruthTable9& table);
TruthTable9 decode(GateId id);
/// Throws std::out_of_range for ids >= 19683.
GateId gate_id_checked(long long raw);

/// Coefficients over m(a,b) = [1, a, b, ab, a^2, b^2, a^2 b, a b^2, a^2 b^2].
struct PolyCoeffs9 {
  std::array<double, 9> w{};
  friend bool operator==(const PolyCoeffs9&, const PolyCoeffs9&) = default;
};

/// Exponents (of a, of b) of each monomial slot.
inline constexpr std::array<std::array<int, 2>, 9> kMonomialExponents = {{
    {0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}, {2, 1}, {1, 2}, {2, 2}}};

std::array<double, 9> monomials(double a, double b);

/// w^T m(a,b) in nested form: 8 multiplications, 8 additions.
inline double eval_poly(std::span<const double, 9> w, double a, double b) {
  const double c0 = w[0] + a * (w[1] + a * w[4]);
  const double c1 = w[2] + a * (w[3] + a * w[6]);
  const double c2 = w[5] + a * (w[7] + a * w[8]);
  return c0 + b * (c1 + b * c2);
}
inline double eval_poly(const PolyCoeffs9& p, double a, double b) {
  return eval_poly(std::span<const double, 9>(p.w), a, b);
}

using Matrix9 = std::array<std::array<double, 9>, 9>;

/// V[i][k] = m_k(grid point i).
const Matrix9& vandermonde();
/// Exact inverse; every entry is a multiple of 1/4.
const Matrix9& vandermonde_inverse();

/// t = V w.
GridValues table_of(std::span<const double, 9> w);
inline GridValues table_of(const PolyCoeffs9& p) {
  return table_of(std::span<const double, 9>(p.w));
}
/// w = V^{-1} t.
PolyCoeffs9 coeffs_of_table(const GridValues& t);
PolyCoeffs9 coeffs_of_table(const TruthTable9& t);

/// Nearest truth value; ties at +-0.5 go away from zero.
Trit round_to_trit(double x);
/// Nearest lattice point entrywise.
TruthTable9 round_table(const GridValues& t);

GateId harden_neuron(std::span<const double, 9> w);
inline GateId harden_neuron(const PolyCoeffs9& p) {
  return harden_neuron(std::span<const double, 9>(p.w));
}

struct LatticeGeometry {
  int q;
  double spacing;          // 2/(q-1)
  double entry_tolerance;  // 1/(q-1)
  double covering_radius;  // q/(q-1)
};

/// Throws std::invalid_argument for q < 2.
LatticeGeometry lattice_geometry(int q);

enum class KleeneKind { kMin, kMax, kNegA, kNegB, kPassA, kPassB, kConst };

TruthTable9 kleene_gate(KleeneKind kind, Trit constant = Trit::kUnknown);

/// Table produced by evaluating fn on every grid point.
template <class Fn>
TruthTable9 tabulate(Fn&& fn) {
  TruthTable9 t;
  for (std::size_t i = 0; i < kGridSize; ++i) {
    const auto [a, b] = grid_point(i);
    t.entries[i] = trit_from_int(fn(a, b));
  }
  return t;
}

struct NamedGate {
  std::string_view name;
  TruthTable9 table;
};

/// The fifteen curated gates (constants, projections, negations, Kleene
/// connectives, consensus).
const std::vector<NamedGate>& named_gates();
std::optional<std::string_view> gate_name(GateId id);
std::optional<TruthTable9> gate_by_name(std::string_view name);

}  // namespace pst
