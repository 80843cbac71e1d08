#include "pst/fourier.hpp"

#include <cmath>
#include <stdexcept>

namespace pst {

namespace {

constexpr double kPhiNormSq[3] = {1.0, 2.0 / 3.0, 2.0 / 9.0};

// Monomial x^p in the univariate basis: column p, row = phi index.
constexpr double kMonomialInPhi[3][3] = {
    {1.0, 0.0, 2.0 / 3.0},
    {0.0, 1.0, 0.0},
    {0.0, 0.0, 1.0},
};

Matrix9 build_monomial_to_fourier() {
  Matrix9 m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < 9; ++k) {
        m[static_cast<std::size_t>(3 * i + j)][k] =
            kMonomialInPhi[i][kMonomialExponents[k][0]] * kMonomialInPhi[j][kMonomialExponents[k][1]];
      }
    }
  }
  return m;
}

}  // namespace

double phi(int i, double x) {
  switch (i) {
    case 0:
      return 1.0;
    case 1:
      return x;
    case 2:
      return x * x - 2.0 / 3.0;
  }
  throw std::out_of_range("phi index");
}

double phi_norm_sq(int i) { return kPhiNormSq[i]; }

double basis_value(int i, int j, double x, double y) { return phi(i, x) * phi(j, y); }

double basis_norm_sq(int i, int j) { return kPhiNormSq[i] * kPhiNormSq[j]; }

double inner_product(const GridValues& f, const GridValues& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < kGridSize; ++i) s += f[i] * g[i];
  return s / 9.0;
}

GridValues basis_table(int i, int j) {
  GridValues t{};
  for (std::size_t p = 0; p < kGridSize; ++p) {
    const auto [a, b] = grid_point(p);
    t[p] = basis_value(i, j, a, b);
  }
  return t;
}

FourierCoeffs9 fourier_transform(const GridValues& t) {
  FourierCoeffs9 out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.at(i, j) = inner_product(t, basis_table(i, j)) / basis_norm_sq(i, j);
    }
  }
  return out;
}

GridValues inverse_transform(const FourierCoeffs9& fhat) {
  GridValues t{};
  for (std::size_t p = 0; p < kGridSize; ++p) {
    const auto [a, b] = grid_point(p);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) s += fhat.at(i, j) * basis_value(i, j, a, b);
    }
    t[p] = s;
  }
  return t;
}

const Matrix9& monomial_to_fourier_matrix() {
  static const Matrix9 m = build_monomial_to_fourier();
  return m;
}

FourierCoeffs9 monomial_to_fourier(std::span<const double, 9> w) {
  const auto& m = monomial_to_fourier_matrix();
  FourierCoeffs9 out;
  for (std::size_t r = 0; r < 9; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < 9; ++k) s += m[r][k] * w[k];
    out.c[r] = s;
  }
  return out;
}

std::string_view to_string(SpectralClass c) {
  switch (c) {
    case SpectralClass::kLinear:
      return "LINEAR";
    case SpectralClass::kBilinear:
      return "BILINEAR";
    case SpectralClass::kQuadratic:
      return "QUADRATIC";
    case SpectralClass::kFull:
      return "FULL";
  }
  return "?";
}

SpectralClass spectral_class(const FourierCoeffs9& fhat, double tol) {
  auto present = [&](int i, int j) { return std::abs(fhat.at(i, j)) > tol; };
  if (present(2, 1) || present(1, 2) || present(2, 2)) return SpectralClass::kFull;
  if (present(2, 0) || present(0, 2)) return SpectralClass::kQuadratic;
  if (present(1, 1)) return SpectralClass::kBilinear;
  return SpectralClass::kLinear;
}

double fourier_l1(const FourierCoeffs9& fhat) {
  double s = 0.0;
  for (double v : fhat.c) s += std::abs(v);
  return s;
}

EnergyBands raw_energy_bands(const FourierCoeffs9& fhat) {
  EnergyBands e;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double en = fhat.at(i, j) * fhat.at(i, j);
      switch (i + j) {
        case 0: e.constant += en; break;
        case 1: e.linear += en; break;
        case 2: e.quadratic += en; break;
        case 3: e.cubic += en; break;
        default: e.quartic += en; break;
      }
    }
  }
  return e;
}

EnergyBands normalize(const EnergyBands& raw) {
  const double total = raw.constant + raw.linear + raw.quadratic + raw.cubic + raw.quartic;
  if (!(total > 0.0)) {
    EnergyBands z;
    z.zero_energy = true;
    return z;
  }
  return {raw.constant / total, raw.linear / total, raw.quadratic / total,
          raw.cubic / total,    raw.quartic / total, false};
}

EnergyBands spectral_energy_bands(const FourierCoeffs9& fhat) {
  return normalize(raw_energy_bands(fhat));
}

bool is_binary_equivalent(const TruthTable9& t) {
  for (Trit e : t.entries) {
    if (e == Trit::kUnknown) return false;
  }
  return true;
}

}  // namespace pst
