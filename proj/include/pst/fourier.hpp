// Orthogonal Fourier analysis for functions on {-1,0,+1} and {-1,0,+1}^2.
//
// Univariate basis (uniform measure, <f,g> = 1/3 sum f g):
//   phi0 = 1, phi1 = x, phi2 = x^2 - 2/3,   |phi|^2 = 1, 2/3, 2/9.
// Bivariate basis Phi_ij(x,y) = phi_i(x) phi_j(y), stored at index 3*i + j.
// The basis is orthogonal but not normalized; transforms divide by |Phi_ij|^2.
#pragma once

#include <array>
#include <string_view>

#include "pst/ternary.hpp"

namespace pst {

double phi(int i, double x);
double phi_norm_sq(int i);

double basis_value(int i, int j, double x, double y);
/// |Phi_ij|^2 = |phi_i|^2 |phi_j|^2.
double basis_norm_sq(int i, int j);

struct FourierCoeffs9 {
  std::array<double, 9> c{};

  double at(int i, int j) const { return c[static_cast<std::size_t>(3 * i + j)]; }
  double& at(int i, int j) { return c[static_cast<std::size_t>(3 * i + j)]; }
};

/// (1/9) sum_i f_i g_i over the grid.
double inner_product(const GridValues& f, const GridValues& g);

/// Values of Phi_ij on the grid.
GridValues basis_table(int i, int j);

FourierCoeffs9 fourier_transform(const GridValues& t);
GridValues inverse_transform(const FourierCoeffs9& fhat);

/// Fixed change of basis from monomial to Fourier coordinates.
const Matrix9& monomial_to_fourier_matrix();
FourierCoeffs9 monomial_to_fourier(std::span<const double, 9> w);
inline FourierCoeffs9 monomial_to_fourier(const PolyCoeffs9& p) {
  return monomial_to_fourier(std::span<const double, 9>(p.w));
}

enum class SpectralClass { kLinear, kBilinear, kQuadratic, kFull };

std::string_view to_string(SpectralClass c);

inline constexpr double kExactTableTolerance = 1e-9;

/// |c| <= tol counts as zero. Use kExactTableTolerance for hardened gates;
/// learned polynomials need an explicit tolerance.
SpectralClass spectral_class(const FourierCoeffs9& fhat, double tol);

double fourier_l1(const FourierCoeffs9& fhat);

/// Squared-coefficient energy split by total degree i+j of Phi_ij.
struct EnergyBands {
  double constant = 0.0;
  double linear = 0.0;
  double quadratic = 0.0;
  double cubic = 0.0;
  double quartic = 0.0;
  bool zero_energy = false;
};

/// Unnormalized per-degree sums of squared coefficients.
EnergyBands raw_energy_bands(const FourierCoeffs9& fhat);
/// Bands normalized to sum to 1; zero input gives all-zero bands with
/// zero_energy set.
EnergyBands spectral_energy_bands(const FourierCoeffs9& fhat);
EnergyBands normalize(const EnergyBands& raw);

/// A table is binary-equivalent when its four corners are decided and no
/// entry anywhere is UNKNOWN; everything else counts as genuinely ternary.
bool is_binary_equivalent(const TruthTable9& t);

}  // namespace pst
