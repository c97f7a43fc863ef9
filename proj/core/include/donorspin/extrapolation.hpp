#pragma once

#include <string>
#include <vector>

#include "donorspin/constants.hpp"

namespace donorspin {

/// Isotropic hyperfine value computed in one supercell.
struct HyperfinePoint {
  int n_atoms = 0;
  double a_mhz = 0.0;
  std::string method;  // e.g. semilocal, hybrid

  void validate() const;  // N >= 16, A finite
};

/// Least-squares line A = intercept + slope * (1000 / N); the independent
/// variable matches the published fit parameterization.
struct DiluteFit {
  double intercept_mhz = 0.0;
  double slope_mhz = 0.0;  // coefficient of 1000/N
  int n_min = 0;
  int points_used = 0;
  double residual_norm_mhz = 0.0;

  double evaluate_mhz(double n_atoms) const { return intercept_mhz + slope_mhz * 1000.0 / n_atoms; }
};

/// Orthorhombic n x n x n supercell built on the 16-atom transformed cell
/// a' = 2 a_hex, b' = sqrt(3) a_hex, c' = c_hex.
struct SupercellGeometry {
  int n = 1;
  long atom_count = 16;
  double a_angstrom = 0.0;  // 16-atom cell vectors
  double b_angstrom = 0.0;
  double c_angstrom = 0.0;

  double volume_angstrom3() const {
    return static_cast<double>(n) * n * n * a_angstrom * b_angstrom * c_angstrom;
  }
};

struct HyperfineReference {
  std::string donor;
  std::string isotope;
  double theory_mhz = 0.0;
  double experiment_mhz = 0.0;
};

/// A = (2 mu0 / 3) g_e mu_B g_I mu_N sigma(R) / h, with sigma(R) the contact
/// spin density in Bohr-radius^-3 (converted to m^-3 internally).
double contact_hyperfine_mhz(double g_i, double sigma_a0,
                             double g_e = constants::g_e_free);

/// Ordinary least squares over points with N >= n_min (at least two, with
/// distinct N).
DiluteFit fit_dilute(const std::vector<HyperfinePoint>& points, int n_min);

/// Intercept of the fitted line rigidly shifted to pass through the anchor:
/// anchor.A - slope * (1000 / anchor.N).
double rigid_shift_extrapolate(const DiluteFit& fit, const HyperfinePoint& anchor);

SupercellGeometry supercell_geometry(int n, double a_hex_angstrom, double c_hex_angstrom);

/// Published shallow-donor benchmark values (read-only display data).
const std::vector<HyperfineReference>& hyperfine_reference_table();

}  // namespace donorspin
