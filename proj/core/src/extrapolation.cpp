#include "donorspin/extrapolation.hpp"

#include <cmath>

#include "donorspin/errors.hpp"

namespace donorspin {

void HyperfinePoint::validate() const {
  if (n_atoms < 16) throw ValidationError("hyperfine point: n_atoms must be >= 16");
  if (!std::isfinite(a_mhz)) throw ValidationError("hyperfine point: a_mhz must be finite");
}

double contact_hyperfine_mhz(double g_i, double sigma_a0, double g_e) {
  if (!std::isfinite(g_i) || !std::isfinite(sigma_a0) || !std::isfinite(g_e))
    throw ValidationError("contact_hyperfine_mhz: inputs must be finite");
  namespace c = constants;
  const double sigma_m3 = sigma_a0 / (c::bohr_radius * c::bohr_radius * c::bohr_radius);
  const double a_hz =
      (2.0 * c::mu0 / 3.0) * (g_e * c::mu_bohr) * (g_i * c::mu_nuclear) * sigma_m3 / c::planck;
  return a_hz / 1e6;
}

DiluteFit fit_dilute(const std::vector<HyperfinePoint>& points, int n_min) {
  std::vector<const HyperfinePoint*> used;
  for (const HyperfinePoint& p : points) {
    p.validate();
    if (p.n_atoms >= n_min) used.push_back(&p);
  }
  if (used.size() < 2)
    throw ValidationError("fit_dilute needs at least two points with N >= " +
                          std::to_string(n_min));

  double sx = 0.0, sy = 0.0;
  for (const auto* p : used) {
    sx += 1000.0 / p->n_atoms;
    sy += p->a_mhz;
  }
  const double n = static_cast<double>(used.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto* p : used) {
    const double dx = 1000.0 / p->n_atoms - mx;
    sxx += dx * dx;
    sxy += dx * (p->a_mhz - my);
  }
  if (!(sxx > 0.0))
    throw ValidationError("fit_dilute: all points share the same N, fit is rank deficient");

  DiluteFit fit;
  fit.slope_mhz = sxy / sxx;
  fit.intercept_mhz = my - fit.slope_mhz * mx;
  fit.n_min = n_min;
  fit.points_used = static_cast<int>(used.size());
  double ss = 0.0;
  for (const auto* p : used) {
    const double r = p->a_mhz - fit.evaluate_mhz(p->n_atoms);
    ss += r * r;
  }
  fit.residual_norm_mhz = std::sqrt(ss);
  return fit;
}

double rigid_shift_extrapolate(const DiluteFit& fit, const HyperfinePoint& anchor) {
  anchor.validate();
  return anchor.a_mhz - fit.slope_mhz * 1000.0 / anchor.n_atoms;
}

SupercellGeometry supercell_geometry(int n, double a_hex_angstrom, double c_hex_angstrom) {
  if (n < 1) throw ValidationError("supercell_geometry: n must be >= 1");
  if (!(a_hex_angstrom > 0.0) || !(c_hex_angstrom > 0.0) || !std::isfinite(a_hex_angstrom) ||
      !std::isfinite(c_hex_angstrom))
    throw ValidationError("supercell_geometry: lattice constants must be finite and > 0");

  SupercellGeometry g;
  g.n = n;
  g.atom_count = 16L * n * n * n;
  g.a_angstrom = 2.0 * a_hex_angstrom;
  g.b_angstrom = std::sqrt(3.0) * a_hex_angstrom;
  g.c_angstrom = c_hex_angstrom;
  return g;
}

const std::vector<HyperfineReference>& hyperfine_reference_table() {
  static const std::vector<HyperfineReference> table = {
      {"Ga", "69Ga", 7.2, 18.8},
      {"In", "115In", 103.0, 102.5},
      {"Sn-Li", "119Sn", 466.7, 388.0},
  };
  return table;
}

}  // namespace donorspin
