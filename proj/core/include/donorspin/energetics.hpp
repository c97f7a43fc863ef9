#pragma once

#include <map>
#include <string>
#include <vector>

namespace donorspin {

/// Total energies and bookkeeping for one defect charge state. Energies in
/// eV; the finite-size correction is ingested, never computed here.
struct DefectEnergyRecord {
  std::string defect;
  int q = 0;
  double e_tot_defect_ev = 0.0;
  double e_tot_bulk_ev = 0.0;
  std::vector<std::string> species_added;
  std::vector<std::string> species_removed;
  double correction_ev = 0.0;

  void validate() const;
};

struct ChemicalPotentialSet {
  std::string condition;  // e.g. Zn-rich, O-rich
  std::map<std::string, double> mu_ev;

  /// Throws ValidationError naming the species when absent.
  double lookup(const std::string& species, const std::string& defect) const;
};

struct HostBand {
  double gap_ev = 3.31;  // VBM is the energy zero throughout

  void validate() const;
};

struct ChargeLine {
  int q = 0;
  double intercept_ev = 0.0;  // formation energy at E_F = 0
};

/// Lower envelope of the charge-state lines of one defect over [0, gap].
/// stable_q has one entry per segment; breakpoints_ev the gap-interior
/// transition levels between consecutive segments (size stable_q.size()-1).
struct FormationLine {
  std::string defect;
  std::vector<ChargeLine> lines;  // descending q
  std::vector<int> stable_q;
  std::vector<double> breakpoints_ev;

  double envelope_ev(double e_fermi_ev) const;  // pointwise min over lines
};

/// E^f = E_tot[X^q] - E_tot[bulk] - sum mu_added + sum mu_removed
///       + q E_F + correction.
double formation_energy(const DefectEnergyRecord& rec, const ChemicalPotentialSet& mu,
                        double e_fermi_ev);

/// Fermi level (above VBM) where the two charge states swap stability:
/// (q/q') = [E^f(q;0) - E^f(q';0)] / (q' - q). Requires q != q'.
double transition_level(const DefectEnergyRecord& rec_a, const DefectEnergyRecord& rec_b,
                        const ChemicalPotentialSet& mu);

/// Envelope of all charge states of one defect; ties at a crossing resolve
/// toward the lower |q|.
FormationLine stable_charge_envelope(const std::vector<DefectEnergyRecord>& records,
                                     const ChemicalPotentialSet& mu, const HostBand& band);

/// Sum of constituent formation energies minus the complex formation energy;
/// positive means bound. Fermi-level independent when the charges balance.
double complex_binding_energy(const std::vector<double>& ef_parts_ev, double ef_complex_ev);

}  // namespace donorspin
