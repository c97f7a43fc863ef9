#pragma once

#include <string>
#include <vector>

#include "donorspin/energetics.hpp"
#include "donorspin/extrapolation.hpp"

namespace donorspin {

/// Shortest round-trip decimal form, locale-free; used by every writer so
/// outputs are byte-stable.
std::string format_double(double v);

/// Comma-separated tables with a header row naming every column; '#' lines
/// are comments. Errors carry file and line. No quoting; list-valued cells
/// use ';' between entries.

/// Columns: defect,q,e_tot_defect_ev,e_tot_bulk_ev,species_added,
/// species_removed,correction_ev. The correction cell may be empty only for
/// q = 0.
std::vector<DefectEnergyRecord> load_defect_energies(const std::string& path);

/// Long format, columns: condition,species,mu_ev; one set per condition.
std::vector<ChemicalPotentialSet> load_chemical_potentials(const std::string& path);

/// Columns: n_atoms,a_mhz,method.
std::vector<HyperfinePoint> load_hyperfine_points(const std::string& path);

}  // namespace donorspin
