#include "donorspin/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "donorspin/errors.hpp"

namespace donorspin {

void DefectEnergyRecord::validate() const {
  if (defect.empty()) throw ValidationError("defect record has an empty name");
  for (double v : {e_tot_defect_ev, e_tot_bulk_ev, correction_ev})
    if (!std::isfinite(v))
      throw ValidationError("defect '" + defect + "': energies must be finite");
}

double ChemicalPotentialSet::lookup(const std::string& species, const std::string& defect) const {
  auto it = mu_ev.find(species);
  if (it == mu_ev.end())
    throw ValidationError("chemical potential set '" + condition + "' is missing species '" +
                          species + "' (needed by defect '" + defect + "')");
  return it->second;
}

void HostBand::validate() const {
  if (!std::isfinite(gap_ev) || !(gap_ev > 0.0))
    throw ValidationError("band.gap_ev must be finite and > 0");
}

double FormationLine::envelope_ev(double e_fermi_ev) const {
  double best = std::numeric_limits<double>::infinity();
  for (const ChargeLine& l : lines)
    best = std::min(best, l.intercept_ev + l.q * e_fermi_ev);
  return best;
}

double formation_energy(const DefectEnergyRecord& rec, const ChemicalPotentialSet& mu,
                        double e_fermi_ev) {
  rec.validate();
  if (!std::isfinite(e_fermi_ev)) throw ValidationError("e_fermi_ev must be finite");
  double ef = rec.e_tot_defect_ev - rec.e_tot_bulk_ev;
  for (const std::string& s : rec.species_added) ef -= mu.lookup(s, rec.defect);
  for (const std::string& s : rec.species_removed) ef += mu.lookup(s, rec.defect);
  return ef + rec.q * e_fermi_ev + rec.correction_ev;
}

double transition_level(const DefectEnergyRecord& rec_a, const DefectEnergyRecord& rec_b,
                        const ChemicalPotentialSet& mu) {
  if (rec_a.q == rec_b.q)
    throw ValidationError("transition level undefined for equal charge states (q = " +
                          std::to_string(rec_a.q) + ")");
  const double ef_a = formation_energy(rec_a, mu, 0.0);
  const double ef_b = formation_energy(rec_b, mu, 0.0);
  return (ef_a - ef_b) / static_cast<double>(rec_b.q - rec_a.q);
}

FormationLine stable_charge_envelope(const std::vector<DefectEnergyRecord>& records,
                                     const ChemicalPotentialSet& mu, const HostBand& band) {
  band.validate();
  if (records.empty())
    throw ValidationError("stable_charge_envelope needs at least one charge state");

  FormationLine out;
  out.defect = records.front().defect;
  for (const DefectEnergyRecord& rec : records) {
    if (rec.defect != out.defect)
      throw ValidationError("stable_charge_envelope: mixed defects '" + out.defect + "' and '" +
                            rec.defect + "'");
    for (const ChargeLine& l : out.lines)
      if (l.q == rec.q)
        throw ValidationError("defect '" + out.defect + "': duplicate charge state q = " +
                              std::to_string(rec.q));
    out.lines.push_back({rec.q, formation_energy(rec, mu, 0.0)});
  }
  std::sort(out.lines.begin(), out.lines.end(),
            [](const ChargeLine& a, const ChargeLine& b) { return a.q > b.q; });

  // Walk the lower envelope left to right. The active slope can only
  // decrease, so only lines with smaller q can take over.
  auto pick = [&](double ef) {
    int best = 0;
    for (size_t i = 1; i < out.lines.size(); ++i) {
      const double cur = out.lines[best].intercept_ev + out.lines[best].q * ef;
      const double cand = out.lines[i].intercept_ev + out.lines[i].q * ef;
      if (cand < cur ||
          (cand == cur && std::abs(out.lines[i].q) < std::abs(out.lines[best].q)))
        best = static_cast<int>(i);
    }
    return best;
  };

  int active = pick(0.0);
  out.stable_q.push_back(out.lines[active].q);
  double ef = 0.0;
  while (true) {
    // Earliest crossing beyond ef where a lower-slope line dips under.
    double next_ef = std::numeric_limits<double>::infinity();
    int next = -1;
    for (size_t i = 0; i < out.lines.size(); ++i) {
      const ChargeLine& cand = out.lines[i];
      const ChargeLine& cur = out.lines[active];
      if (cand.q >= cur.q) continue;
      const double cross = (cand.intercept_ev - cur.intercept_ev) /
                           static_cast<double>(cur.q - cand.q);
      if (cross <= ef || cross >= band.gap_ev) continue;
      if (cross < next_ef ||
          (cross == next_ef && std::abs(cand.q) < std::abs(out.lines[next].q)))
        { next_ef = cross; next = static_cast<int>(i); }
    }
    if (next < 0) break;
    // The crossing line must actually be the minimum there, not an already
    // superseded one.
    const double probe_ef = next_ef;
    const int winner = pick(std::nextafter(probe_ef, band.gap_ev));
    if (winner == active) { ef = probe_ef; continue; }
    active = winner;
    ef = probe_ef;
    out.stable_q.push_back(out.lines[active].q);
    out.breakpoints_ev.push_back(probe_ef);
  }
  return out;
}

double complex_binding_energy(const std::vector<double>& ef_parts_ev, double ef_complex_ev) {
  if (ef_parts_ev.empty())
    throw ValidationError("complex_binding_energy needs at least one constituent");
  double sum = 0.0;
  for (double v : ef_parts_ev) {
    if (!std::isfinite(v)) throw ValidationError("constituent formation energies must be finite");
    sum += v;
  }
  if (!std::isfinite(ef_complex_ev))
    throw ValidationError("complex formation energy must be finite");
  return sum - ef_complex_ev;
}

}  // namespace donorspin
