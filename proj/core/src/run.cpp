#include "donorspin/run.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "donorspin/errors.hpp"
#include "donorspin/tables.hpp"

namespace donorspin {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string branch_name(Branch b) { return b == Branch::UpElectron ? "up" : "down"; }
std::string nuclear_name(Nuclear n) { return n == Nuclear::Up ? "up" : "down"; }

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (out) out << content;
    if (!out) throw ValidationError("cannot write output file '" + p.string() + "'");
    written_.push_back(p);
  }

  void discard_all() noexcept {
    for (const fs::path& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

  std::vector<std::string> paths() const {
    std::vector<std::string> out;
    for (const fs::path& p : written_) out.push_back(p.string());
    return out;
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

std::string csv_header(const std::string& hash, const std::string& columns) {
  return "# config_hash=" + hash + "\n" + columns + "\n";
}

void run_cpt_sweep(const RunConfig& cfg, const std::string& hash, ArtifactWriter& w) {
  const Spectrum spec = cpt_sweep(cfg.sweep, cfg.threads);

  std::string csv = csv_header(hash, "probe_detuning_hz,signal");
  for (size_t i = 0; i < spec.signal.size(); ++i)
    csv += format_double(spec.probe_detuning_hz[i]) + "," + format_double(spec.signal[i]) + "\n";
  w.write("spectrum.csv", csv);

  const DipReport report = find_dips(spec);
  const auto points = two_photon_points(cfg.sweep);
  ordered_json j;
  j["config_hash"] = hash;
  j["baseline"] = report.baseline;
  j["doublet"] = report.doublet;
  j["separation_hz"] = report.separation_hz;  // null when fewer than two dips
  if (std::isfinite(report.separation_hz))
    j["hyperfine_mhz"] = std::abs(report.separation_hz) / 1e6;
  if (report.doublet) {
    j["asymmetry"] = report.asymmetry;
    j["polarization_proxy"] = polarization_proxy(report, low_detuning_species(cfg.sweep));
  }
  ordered_json dips = ordered_json::array();
  for (const Dip& d : report.dips)
    dips.push_back({{"detuning_hz", d.detuning_hz}, {"depth", d.depth}});
  j["dips"] = dips;
  j["two_photon_points_hz"] = {points[0], points[1]};
  j["low_detuning_species"] = nuclear_name(low_detuning_species(cfg.sweep));
  w.write("dip_report.json", j.dump(2) + "\n");
}

void run_power_series(const RunConfig& cfg, const std::string& hash, ArtifactWriter& w) {
  const auto series = pump_power_series(cfg.sweep, cfg.power_rabi_hz, cfg.threads);
  std::string csv = csv_header(hash, "pump_rabi_hz,dip_sep_hz,p_n");
  for (const PowerPoint& p : series)
    csv += format_double(p.pump_rabi_hz) + "," + format_double(p.dip_separation_hz) + "," +
           format_double(p.nuclear_polarization) + "\n";
  w.write("power_series.csv", csv);
}

void run_energetics(const RunConfig& cfg, const std::string& hash, ArtifactWriter& w) {
  const auto records = load_defect_energies(cfg.energetics.defect_table);
  const auto mu_sets = load_chemical_potentials(cfg.energetics.chemical_potentials);
  const HostBand band{cfg.energetics.gap_ev};

  // Group records per defect, keeping first-appearance order.
  std::vector<std::string> defect_order;
  std::map<std::string, std::vector<DefectEnergyRecord>> by_defect;
  for (const DefectEnergyRecord& rec : records) {
    auto [it, inserted] = by_defect.try_emplace(rec.defect);
    if (inserted) defect_order.push_back(rec.defect);
    it->second.push_back(rec);
  }

  std::string csv = csv_header(hash, "condition,defect,e_fermi_ev,e_f_ev");
  ordered_json diagrams = ordered_json::array();
  const int points = cfg.energetics.ef_grid_points;
  for (const ChemicalPotentialSet& mu : mu_sets) {
    for (const std::string& name : defect_order) {
      const FormationLine line = stable_charge_envelope(by_defect[name], mu, band);
      for (int i = 0; i < points; ++i) {
        const double ef = band.gap_ev * i / (points - 1);
        csv += mu.condition + "," + name + "," + format_double(ef) + "," +
               format_double(line.envelope_ev(ef)) + "\n";
      }
      ordered_json lines = ordered_json::array();
      for (const ChargeLine& l : line.lines)
        lines.push_back({{"q", l.q}, {"intercept_ev", l.intercept_ev}});
      diagrams.push_back({{"condition", mu.condition},
                          {"defect", name},
                          {"lines", lines},
                          {"stable_q", line.stable_q},
                          {"breakpoints_ev", line.breakpoints_ev}});
    }
  }
  w.write("energetics_diagram.csv", csv);

  ordered_json j;
  j["config_hash"] = hash;
  j["gap_ev"] = band.gap_ev;
  j["diagrams"] = diagrams;

  if (cfg.energetics.binding) {
    const BindingSpec& spec = *cfg.energetics.binding;
    auto find_record = [&](const std::string& defect, int q) -> const DefectEnergyRecord& {
      for (const DefectEnergyRecord& rec : records)
        if (rec.defect == defect && rec.q == q) return rec;
      throw ValidationError("binding: no record for defect '" + defect + "' with q = " +
                            std::to_string(q));
    };
    const DefectEnergyRecord& complex_rec = find_record(spec.complex_name, spec.complex_q);
    ordered_json bindings = ordered_json::array();
    for (const ChemicalPotentialSet& mu : mu_sets) {
      // Reported at the VBM; Fermi-level independent when charges balance.
      std::vector<double> parts;
      for (const BindingPartRef& ref : spec.parts)
        parts.push_back(formation_energy(find_record(ref.defect, ref.q), mu, 0.0));
      bindings.push_back(
          {{"condition", mu.condition},
           {"e_bind_ev", complex_binding_energy(parts, formation_energy(complex_rec, mu, 0.0))}});
    }
    ordered_json parts = ordered_json::array();
    for (const BindingPartRef& ref : spec.parts)
      parts.push_back({{"defect", ref.defect}, {"q", ref.q}});
    j["binding"] = {{"complex", spec.complex_name},
                    {"complex_q", spec.complex_q},
                    {"parts", parts},
                    {"per_condition", bindings}};
  }
  w.write("transitions.json", j.dump(2) + "\n");
}

void run_extrapolate(const RunConfig& cfg, const std::string& hash, ArtifactWriter& w) {
  const auto points = load_hyperfine_points(cfg.extrapolate.points_table);
  const DiluteFit fit = fit_dilute(points, cfg.extrapolate.n_min);

  ordered_json j;
  j["config_hash"] = hash;
  j["intercept_mhz"] = fit.intercept_mhz;
  j["slope_mhz"] = fit.slope_mhz;  // coefficient of 1000/N
  j["n_min"] = fit.n_min;
  j["points_used"] = fit.points_used;
  j["residual_norm_mhz"] = fit.residual_norm_mhz;
  if (cfg.extrapolate.anchor) {
    const HyperfinePoint& a = *cfg.extrapolate.anchor;
    j["anchor"] = {{"n_atoms", a.n_atoms}, {"a_mhz", a.a_mhz}, {"method", a.method}};
    j["shifted_intercept_mhz"] = rigid_shift_extrapolate(fit, a);
  }
  w.write("extrapolation.json", j.dump(2) + "\n");
}

void run_levels(const RunConfig& cfg, const std::string& hash, ArtifactWriter& w) {
  const LevelDiagram diagram = optical_transitions(cfg.sweep.system);

  ordered_json j;
  j["config_hash"] = hash;
  j["ground_hz"] = diagram.ground_hz;
  j["excited_hz"] = diagram.excited_hz;
  j["secular_ok"] = diagram.secular_ok;
  ordered_json trans = ordered_json::array();
  for (const OpticalTransition& t : diagram.transitions)
    trans.push_back({{"branch", branch_name(t.branch)},
                     {"nuclear", nuclear_name(t.nuclear)},
                     {"frequency_hz", t.frequency_hz}});
  j["transitions"] = trans;
  j["raman_splitting_hz"] = {{"up", diagram.raman_splitting_hz(Nuclear::Up)},
                             {"down", diagram.raman_splitting_hz(Nuclear::Down)}};
  j["equilibrium_polarization"] = {
      {"temperature_k", cfg.temperature_k},
      {"value", equilibrium_nuclear_polarization(cfg.sweep.system, cfg.temperature_k)}};
  ordered_json refs = ordered_json::array();
  for (const HyperfineReference& r : hyperfine_reference_table())
    refs.push_back({{"donor", r.donor},
                    {"isotope", r.isotope},
                    {"theory_mhz", r.theory_mhz},
                    {"experiment_mhz", r.experiment_mhz}});
  j["reference_hyperfine_mhz"] = refs;
  w.write("levels.json", j.dump(2) + "\n");
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec)
    throw ValidationError("cannot create output directory '" + cfg.output_dir +
                          "': " + ec.message());

  const std::string hash = config_hash(cfg);
  ArtifactWriter writer{fs::path(cfg.output_dir)};
  try {
    writer.write("resolved_config.json", resolved_config_text(cfg));
    switch (cfg.subcommand) {
      case Subcommand::CptSweep: run_cpt_sweep(cfg, hash, writer); break;
      case Subcommand::PowerSeries: run_power_series(cfg, hash, writer); break;
      case Subcommand::Energetics: run_energetics(cfg, hash, writer); break;
      case Subcommand::Extrapolate: run_extrapolate(cfg, hash, writer); break;
      case Subcommand::Levels: run_levels(cfg, hash, writer); break;
    }
  } catch (...) {
    writer.discard_all();
    throw;
  }
  return {writer.paths()};
}

}  // namespace donorspin
