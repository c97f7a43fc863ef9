#pragma once

#include <array>
#include <vector>

#include "donorspin/dynamics.hpp"
#include "donorspin/spin_model.hpp"

namespace donorspin {

struct ProbeGrid {
  double start_hz = -500.0e6;
  double stop_hz = 500.0e6;
  int points = 1001;

  void validate() const;
  double step_hz() const { return (stop_hz - start_hz) / (points - 1); }
  double at(int i) const { return start_hz + i * step_hz(); }
};

/// Gaussian spread of the optical transition frequency common to pump and
/// probe, specified as a FWHM; 0 disables averaging. Averaged by
/// Gauss-Hermite quadrature; two-photon features are unaffected because the
/// shift cancels between the lasers.
struct EnsembleSpec {
  double fwhm_hz = 0.0;
  int nodes = 21;

  void validate() const;
  double sigma_hz() const;
};

struct SweepConfig {
  SpinSystemConfig system;
  // Fixed laser; the probe takes the opposite branch. The default drive
  // settings resolve the hyperfine doublet with the default rates.
  DriveSpec pump{Branch::UpElectron, 40.0e6, 0.0};
  double probe_rabi_hz = 10.0e6;
  ProbeGrid grid;
  DissipatorSpec rates;
  EnsembleSpec ensemble;

  void validate() const;
  Branch probe_branch() const {
    return pump.branch == Branch::UpElectron ? Branch::DownElectron : Branch::UpElectron;
  }
};

struct Spectrum {
  std::vector<double> probe_detuning_hz;
  std::vector<double> signal;  // ensemble-averaged excited-state population
};

struct Dip {
  double detuning_hz = 0.0;
  double depth = 0.0;  // (baseline - refined minimum) / baseline
};

struct DipReport {
  std::vector<Dip> dips;        // ascending detuning
  double baseline = 0.0;        // median signal
  double separation_hz = 0.0;   // between the two deepest dips; NaN if < 2
  double asymmetry = 0.0;       // (low depth - high depth) / sum; 0 unless doublet
  bool doublet = false;         // exactly two dips found
};

struct PowerPoint {
  double pump_rabi_hz = 0.0;
  double dip_separation_hz = 0.0;
  double nuclear_polarization = 0.0;
  Spectrum spectrum;
  DipReport dips;
};

/// Nodes and probability weights for averaging a standard normal variable;
/// shift values are sigma * sqrt(2) * x_i with weights summing to one.
std::vector<std::pair<double, double>> gauss_hermite_nodes(int n);

/// Steady-state probe sweep. Signal at each grid point is the excited
/// population averaged over the ensemble nodes. Deterministic for any thread
/// count: points are index-addressed and node sums run in fixed order.
Spectrum cpt_sweep(const SweepConfig& cfg, int threads = 1);

/// Ensemble-averaged steady-state observables at one probe detuning.
Observables observables_at(const SweepConfig& cfg, double probe_detuning_hz);

/// Probe detunings of the two-photon resonances, ascending. The dark
/// resonance of nuclear species m sits at pump detuning + s*m*A with s = +1
/// when the pump addresses the up branch and -1 otherwise.
std::array<double, 2> two_photon_points(const SweepConfig& cfg);
double two_photon_point(const SweepConfig& cfg, Nuclear species);

/// Nuclear species whose dip appears at the lower probe detuning.
Nuclear low_detuning_species(const SweepConfig& cfg);

/// Local minima below the median baseline, positions refined by a parabola
/// through the three bracketing samples. Needs at least 5 points; an empty
/// report (not an error) when nothing drops below the detection threshold.
DipReport find_dips(const Spectrum& spectrum);

/// Nuclear polarization estimated from the doublet depth asymmetry: the dip
/// of a nuclear species deepens with that species' population, so
/// (depth_up - depth_down) / (depth_up + depth_down) tracks the sign of P_N
/// for weak probes. `low_species` labels the lower-detuning dip. NaN unless
/// the report is a doublet.
double polarization_proxy(const DipReport& report, Nuclear low_species);

/// |separation| of the doublet; equals the hyperfine constant magnitude.
double extract_hyperfine_hz(const DipReport& report);

/// Sweeps repeated over pump Rabi rates (at least two). Nuclear polarization
/// is evaluated with the probe parked on the lower-detuning dark resonance,
/// so series taken on opposite pump branches compare at the same probe
/// detuning.
std::vector<PowerPoint> pump_power_series(const SweepConfig& base,
                                          const std::vector<double>& pump_rabi_hz,
                                          int threads = 1);

}  // namespace donorspin
