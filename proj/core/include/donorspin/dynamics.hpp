#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "donorspin/spin_model.hpp"

namespace donorspin {

using Matrix6cd = Eigen::Matrix<std::complex<double>, 6, 6>;
using Vector36cd = Eigen::Matrix<std::complex<double>, 36, 1>;
using SuperMatrix = Eigen::Matrix<std::complex<double>, 36, 36>;

/// Six-level basis indices: four ground product states, two excited states.
namespace level {
inline constexpr int ue_un = 0;  // |up_e up_n>
inline constexpr int ue_dn = 1;  // |up_e dn_n>
inline constexpr int de_un = 2;  // |dn_e up_n>
inline constexpr int de_dn = 3;  // |dn_e dn_n>
inline constexpr int x_un = 4;   // |X up_n>
inline constexpr int x_dn = 5;   // |X dn_n>
}  // namespace level

/// One CW laser in the rotating-frame model. The detuning is measured from
/// the nuclear-averaged transition frequency of the addressed branch.
struct DriveSpec {
  Branch branch = Branch::UpElectron;
  double rabi_hz = 0.0;
  double detuning_hz = 0.0;

  void validate() const;
};

/// Incoherent channels. All rates in Hz; a rate g produces population decay
/// exp(-2 pi g t) through its channel.
struct DissipatorSpec {
  double gamma_rad_hz = 100.0e6;      // excited radiative decay
  double branching_up = 0.5;          // fraction of decay into |up_e>
  double gamma_deph_opt_hz = 20.0e6;  // excited-state dephasing
  double gamma_e_relax_hz = 0.0;      // electron T1^-1, nuclear-conserving,
                                      // both directions (T1 >> optical scales)
  double w_flipflop_down_hz = 0.2e6;  // |ue dn> -> |de un|
  double w_flipflop_up_hz = 0.2e6;    // |de un> -> |ue dn>
  double w_nuc_flip_hz = 0.0;         // bare nuclear flips, both directions

  void validate() const;
};

/// 6x6 state, unit trace, basis per donorspin::level.
struct DensityMatrix {
  Matrix6cd rho = Matrix6cd::Zero();

  static DensityMatrix pure(int lvl);
  static DensityMatrix maximally_mixed();
  static DensityMatrix ground_mixed();  // uniform over the four ground states

  double trace_real() const { return rho.trace().real(); }
  double hermiticity_error() const;  // max |rho - rho^dag|
  double min_eigenvalue() const;

  void validate(double trace_tol = 1e-10, double positivity_tol = 1e-9) const;
};

Vector36cd vectorize(const Matrix6cd& m);
Matrix6cd unvectorize(const Vector36cd& v);

struct FrameInfo {
  DriveSpec pump;
  DriveSpec probe;
};

/// Lindblad generator acting on the column-stacked density matrix, in 1/s.
/// scale is the largest entry magnitude; residuals are reported relative to it.
struct Liouvillian {
  SuperMatrix matrix = SuperMatrix::Zero();
  DissipatorSpec dissipators;
  std::optional<FrameInfo> frame;
  double scale = 0.0;

  /// Trace-preservation defect: max entry of vec(I)^T L / scale.
  double trace_leak() const;
};

struct Observables {
  std::array<double, 6> populations{};
  double excited_total = 0.0;
  double electron_polarization = 0.0;  // over ground branches
  double nuclear_polarization = 0.0;   // (P_up_n - P_dn_n)/(P_up_n + P_dn_n)
};

struct TimeSample {
  double time_s = 0.0;
  DensityMatrix state;
};

/// Time-independent RWA Hamiltonian (Hz) for pump and probe on opposite
/// electron branches. Diagonals carry hyperfine and two-photon detunings in
/// the pump-referenced frame; off-diagonals carry half Rabi rates between
/// each branch and the nuclear-matched excited state. Cross-driving omitted.
Matrix6cd assemble_rotating_frame(const SpinSystemConfig& cfg, const DriveSpec& pump,
                                  const DriveSpec& probe);

/// L = 2 pi ( -i[H, .] + sum_k D[c_k] ), H Hermitian in Hz, rates in Hz.
Liouvillian build_liouvillian(const Matrix6cd& h_eff, const DissipatorSpec& dis);

/// Convenience: rotating frame plus dissipators, with frame metadata filled.
Liouvillian make_liouvillian(const SpinSystemConfig& cfg, const DriveSpec& pump,
                             const DriveSpec& probe, const DissipatorSpec& dis);

/// Unique steady state via a bordered linear solve (trace row replaces one
/// equation of L). Throws NumericalError when the kernel is not
/// one-dimensional or tolerances cannot be met. Optional out: scaled residual.
DensityMatrix steady_state(const Liouvillian& liou, double* residual_out = nullptr);

/// Fixed-step RK4 propagation. Records every record_stride-th step plus the
/// final state. Instability (trace or positivity breakdown) raises
/// NumericalError suggesting a smaller step.
std::vector<TimeSample> time_evolve(const Liouvillian& liou, const DensityMatrix& rho0,
                                    double duration_s, double step_s, int record_stride = 1);

/// 10^-2 over the fastest frequency scale present in the generator.
double default_time_step(const Liouvillian& liou);

Observables observables(const DensityMatrix& state);

}  // namespace donorspin
