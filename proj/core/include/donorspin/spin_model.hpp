#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace donorspin {

/// Which electron ground branch an optical field addresses.
enum class Branch { UpElectron, DownElectron };

/// Nuclear spin label, m_I = +1/2 (up) or -1/2 (down).
enum class Nuclear { Up, Down };

inline constexpr int nuclear_sign(Nuclear n) { return n == Nuclear::Up ? +1 : -1; }

/// Donor electron (S=1/2) coupled to a single I=1/2 nucleus, plus a
/// bound-exciton excited manifold with no electron spin degree of freedom.
///
/// Sign conventions: H_hf = A S.I with A < 0 for 119Sn (negative nuclear
/// g factor), electron Zeeman +g_e mu_B B Sz/h, nuclear Zeeman
/// -g_n mu_N B Iz/h. All energies in Hz.
struct SpinSystemConfig {
  double g_electron = 1.97;        // ground donor electron g (ZnO donor value)
  double g_nuclear = -2.09456;     // 119Sn, negative
  double a_hyperfine_hz = -392.0e6;
  double g_excited = 0.0;          // effective bound-exciton Zeeman response;
                                   // common shift of all optical transitions
  double b_field_t = 6.0;
  double excited_splitting_hz = 0.0;  // residual nuclear splitting of the
                                      // excited manifold beyond its Zeeman term
  bool secular_only = false;       // drop the electron-nuclear flip-flop term

  double electron_zeeman_hz() const;  // g_e mu_B B / h
  double nuclear_zeeman_hz() const;   // g_n mu_N B / h (signed)

  void validate() const;
};

/// True when |A| is small against the electron Zeeman splitting, so product
/// states label the ground manifold well.
bool secular_regime(const SpinSystemConfig& cfg);

struct OpticalTransition {
  Branch branch;        // electron branch of the ground level
  Nuclear nuclear;      // conserved nuclear label
  double frequency_hz;  // offset from the (unmodeled) optical carrier
};

/// Ground/excited level energies and the four nuclear-conserving optical
/// transitions. Ground basis order: |ue un>, |ue dn>, |de un>, |de dn>;
/// excited: |X un>, |X dn>.
struct LevelDiagram {
  std::array<double, 4> ground_hz;
  std::array<double, 2> excited_hz;
  std::vector<OpticalTransition> transitions;
  bool secular_ok = true;

  /// Two-photon (Raman) splitting between electron branches for one nuclear
  /// sector: E(ue,n) - E(de,n).
  double raman_splitting_hz(Nuclear n) const;
};

/// 4x4 ground Hamiltonian in Hz, basis |ue un>, |ue dn>, |de un>, |de dn>.
/// Full A S.I, or A Sz Iz when cfg.secular_only.
Eigen::Matrix4cd build_ground_hamiltonian(const SpinSystemConfig& cfg);

/// 2x2 excited Hamiltonian in Hz, basis |X un>, |X dn>. Diagonal: nuclear
/// Zeeman plus the optional residual splitting. The common orbital offset
/// (g_excited) is left to optical_transitions.
Eigen::Matrix2cd build_excited_hamiltonian(const SpinSystemConfig& cfg);

/// Level diagram with the four nuclear-conserving transitions. In secular
/// mode the ground energies are the product-state diagonal; otherwise exact
/// eigenvalues matched to product labels by dominant overlap.
LevelDiagram optical_transitions(const SpinSystemConfig& cfg);

/// Thermal-equilibrium nuclear polarization tanh(g_n mu_N B / (2 k_B T)).
/// Odd in B; sign follows sign(g_n) * sign(B).
double equilibrium_nuclear_polarization(const SpinSystemConfig& cfg, double temperature_k);

}  // namespace donorspin
