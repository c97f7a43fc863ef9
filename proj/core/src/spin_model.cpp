#include "donorspin/spin_model.hpp"

#include <cmath>
#include <complex>

#include "donorspin/constants.hpp"
#include "donorspin/errors.hpp"

namespace donorspin {

namespace {

// m_S, m_I in half-units for the fixed ground basis order.
constexpr double kMs[4] = {+0.5, +0.5, -0.5, -0.5};
constexpr double kMi[4] = {+0.5, -0.5, +0.5, -0.5};

double secular_ground_energy(const SpinSystemConfig& cfg, int level) {
  return cfg.electron_zeeman_hz() * kMs[level] - cfg.nuclear_zeeman_hz() * kMi[level] +
         cfg.a_hyperfine_hz * kMs[level] * kMi[level];
}

}  // namespace

double SpinSystemConfig::electron_zeeman_hz() const {
  return g_electron * constants::mu_bohr * b_field_t / constants::planck;
}

double SpinSystemConfig::nuclear_zeeman_hz() const {
  return g_nuclear * constants::mu_nuclear * b_field_t / constants::planck;
}

void SpinSystemConfig::validate() const {
  if (!(b_field_t >= 0.0)) throw ValidationError("system.b_field_t must be >= 0");
  if (!(g_electron > 0.0)) throw ValidationError("system.g_electron must be > 0");
  if (!std::isfinite(a_hyperfine_hz)) throw ValidationError("system.a_hyperfine_hz must be finite");
  if (!std::isfinite(g_nuclear) || !std::isfinite(g_excited) || !std::isfinite(excited_splitting_hz))
    throw ValidationError("system parameters must be finite");
}

bool secular_regime(const SpinSystemConfig& cfg) {
  // |A| well below the electron Zeeman splitting.
  return std::abs(cfg.a_hyperfine_hz) * 20.0 <= std::abs(cfg.electron_zeeman_hz());
}

Eigen::Matrix4cd build_ground_hamiltonian(const SpinSystemConfig& cfg) {
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  for (int k = 0; k < 4; ++k) h(k, k) = secular_ground_energy(cfg, k);
  if (!cfg.secular_only) {
    // A (S+I- + S-I+)/2 couples |ue dn> and |de un>.
    h(1, 2) = 0.5 * cfg.a_hyperfine_hz;
    h(2, 1) = 0.5 * cfg.a_hyperfine_hz;
  }
  return h;
}

Eigen::Matrix2cd build_excited_hamiltonian(const SpinSystemConfig& cfg) {
  const double split = cfg.excited_splitting_hz - cfg.nuclear_zeeman_hz();
  Eigen::Matrix2cd h = Eigen::Matrix2cd::Zero();
  h(0, 0) = +0.5 * split;  // |X un>
  h(1, 1) = -0.5 * split;  // |X dn>
  return h;
}

LevelDiagram optical_transitions(const SpinSystemConfig& cfg) {
  LevelDiagram d;
  d.secular_ok = secular_regime(cfg);

  if (cfg.secular_only) {
    for (int k = 0; k < 4; ++k) d.ground_hz[k] = secular_ground_energy(cfg, k);
  } else {
    // Exact eigenvalues, assigned to product labels by dominant overlap.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(build_ground_hamiltonian(cfg));
    std::array<bool, 4> taken{};
    for (int v = 0; v < 4; ++v) {
      int best = -1;
      double best_w = -1.0;
      for (int k = 0; k < 4; ++k) {
        if (taken[k]) continue;
        const double w = std::norm(es.eigenvectors()(k, v));
        if (w > best_w) {
          best_w = w;
          best = k;
        }
      }
      taken[best] = true;
      d.ground_hz[best] = es.eigenvalues()(v);
    }
  }

  const Eigen::Matrix2cd hx = build_excited_hamiltonian(cfg);
  const double orbital = 0.5 * cfg.g_excited * constants::mu_bohr * cfg.b_field_t / constants::planck;
  d.excited_hz[0] = hx(0, 0).real() + orbital;
  d.excited_hz[1] = hx(1, 1).real() + orbital;

  d.transitions.reserve(4);
  for (int k = 0; k < 4; ++k) {
    const Branch b = k < 2 ? Branch::UpElectron : Branch::DownElectron;
    const Nuclear n = (k % 2 == 0) ? Nuclear::Up : Nuclear::Down;
    const int xi = (n == Nuclear::Up) ? 0 : 1;
    d.transitions.push_back({b, n, d.excited_hz[xi] - d.ground_hz[k]});
  }
  return d;
}

double LevelDiagram::raman_splitting_hz(Nuclear n) const {
  const int i = (n == Nuclear::Up) ? 0 : 1;
  return ground_hz[i] - ground_hz[i + 2];
}

double equilibrium_nuclear_polarization(const SpinSystemConfig& cfg, double temperature_k) {
  if (!(temperature_k > 0.0)) throw ValidationError("temperature_k must be > 0");
  const double x = cfg.g_nuclear * constants::mu_nuclear * cfg.b_field_t /
                   (2.0 * constants::boltzmann * temperature_k);
  return std::tanh(x);
}

}  // namespace donorspin
