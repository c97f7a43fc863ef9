#include "donorspin/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "donorspin/constants.hpp"
#include "donorspin/errors.hpp"

namespace donorspin {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

Matrix6cd ketbra(int i, int j) {
  Matrix6cd m = Matrix6cd::Zero();
  m(i, j) = 1.0;
  return m;
}

SuperMatrix kron6(const Matrix6cd& a, const Matrix6cd& b) {
  SuperMatrix out;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) out.block<6, 6>(6 * i, 6 * j) = a(i, j) * b;
  return out;
}

// sqrt(rate) * op for every active channel.
std::vector<Matrix6cd> collapse_operators(const DissipatorSpec& d) {
  namespace lv = level;
  std::vector<Matrix6cd> ops;
  auto add = [&ops](double rate_hz, const Matrix6cd& op) {
    if (rate_hz > 0.0) ops.push_back(std::sqrt(rate_hz) * op);
  };

  // Radiative decay conserves the nuclear spin and branches between the two
  // electron ground states.
  add(d.gamma_rad_hz * d.branching_up, ketbra(lv::ue_un, lv::x_un));
  add(d.gamma_rad_hz * (1.0 - d.branching_up), ketbra(lv::de_un, lv::x_un));
  add(d.gamma_rad_hz * d.branching_up, ketbra(lv::ue_dn, lv::x_dn));
  add(d.gamma_rad_hz * (1.0 - d.branching_up), ketbra(lv::de_dn, lv::x_dn));

  // Pure dephasing of the excited manifold against the ground manifold.
  add(d.gamma_deph_opt_hz, ketbra(lv::x_un, lv::x_un) + ketbra(lv::x_dn, lv::x_dn));

  // Electron spin relaxation, nuclear-conserving, equal rates both ways.
  add(d.gamma_e_relax_hz, ketbra(lv::ue_un, lv::de_un));
  add(d.gamma_e_relax_hz, ketbra(lv::de_un, lv::ue_un));
  add(d.gamma_e_relax_hz, ketbra(lv::ue_dn, lv::de_dn));
  add(d.gamma_e_relax_hz, ketbra(lv::de_dn, lv::ue_dn));

  // Hyperfine flip-flops exchange electron and nuclear spin.
  add(d.w_flipflop_down_hz, ketbra(lv::de_un, lv::ue_dn));
  add(d.w_flipflop_up_hz, ketbra(lv::ue_dn, lv::de_un));

  // Bare nuclear flips within each electron manifold.
  for (auto [up, dn] : {std::pair{lv::ue_un, lv::ue_dn}, std::pair{lv::de_un, lv::de_dn},
                        std::pair{lv::x_un, lv::x_dn}}) {
    add(d.w_nuc_flip_hz, ketbra(dn, up));
    add(d.w_nuc_flip_hz, ketbra(up, dn));
  }
  return ops;
}

}  // namespace

void DriveSpec::validate() const {
  if (!std::isfinite(rabi_hz) || rabi_hz < 0.0)
    throw ValidationError("drive.rabi_hz must be finite and >= 0");
  if (!std::isfinite(detuning_hz)) throw ValidationError("drive.detuning_hz must be finite");
}

void DissipatorSpec::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError(std::string("rates.") + name + " must be finite and >= 0");
  };
  check(gamma_rad_hz, "gamma_rad_hz");
  check(gamma_deph_opt_hz, "gamma_deph_opt_hz");
  check(gamma_e_relax_hz, "gamma_e_relax_hz");
  check(w_flipflop_down_hz, "w_flipflop_down_hz");
  check(w_flipflop_up_hz, "w_flipflop_up_hz");
  check(w_nuc_flip_hz, "w_nuc_flip_hz");
  if (!std::isfinite(branching_up) || branching_up < 0.0 || branching_up > 1.0)
    throw ValidationError("rates.branching_up must lie in [0, 1]");
}

DensityMatrix DensityMatrix::pure(int lvl) {
  if (lvl < 0 || lvl >= 6) throw ValidationError("DensityMatrix::pure: level out of range");
  DensityMatrix d;
  d.rho(lvl, lvl) = 1.0;
  return d;
}

DensityMatrix DensityMatrix::maximally_mixed() {
  DensityMatrix d;
  d.rho = Matrix6cd::Identity() / 6.0;
  return d;
}

DensityMatrix DensityMatrix::ground_mixed() {
  DensityMatrix d;
  for (int i = 0; i < 4; ++i) d.rho(i, i) = 0.25;
  return d;
}

double DensityMatrix::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix6cd> es(0.5 * (rho + rho.adjoint()),
                                              Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double trace_tol, double positivity_tol) const {
  if (!rho.allFinite()) throw NumericalError("density matrix has non-finite entries");
  if (std::abs(trace_real() - 1.0) > trace_tol)
    throw NumericalError("density matrix trace deviates from 1");
  if (hermiticity_error() > 10.0 * trace_tol)
    throw NumericalError("density matrix is not Hermitian");
  if (min_eigenvalue() < -positivity_tol)
    throw NumericalError("density matrix has a negative eigenvalue");
}

Vector36cd vectorize(const Matrix6cd& m) {
  return Eigen::Map<const Vector36cd>(m.data());
}

Matrix6cd unvectorize(const Vector36cd& v) {
  return Eigen::Map<const Matrix6cd>(v.data());
}

double Liouvillian::trace_leak() const {
  if (!(scale > 0.0)) return 0.0;
  Eigen::Matrix<std::complex<double>, 1, 36> tr_row;
  tr_row.setZero();
  for (int i = 0; i < 6; ++i) tr_row(7 * i) = 1.0;
  return (tr_row * matrix).cwiseAbs().maxCoeff() / scale;
}

Matrix6cd assemble_rotating_frame(const SpinSystemConfig& cfg, const DriveSpec& pump,
                                  const DriveSpec& probe) {
  cfg.validate();
  pump.validate();
  probe.validate();
  if (pump.branch == probe.branch)
    throw ValidationError("pump and probe must address opposite electron branches");

  namespace lv = level;
  const double zn = cfg.nuclear_zeeman_hz();
  const double a = cfg.a_hyperfine_hz;

  // Deviation of each level from its branch mean; each laser frequency and
  // the electron Zeeman energy are absorbed into the frame.
  auto ground_dev = [&](Branch b, double mi) {
    double a_half = (b == Branch::UpElectron) ? 0.5 * a : -0.5 * a;
    return mi * (-zn + a_half);
  };
  auto excited_dev = [&](double mi) { return mi * (cfg.excited_splitting_hz - zn); };

  const double two_photon = probe.detuning_hz - pump.detuning_hz;
  Matrix6cd h = Matrix6cd::Zero();
  for (auto [b, lvl_up, lvl_dn] : {std::tuple{Branch::UpElectron, lv::ue_un, lv::ue_dn},
                                   std::tuple{Branch::DownElectron, lv::de_un, lv::de_dn}}) {
    double shift = (b == pump.branch) ? 0.0 : two_photon;
    h(lvl_up, lvl_up) = ground_dev(b, 0.5) + shift;
    h(lvl_dn, lvl_dn) = ground_dev(b, -0.5) + shift;
  }
  h(lv::x_un, lv::x_un) = excited_dev(0.5) - pump.detuning_hz;
  h(lv::x_dn, lv::x_dn) = excited_dev(-0.5) - pump.detuning_hz;

  for (const DriveSpec* drv : {&pump, &probe}) {
    int g_up = (drv->branch == Branch::UpElectron) ? lv::ue_un : lv::de_un;
    int g_dn = (drv->branch == Branch::UpElectron) ? lv::ue_dn : lv::de_dn;
    h(g_up, lv::x_un) += 0.5 * drv->rabi_hz;
    h(lv::x_un, g_up) += 0.5 * drv->rabi_hz;
    h(g_dn, lv::x_dn) += 0.5 * drv->rabi_hz;
    h(lv::x_dn, g_dn) += 0.5 * drv->rabi_hz;
  }
  return h;
}

Liouvillian build_liouvillian(const Matrix6cd& h_eff, const DissipatorSpec& dis) {
  dis.validate();
  double h_mag = h_eff.cwiseAbs().maxCoeff();
  if (!h_eff.allFinite()) throw ValidationError("effective Hamiltonian has non-finite entries");
  if ((h_eff - h_eff.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, h_mag))
    throw ValidationError("effective Hamiltonian must be Hermitian");

  const Matrix6cd id = Matrix6cd::Identity();
  const std::complex<double> im(0.0, 1.0);
  SuperMatrix k = -im * (kron6(id, h_eff) - kron6(h_eff.transpose(), id));
  for (const Matrix6cd& c : collapse_operators(dis)) {
    Matrix6cd cdc = c.adjoint() * c;
    k += kron6(c.conjugate(), c) - 0.5 * kron6(id, cdc) - 0.5 * kron6(cdc.transpose(), id);
  }

  Liouvillian liou;
  liou.matrix = kTwoPi * k;
  liou.dissipators = dis;
  liou.scale = liou.matrix.cwiseAbs().maxCoeff();
  return liou;
}

Liouvillian make_liouvillian(const SpinSystemConfig& cfg, const DriveSpec& pump,
                             const DriveSpec& probe, const DissipatorSpec& dis) {
  Liouvillian liou = build_liouvillian(assemble_rotating_frame(cfg, pump, probe), dis);
  liou.frame = FrameInfo{pump, probe};
  return liou;
}

DensityMatrix steady_state(const Liouvillian& liou, double* residual_out) {
  if (!(liou.scale > 0.0) || !std::isfinite(liou.scale))
    throw NumericalError("steady_state: generator is zero or non-finite");
  const SuperMatrix ls = liou.matrix / liou.scale;

  Eigen::FullPivLU<SuperMatrix> full(ls);
  full.setThreshold(1e-10);
  if (full.rank() < 35)
    throw NumericalError(
        "steady_state: stationary subspace has dimension > 1, steady state is not unique "
        "(disconnected levels; add a relaxation channel or a drive)");

  // Bordered system: replace the first equation with the trace constraint.
  SuperMatrix m = ls;
  m.row(0).setZero();
  for (int i = 0; i < 6; ++i) m(0, 7 * i) = 1.0;
  Vector36cd b = Vector36cd::Zero();
  b(0) = 1.0;

  Eigen::PartialPivLU<SuperMatrix> lu(m);
  Vector36cd x = lu.solve(b);
  x += lu.solve(b - m * x);

  Matrix6cd rho = 0.5 * (unvectorize(x) + unvectorize(x).adjoint());
  double tr = rho.trace().real();
  if (!(std::abs(tr) > 0.5))
    throw NumericalError("steady_state: kernel vector has vanishing trace");
  rho /= tr;

  double res = (ls * vectorize(rho)).cwiseAbs().maxCoeff();
  if (residual_out) *residual_out = res;
  if (!(res < 1e-9)) {
    std::ostringstream msg;
    msg << "steady_state: scaled residual " << res << " exceeds 1e-9";
    throw NumericalError(msg.str());
  }

  Eigen::SelfAdjointEigenSolver<Matrix6cd> es(rho, Eigen::EigenvaluesOnly);
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-9) {
    std::ostringstream msg;
    msg << "steady_state: negative population " << min_eig << " below -1e-9";
    throw NumericalError(msg.str());
  }

  DensityMatrix out;
  out.rho = rho;
  return out;
}

std::vector<TimeSample> time_evolve(const Liouvillian& liou, const DensityMatrix& rho0,
                                    double duration_s, double step_s, int record_stride) {
  if (!(step_s > 0.0) || !std::isfinite(step_s))
    throw ValidationError("time_evolve: step_s must be finite and > 0");
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s))
    throw ValidationError("time_evolve: duration_s must be finite and >= 0");
  if (record_stride < 1) throw ValidationError("time_evolve: record_stride must be >= 1");

  const SuperMatrix& a = liou.matrix;
  const double tr0 = rho0.trace_real();
  Vector36cd v = vectorize(rho0.rho);

  auto rk4 = [&a](Vector36cd& y, double dt) {
    Vector36cd k1 = a * y;
    Vector36cd k2 = a * (y + (0.5 * dt) * k1);
    Vector36cd k3 = a * (y + (0.5 * dt) * k2);
    Vector36cd k4 = a * (y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  auto unstable = [&](double t) {
    std::ostringstream msg;
    msg << "time_evolve: integration unstable at t = " << t
        << " s; reduce step_s (default_time_step() gives a safe value)";
    return NumericalError(msg.str());
  };

  const long n_full = static_cast<long>(std::floor(duration_s / step_s + 1e-9));
  const double remainder = duration_s - static_cast<double>(n_full) * step_s;
  const bool has_tail = remainder > 1e-12 * step_s;

  std::vector<TimeSample> samples;
  samples.push_back({0.0, rho0});
  double t = 0.0;
  for (long i = 0; i < n_full + (has_tail ? 1 : 0); ++i) {
    const double dt = (i < n_full) ? step_s : remainder;
    rk4(v, dt);
    t = (i < n_full) ? (i + 1) * step_s : duration_s;

    if (!v.allFinite()) throw unstable(t);
    std::complex<double> tr = 0.0;
    for (int d = 0; d < 6; ++d) tr += v(7 * d);
    if (std::abs(tr.real() - tr0) > 1e-6 || std::abs(tr.imag()) > 1e-6) throw unstable(t);
    if (i % 64 == 63) {
      DensityMatrix probe;
      probe.rho = unvectorize(v);
      if (probe.min_eigenvalue() < -1e-6) throw unstable(t);
    }

    const bool last = (i == n_full + (has_tail ? 1 : 0) - 1);
    if (last || (i + 1) % record_stride == 0) {
      DensityMatrix s;
      s.rho = unvectorize(v);
      samples.push_back({t, s});
    }
  }
  return samples;
}

double default_time_step(const Liouvillian& liou) {
  if (!(liou.scale > 0.0)) return 1.0;
  return kTwoPi * 1e-2 / liou.scale;
}

Observables observables(const DensityMatrix& state) {
  Observables o;
  for (int i = 0; i < 6; ++i) o.populations[i] = state.rho(i, i).real();
  o.excited_total = o.populations[level::x_un] + o.populations[level::x_dn];

  const double gu = o.populations[level::ue_un] + o.populations[level::ue_dn];
  const double gd = o.populations[level::de_un] + o.populations[level::de_dn];
  if (gu + gd > std::numeric_limits<double>::min())
    o.electron_polarization = (gu - gd) / (gu + gd);

  const double nu =
      o.populations[level::ue_un] + o.populations[level::de_un] + o.populations[level::x_un];
  const double nd =
      o.populations[level::ue_dn] + o.populations[level::de_dn] + o.populations[level::x_dn];
  if (nu + nd > std::numeric_limits<double>::min())
    o.nuclear_polarization = (nu - nd) / (nu + nd);
  return o;
}

}  // namespace donorspin
