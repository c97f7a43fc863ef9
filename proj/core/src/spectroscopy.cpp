#include "donorspin/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "donorspin/errors.hpp"
#include "donorspin/parallel.hpp"

namespace donorspin {

namespace {

Observables point_observables(const SweepConfig& cfg, double probe_detuning_hz,
                              const std::vector<std::pair<double, double>>& nodes) {
  // With no inhomogeneous width every node solves the same problem; collapse
  // the quadrature to one unshifted solve.
  const double sigma = cfg.ensemble.sigma_hz();
  static const std::vector<std::pair<double, double>> kUnshifted{{0.0, 1.0}};
  const auto& active = sigma == 0.0 ? kUnshifted : nodes;

  std::array<double, 6> acc{};
  for (const auto& [x, w] : active) {
    const double shift = sigma * std::sqrt(2.0) * x;
    DriveSpec pump = cfg.pump;
    pump.detuning_hz -= shift;
    DriveSpec probe;
    probe.branch = cfg.probe_branch();
    probe.rabi_hz = cfg.probe_rabi_hz;
    probe.detuning_hz = probe_detuning_hz - shift;

    const Observables o = observables(steady_state(make_liouvillian(cfg.system, pump, probe, cfg.rates)));
    for (int i = 0; i < 6; ++i) acc[i] += w * o.populations[i];
  }

  DensityMatrix avg;
  for (int i = 0; i < 6; ++i) avg.rho(i, i) = acc[i];
  return observables(avg);
}

double median(std::vector<double> v) {
  const size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
  return 0.5 * (v[n / 2 - 1] + hi);
}

}  // namespace

void ProbeGrid::validate() const {
  if (points < 2) throw ValidationError("grid.points must be >= 2");
  if (!std::isfinite(start_hz) || !std::isfinite(stop_hz))
    throw ValidationError("grid bounds must be finite");
  if (!(stop_hz > start_hz)) throw ValidationError("grid.stop_hz must exceed grid.start_hz");
}

void EnsembleSpec::validate() const {
  if (!std::isfinite(fwhm_hz) || fwhm_hz < 0.0)
    throw ValidationError("ensemble.inhomogeneous_fwhm_hz must be finite and >= 0");
  if (nodes < 1 || nodes > 201) throw ValidationError("ensemble.nodes must lie in [1, 201]");
  if (fwhm_hz > 0.0 && nodes < 3)
    throw ValidationError("ensemble.nodes must be >= 3 when inhomogeneous averaging is active");
}

double EnsembleSpec::sigma_hz() const {
  return fwhm_hz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

void SweepConfig::validate() const {
  system.validate();
  pump.validate();
  if (!std::isfinite(probe_rabi_hz) || probe_rabi_hz < 0.0)
    throw ValidationError("probe_rabi_hz must be finite and >= 0");
  grid.validate();
  rates.validate();
  ensemble.validate();
}

std::vector<std::pair<double, double>> gauss_hermite_nodes(int n) {
  if (n < 1) throw ValidationError("gauss_hermite_nodes: n must be >= 1");
  if (n == 1) return {{0.0, 1.0}};

  // Golub-Welsch on the Hermite Jacobi matrix; weights are the squared first
  // components of the normalized eigenvectors.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    const double off = std::sqrt(0.5 * (k + 1));
    j(k, k + 1) = off;
    j(k + 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  std::vector<std::pair<double, double>> out(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    out[i] = {es.eigenvalues()(i), v0 * v0};
  }
  return out;
}

Spectrum cpt_sweep(const SweepConfig& cfg, int threads) {
  cfg.validate();
  const double a_abs = std::abs(cfg.system.a_hyperfine_hz);
  if (a_abs > 0.0 && cfg.grid.step_hz() > a_abs / 20.0)
    std::fprintf(stderr,
                 "warning: probe grid step %.6g Hz exceeds |A|/20 = %.6g Hz; "
                 "the hyperfine doublet may not resolve\n",
                 cfg.grid.step_hz(), a_abs / 20.0);
  const auto nodes = gauss_hermite_nodes(cfg.ensemble.nodes);

  Spectrum spec;
  spec.probe_detuning_hz.resize(cfg.grid.points);
  spec.signal.resize(cfg.grid.points);
  parallel_for(cfg.grid.points, threads, [&](int i) {
    const double det = cfg.grid.at(i);
    spec.probe_detuning_hz[i] = det;
    spec.signal[i] = point_observables(cfg, det, nodes).excited_total;
  });
  return spec;
}

Observables observables_at(const SweepConfig& cfg, double probe_detuning_hz) {
  cfg.validate();
  return point_observables(cfg, probe_detuning_hz, gauss_hermite_nodes(cfg.ensemble.nodes));
}

double two_photon_point(const SweepConfig& cfg, Nuclear species) {
  const double s = (cfg.pump.branch == Branch::UpElectron) ? 1.0 : -1.0;
  const double mi = 0.5 * nuclear_sign(species);
  return cfg.pump.detuning_hz + s * mi * cfg.system.a_hyperfine_hz;
}

std::array<double, 2> two_photon_points(const SweepConfig& cfg) {
  std::array<double, 2> pts{two_photon_point(cfg, Nuclear::Up),
                            two_photon_point(cfg, Nuclear::Down)};
  if (pts[0] > pts[1]) std::swap(pts[0], pts[1]);
  return pts;
}

Nuclear low_detuning_species(const SweepConfig& cfg) {
  return two_photon_point(cfg, Nuclear::Up) <= two_photon_point(cfg, Nuclear::Down)
             ? Nuclear::Up
             : Nuclear::Down;
}

DipReport find_dips(const Spectrum& spectrum) {
  const auto& y = spectrum.signal;
  const auto& x = spectrum.probe_detuning_hz;
  if (y.size() != x.size())
    throw ValidationError("find_dips: spectrum arrays differ in length");
  if (y.size() < 5) throw ValidationError("find_dips: spectrum needs at least 5 points");

  DipReport report;
  report.baseline = median(y);
  report.separation_hz = std::numeric_limits<double>::quiet_NaN();

  const double depth_total = report.baseline - *std::min_element(y.begin(), y.end());
  if (!(depth_total > 0.0)) return report;
  const double threshold = report.baseline - 0.25 * depth_total;

  for (size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] < y[i - 1]) || !(y[i] <= y[i + 1]) || !(y[i] <= threshold)) continue;

    // Parabolic refinement through the three bracketing samples.
    double pos = x[i];
    double val = y[i];
    const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    if (denom > 0.0) {
      double frac = 0.5 * (y[i - 1] - y[i + 1]) / denom;
      frac = std::clamp(frac, -1.0, 1.0);
      pos += frac * (x[i + 1] - x[i]);
      val -= 0.125 * (y[i - 1] - y[i + 1]) * (y[i - 1] - y[i + 1]) / denom;
    }
    // depth_total > 0 implies baseline > min(y) >= 0, so the division is safe.
    report.dips.push_back({pos, (report.baseline - val) / report.baseline});
  }

  report.doublet = report.dips.size() == 2;
  if (report.dips.size() >= 2) {
    // Separation between the two deepest dips, by position.
    std::vector<size_t> order(report.dips.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return report.dips[a].depth > report.dips[b].depth;
    });
    const Dip& a = report.dips[std::min(order[0], order[1])];
    const Dip& b = report.dips[std::max(order[0], order[1])];
    report.separation_hz = b.detuning_hz - a.detuning_hz;
  }
  if (report.doublet) {
    const double lo = report.dips[0].depth;
    const double hi = report.dips[1].depth;
    report.asymmetry = (lo - hi) / (lo + hi);
  }
  return report;
}

double polarization_proxy(const DipReport& report, Nuclear low_species) {
  if (!report.doublet) return std::numeric_limits<double>::quiet_NaN();
  return low_species == Nuclear::Up ? report.asymmetry : -report.asymmetry;
}

double extract_hyperfine_hz(const DipReport& report) {
  if (!std::isfinite(report.separation_hz))
    throw NumericalError("extract_hyperfine_hz: fewer than two dips found");
  return std::abs(report.separation_hz);
}

std::vector<PowerPoint> pump_power_series(const SweepConfig& base,
                                          const std::vector<double>& pump_rabi_hz,
                                          int threads) {
  base.validate();
  if (pump_rabi_hz.size() < 2)
    throw ValidationError("power series needs at least two Rabi rates");
  for (double r : pump_rabi_hz)
    if (!std::isfinite(r) || r < 0.0)
      throw ValidationError("power series Rabi rates must be finite and >= 0");

  const auto nodes = gauss_hermite_nodes(base.ensemble.nodes);
  std::vector<PowerPoint> out;
  out.reserve(pump_rabi_hz.size());
  for (double rabi : pump_rabi_hz) {
    SweepConfig cfg = base;
    cfg.pump.rabi_hz = rabi;
    Spectrum spectrum = cpt_sweep(cfg, threads);
    DipReport report = find_dips(spectrum);
    const double dark_low = two_photon_points(cfg)[0];
    const double p_n = point_observables(cfg, dark_low, nodes).nuclear_polarization;
    out.push_back({rabi, report.separation_hz, p_n, std::move(spectrum), std::move(report)});
  }
  return out;
}

}  // namespace donorspin
