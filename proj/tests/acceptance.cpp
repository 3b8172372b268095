// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "rbfilter/config.hpp"
#include "rbfilter/fit.hpp"
#include "rbfilter/optimize.hpp"
#include "rbfilter/photon_stats.hpp"
#include "rbfilter/propagation.hpp"
#include "rbfilter/zeeman.hpp"

using namespace rbf;
using cd = std::complex<double>;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double kelvin(double c) { return c + constants::zero_celsius; }

CellConfig make_cell(double t_c, double b, Geometry g, double f85, double f87) {
  CellConfig c;
  c.temperature_k = kelvin(t_c);
  c.b_tesla = b;
  c.geometry = g;
  c.fraction_rb85 = f85;
  c.fraction_rb87 = f87;
  return c;
}

Outcome breit_rabi() {
  double worst = 0.0;
  for (const auto& s : isotopes())
    for (double b : {1e-4, 1e-3, 1e-2, 1e-1}) {
      const auto e = diagonalize(build_hamiltonian(s, Manifold::Ground, b)).energies;
      const auto ref = oracle::breit_rabi_levels(s.a_ground_hz, s.nuclear_spin, s.g_j_ground, s.g_i, b);
      for (std::size_t k = 0; k < ref.size(); ++k)
        worst = std::max(worst, std::abs(e(static_cast<Eigen::Index>(k)) - ref[k]) /
                                    std::max(std::abs(ref[k]), s.ground_splitting_hz()));
    }
  std::ostringstream d;
  d << "max relative deviation " << worst;
  return {worst <= 1e-9, d.str()};
}

Outcome faddeeva_voigt() {
  std::mt19937_64 rng(31415);
  std::uniform_real_distribution<double> logr(-3.0, 4.0), ang(0.0, constants::pi);
  double worst = 0.0;
  int n = 0;
  while (n < 10000) {
    const double a = ang(rng);
    if (a == 0.0) continue;
    const cd z = std::polar(std::pow(10.0, logr(rng)), a);
    const cd w = faddeeva(z);
    const auto ref = oracle::faddeeva_quadrature(z);
    worst = std::max(worst, static_cast<double>(std::abs(std::complex<long double>(w.real(), w.imag()) - ref) /
                                                std::abs(ref)));
    ++n;
  }
  double limits = 0.0;
  for (double sigma : {0.05, 0.2, 1.0}) {
    for (double k : {-2.0, -0.5, 0.0, 0.3, 1.0}) {
      const double d = k * sigma;
      const double g = voigt_profile(d, 0.0, sigma, 1e-12).imag();
      const double ref = std::exp(-d * d / (2 * sigma * sigma)) / (sigma * std::sqrt(2 * constants::pi));
      limits = std::max(limits, std::abs(g / ref - 1.0));
    }
  }
  for (double d : {-30.0, -1.0, 0.0, 0.4, 2.5, 100.0}) {
    const double gamma = 1.0;
    const cd v = voigt_profile(d, 0.0, 1e-6, gamma);
    const double den = constants::pi * (d * d + gamma * gamma);
    limits = std::max(limits, std::abs(v.imag() / (gamma / den) - 1.0));
    if (d != 0.0) limits = std::max(limits, std::abs(v.real() / (-d / den) - 1.0));
  }
  std::ostringstream d;
  d << n << " random z: max relative error " << worst << "; Gaussian/Lorentzian limits " << limits;
  return {worst <= 1e-6 && limits <= 1e-4, d.str()};
}

Outcome jones_identity() {
  const Eigen::VectorXd grid = GridSpec{}.make();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> t(40.0, 130.0), b(-0.1, 0.1);
  double worst = 0.0, worst_eq = 0.0;
  for (int k = 0; k < 20; ++k) {
    auto chi = susceptibility(make_cell(t(rng), b(rng), Geometry::Longitudinal, 0.0, 1.0), grid);
    const auto c = faraday_transmission(chi, 0.3, PolarizerOrientation::Crossed);
    const auto p = faraday_transmission(chi, 0.3, PolarizerOrientation::Parallel);
    const auto m = mode_transmissions(chi, 0.3);
    worst = std::max(worst, (c.transmission + p.transmission - 0.5 * (m[0] + m[1])).cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double im = 0.5 * (chi.chi[0](i).imag() + chi.chi[1](i).imag());
      chi.chi[0](i).imag(im);
      chi.chi[1](i).imag(im);
    }
    const auto ce = faraday_transmission(chi, 0.3, PolarizerOrientation::Crossed);
    const auto r = faraday_rotation(chi, 0.3);
    const Eigen::VectorXd model = r.t_rot.array() * r.theta_rad.array().sin().square();
    worst_eq = std::max(worst_eq, (ce.transmission - model).cwiseAbs().maxCoeff());
  }
  std::ostringstream d;
  d << "crossed+parallel deviation " << worst << ", equal-absorption deviation " << worst_eq;
  return {worst <= 1e-12 && worst_eq <= 1e-10, d.str()};
}

Outcome width_sweep() {
  const Eigen::VectorXd grid = GridSpec{-20, 20, 8001}.make();
  std::vector<double> widths;
  std::ostringstream d;
  d << "width at T<0.5 (60 C):";
  for (double b_mt : {10.0, 20.0, 35.0, 50.0, 70.0, 100.0}) {
    CellConfig c = make_cell(60, b_mt * 1e-3, Geometry::Transverse, 0.99, 0.01);
    const auto t = absorption_transmission(susceptibility(c, grid), c.psi_rad);
    widths.push_back(opaque_extent_ghz(t, 0.5));
    char buf[64];
    std::snprintf(buf, sizeof buf, " %.0f mT %.2f GHz", b_mt, widths.back());
    d << buf;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < widths.size(); ++i) monotone = monotone && widths[i] > widths[i - 1];
  const bool low = std::abs(widths.front() - 5.5) <= 0.2 * 5.5;
  const bool high = std::abs(widths.back() - 8.4) <= 0.2 * 8.4;
  return {monotone && low && high, d.str()};
}

Outcome operating_point() {
  const RunConfig cfg = preset("paper-optimum");
  const FigureOfMerit m = score(cfg.filter_chain(), cfg.fom);
  const double supp = std::min(m.suppression_write_db, m.suppression_read_db);
  std::ostringstream d;
  d << "T_S " << m.t_stokes << ", T_AS " << m.t_anti_stokes << ", suppression " << supp << " dB";
  return {std::abs(m.t_stokes - 0.65) <= 0.15 && std::abs(m.t_anti_stokes - 0.40) <= 0.15 && supp >= 100.0,
          d.str()};
}

Outcome band_structure() {
  const Eigen::VectorXd grid = GridSpec{}.make();
  const double step = grid(1) - grid(0);
  double worst = 0.0;
  int maxima = 0;
  for (double b_mt : {2.0, 4.0, 6.0, 8.0, 10.0}) {
    const auto chi = susceptibility(make_cell(68, b_mt * 1e-3, Geometry::Longitudinal, 0.0, 1.0), grid);
    const auto t = faraday_transmission(chi, 0.3, PolarizerOrientation::Crossed).transmission;
    const auto r = faraday_rotation(chi, 0.3);
    // Phase difference of the circular modes is twice the rotation angle.
    std::vector<double> crossings;
    for (Eigen::Index i = 1; i < grid.size(); ++i) {
      const double a = (2 * r.theta_rad(i - 1) - constants::pi) / (2 * constants::pi);
      const double b = (2 * r.theta_rad(i) - constants::pi) / (2 * constants::pi);
      if (std::floor(a) != std::floor(b)) {
        const double level = std::max(std::floor(a), std::floor(b));
        crossings.push_back(grid(i - 1) + (level - a) / (b - a) * step);
      }
    }
    for (Eigen::Index i = 1; i + 1 < grid.size(); ++i) {
      if (!(t(i) >= 0.1 && t(i) > t(i - 1) && t(i) >= t(i + 1))) continue;
      double nearest = 1e9;
      for (double x : crossings) nearest = std::min(nearest, std::abs(x - grid(i)));
      worst = std::max(worst, nearest);
      ++maxima;
    }
  }
  std::ostringstream d;
  d << maxima << " maxima with T>=0.1; largest distance to a 2*theta = pi + 2 pi k crossing "
    << worst * 1e3 << " MHz, grid step " << step * 1e3 << " MHz";
  return {maxima > 0 && worst <= step, d.str()};
}

Outcome photon_statistics() {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> mean(0.2, 2.0), eta(0.1, 1.0), bg(0.0, 2.0);
  int ok = 0;
  double worst_z = 0.0;
  for (int k = 0; k < 20; ++k) {
    NoiseModel m;
    m.mean_signal = mean(rng);
    m.eta_stokes = eta(rng);
    m.eta_anti_stokes = eta(rng);
    m.fluorescence = bg(rng);
    m.leakage = 0.5 * bg(rng);
    m.four_wave_mixing = 0.25 * bg(rng);
    m.intensifier = 0.1 * bg(rng);
    const auto frames = simulate_frames(2, 100000, m, 1000 + static_cast<std::uint64_t>(k));
    const double c = correlation_coefficient(frames, 0, 1);
    const double se = correlation_standard_error(frames, 0, 1, 50);
    const double z = std::abs(c - oracle::analytic_correlation(m)) / se;
    worst_z = std::max(worst_z, z);
    if (z <= 3.0) ++ok;
  }
  std::vector<int> regions(8);
  std::iota(regions.begin(), regions.end(), 0);
  const auto ff = simulate_frames(8, 100000, NoiseModel::filtered(), 1);
  const double cf = summarize(ff, correlation_map(ff, regions, regions), 50).paired_mean;
  const auto fu = simulate_frames(8, 100000, NoiseModel::unfiltered(), 1);
  const double cu = summarize(fu, correlation_map(fu, regions, regions), 50).paired_mean;
  std::ostringstream d;
  d << ok << "/20 models within 3 SE (worst " << worst_z << " SE); filtered C " << cf << ", unfiltered C " << cu;
  return {ok == 20 && std::abs(cf - 0.38) <= 0.05 && cu <= 0.05, d.str()};
}

Outcome kramers_kronig() {
  const Eigen::VectorXd grid = GridSpec{-60, 60, 12001}.make();
  std::vector<Eigen::Index> window;
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    if (std::abs(grid(i)) <= 10.0 + 1e-9) window.push_back(i);
  const std::vector<CellConfig> cells = {
      make_cell(100, 0.01, Geometry::Transverse, 0.99, 0.01),
      make_cell(102, 0.01, Geometry::Longitudinal, 0.0, 1.0),
      make_cell(68, 0.002, Geometry::Longitudinal, 0.0, 1.0),
      make_cell(60, 0.05, Geometry::Transverse, 0.72, 0.28),
      make_cell(120, 0.0, Geometry::Longitudinal, 0.5, 0.5),
  };
  double worst = 0.0;
  for (const auto& c : cells) {
    const auto chi = susceptibility(c, grid);
    for (std::size_t m = 0; m < 2; ++m) {
      const Eigen::VectorXd kk = oracle::hilbert(chi.chi[m].imag(), window);
      double peak = 0.0, err = 0.0;
      for (std::size_t k = 0; k < window.size(); ++k) {
        const double re = chi.chi[m](window[k]).real();
        peak = std::max(peak, std::abs(re));
        err = std::max(err, std::abs(re - kk(static_cast<Eigen::Index>(k))));
      }
      worst = std::max(worst, err / peak);
    }
  }
  std::ostringstream d;
  d << "largest deviation " << 100 * worst << "% of peak Re chi over 5 cells";
  return {worst <= 0.02, d.str()};
}

Outcome optimizer_dominance() {
  const RunConfig cfg = preset("paper-optimum");
  const FilterHardware hw = cfg.hardware();
  OptimizerOptions opt = cfg.optimizer;
  opt.budget = 2000;
  const FilterSettings nominal{kelvin(100), kelvin(102), 1e-2, 1e-2};
  const double reference = score(hw, nominal, cfg.fom).objective;
  const OptimizeResult a = optimize_filters(hw, cfg.param_box, cfg.fom, opt);
  const OptimizeResult b = optimize_filters(hw, cfg.param_box, cfg.fom, opt);
  const bool same = a.best == b.best && a.best_value == b.best_value && a.trace.size() == b.trace.size();
  std::ostringstream d;
  d << "best " << a.best_value << " vs nominal settings " << reference << " at T_abs "
    << a.best(0) - constants::zero_celsius << " C, T_far " << a.best(1) - constants::zero_celsius
    << " C, B_abs " << a.best(2) * 1e3 << " mT, B_far " << a.best(3) * 1e3 << " mT; "
    << a.trace.size() << " evaluations, " << a.wall_seconds << " s per run; repeat "
    << (same ? "identical" : "differs");
  return {a.best_value >= reference && same, d.str()};
}

Outcome fit_round_trip() {
  CellConfig truth = make_cell(70, 0.05, Geometry::Transverse, 0.72, 0.28);
  const Eigen::VectorXd grid = GridSpec{-10, 14, 241}.make();
  const Eigen::VectorXd clean = model_transmission(truth, SpectrumModel::Absorption, grid);
  CellConfig guess = truth;
  guess.temperature_k *= 1.1;
  guess.b_tesla *= 0.9;
  const FitResult r = fit_spectrum({grid, clean, {}}, guess, FitOptions{});
  const double et = std::abs(r.values(0) / truth.temperature_k - 1.0);
  const double eb = std::abs(r.values(1) / truth.b_tesla - 1.0);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 0.01);
  Eigen::VectorXd noisy = clean;
  for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy(i) = std::clamp(noisy(i) + noise(rng), 0.0, 1.05);
  const FitResult rn = fit_spectrum({grid, noisy, {}}, guess, FitOptions{});
  const double dt = std::abs(rn.values(0) - truth.temperature_k);
  std::ostringstream d;
  d << "noiseless: T off " << 100 * et << "%, B off " << 100 * eb << "%; 1% noise: T off " << dt
    << " K (+-" << rn.standard_errors(0) << ")";
  return {et <= 0.01 && eb <= 0.01 && dt <= 2.0, d.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "Breit-Rabi oracle", 1.0, breit_rabi},
      {2, "Faddeeva/Voigt", 10.0, faddeeva_voigt},
      {3, "Jones identity", 0.0, jones_identity},
      {4, "absorption width sweep", 30.0, width_sweep},
      {5, "operating point", 5.0, operating_point},
      {6, "Faraday band structure", 0.0, band_structure},
      {7, "photon statistics", 60.0, photon_statistics},
      {8, "Kramers-Kronig", 0.0, kramers_kronig},
      {9, "optimizer dominance", 120.0, optimizer_dominance},
      {10, "fit round trip", 0.0, fit_round_trip},
  };
  int failures = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s == 0.0 || s < c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %2d %-24s %s  %s [%.2f s%s]\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), s, in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failures, all.size());
  return failures == 0 ? 0 : 1;
}
