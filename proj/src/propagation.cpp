#include "rbfilter/propagation.hpp"

#include <cmath>
#include <complex>

#include "rbfilter/error.hpp"

namespace rbf {

namespace {

using cd = std::complex<double>;

Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

// Columns are e_L and e_R expressed in (x, y).
const Eigen::Matrix2cd& circular_to_linear() {
  static const Eigen::Matrix2cd u = [] {
    Eigen::Matrix2cd m;
    const double s = 1.0 / std::sqrt(2.0);
    m << cd(s, 0), cd(s, 0), cd(0, s), cd(0, -s);
    return m;
  }();
  return u;
}

// exp(i dK L) per grid point for one mode: dK = (omega/c) chi / 2.
Eigen::VectorXcd propagation_phase(const ComplexSpectrum& chi, int mode, double length_m) {
  const Eigen::Index n = chi.size();
  Eigen::VectorXcd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k0 = detuning_to_omega(chi.detuning_ghz(i), chi.convention) /
                      constants::speed_of_light;
    out(i) = std::exp(cd(0, 1) * (0.5 * k0 * length_m) * chi.chi[static_cast<std::size_t>(mode)](i));
  }
  return out;
}

void require_geometry(const ComplexSpectrum& chi, Geometry g, const char* what) {
  if (chi.geometry != g)
    throw ConfigError(std::string(what) + ": expected " + std::string(to_string(g)) +
                      " susceptibility, got " + std::string(to_string(chi.geometry)));
}

bool same_grid(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

double to_db(double transmission) {
  if (!(transmission > 0.0)) return db_floor;
  return std::max(db_floor, 10.0 * std::log10(transmission));
}

Eigen::VectorXd TransmissionSpectrum::db() const {
  return transmission.unaryExpr([](double t) { return to_db(t); });
}

JonesTransfer JonesTransfer::to_linear() const {
  if (basis == JonesBasis::Linear) return *this;
  const Eigen::Matrix2cd& u = circular_to_linear();
  JonesTransfer out{JonesBasis::Linear, detuning_ghz, {}};
  out.matrices.reserve(matrices.size());
  for (const auto& m : matrices) out.matrices.push_back(u * m * u.adjoint());
  return out;
}

double JonesTransfer::max_singular_value() const {
  double s = 0.0;
  for (const auto& m : matrices)
    s = std::max(s, Eigen::JacobiSVD<Eigen::Matrix2cd>(m).singularValues()(0));
  return s;
}

std::array<Eigen::VectorXd, 2> mode_transmissions(const ComplexSpectrum& chi, double length_m) {
  std::array<Eigen::VectorXd, 2> out;
  for (int k = 0; k < 2; ++k) out[static_cast<std::size_t>(k)] =
      propagation_phase(chi, k, length_m).cwiseAbs2();
  return out;
}

TransmissionSpectrum absorption_transmission(const ComplexSpectrum& chi, double psi_rad) {
  require_geometry(chi, Geometry::Transverse, "absorption_transmission");
  if (!std::isfinite(psi_rad)) throw DomainError("absorption_transmission: psi must be finite");
  const auto t = mode_transmissions(chi, chi.cell.length_m);
  const double c2 = std::cos(psi_rad) * std::cos(psi_rad);
  const double s2 = std::sin(psi_rad) * std::sin(psi_rad);
  return {chi.detuning_ghz, c2 * t[0] + s2 * t[1]};
}

RotationSpectrum faraday_rotation(const ComplexSpectrum& chi, double length_m) {
  require_geometry(chi, Geometry::Longitudinal, "faraday_rotation");
  const Eigen::Index n = chi.size();
  RotationSpectrum out{chi.detuning_ghz, Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k0 = detuning_to_omega(chi.detuning_ghz(i), chi.convention) /
                      constants::speed_of_light;
    const cd l = chi.chi[0](i);
    const cd r = chi.chi[1](i);
    // n_L - n_R = (Re chi_L - Re chi_R) / 2
    out.theta_rad(i) = 0.25 * k0 * length_m * (l.real() - r.real());
    out.t_rot(i) = std::exp(-0.5 * k0 * length_m * (l.imag() + r.imag()));
  }
  return out;
}

TransmissionSpectrum faraday_transmission(const ComplexSpectrum& chi, double length_m,
                                          PolarizerOrientation orientation) {
  require_geometry(chi, Geometry::Longitudinal, "faraday_transmission");
  const Eigen::VectorXcd el = propagation_phase(chi, 0, length_m);
  const Eigen::VectorXcd er = propagation_phase(chi, 1, length_m);
  const Eigen::VectorXcd amp = orientation == PolarizerOrientation::Crossed ? (el - er).eval()
                                                                             : (el + er).eval();
  return {chi.detuning_ghz, 0.25 * amp.cwiseAbs2()};
}

JonesTransfer polarizer_transfer(const Polarizer& p, const Eigen::VectorXd& grid) {
  if (!(p.extinction >= 0.0 && p.extinction <= 1.0))
    throw ConfigError("polarizer: extinction must lie in [0, 1]");
  if (!std::isfinite(p.angle_rad)) throw ConfigError("polarizer: angle must be finite");
  const Eigen::Matrix2d r = rotation(p.angle_rad);
  const Eigen::Matrix2d m =
      r * Eigen::Vector2d(1.0, std::sqrt(p.extinction)).asDiagonal() * r.transpose();
  return {JonesBasis::Linear, grid,
          std::vector<Eigen::Matrix2cd>(static_cast<std::size_t>(grid.size()), m.cast<cd>())};
}

JonesTransfer absorption_cell_transfer(const ComplexSpectrum& chi) {
  require_geometry(chi, Geometry::Transverse, "absorption cell");
  const Eigen::VectorXcd pi = propagation_phase(chi, 0, chi.cell.length_m);
  const Eigen::VectorXcd sigma = propagation_phase(chi, 1, chi.cell.length_m);
  // The field axis sits at psi from x; pi couples along it, sigma across it.
  const Eigen::Matrix2cd r = rotation(chi.cell.psi_rad).cast<cd>();
  JonesTransfer out{JonesBasis::Linear, chi.detuning_ghz, {}};
  out.matrices.reserve(static_cast<std::size_t>(chi.size()));
  for (Eigen::Index i = 0; i < chi.size(); ++i)
    out.matrices.push_back(r * Eigen::Vector2cd(pi(i), sigma(i)).asDiagonal() * r.transpose());
  return out;
}

JonesTransfer rotator_transfer(const ComplexSpectrum& chi) {
  require_geometry(chi, Geometry::Longitudinal, "rotator cell");
  const Eigen::VectorXcd el = propagation_phase(chi, 0, chi.cell.length_m);
  const Eigen::VectorXcd er = propagation_phase(chi, 1, chi.cell.length_m);
  JonesTransfer out{JonesBasis::Circular, chi.detuning_ghz, {}};
  out.matrices.reserve(static_cast<std::size_t>(chi.size()));
  for (Eigen::Index i = 0; i < chi.size(); ++i)
    out.matrices.push_back(Eigen::Vector2cd(el(i), er(i)).asDiagonal());
  return out;
}

std::vector<JonesTransfer> element_transfers(const FilterChain& chain, const Eigen::VectorXd& grid,
                                             const FrequencyConvention& conv) {
  if (chain.elements.empty()) throw ConfigError("filter chain is empty");
  if (!(chain.wollaston_extinction >= 0.0 && chain.wollaston_extinction <= 1.0))
    throw ConfigError("filter chain: Wollaston extinction must lie in [0, 1]");
  require_monotone_grid(grid);
  std::vector<JonesTransfer> out;
  out.reserve(chain.elements.size());
  for (const ChainElement& e : chain.elements) {
    if (const auto* p = std::get_if<Polarizer>(&e)) {
      out.push_back(polarizer_transfer(*p, grid));
    } else if (const auto* a = std::get_if<AbsorptionCell>(&e)) {
      if (a->cell.geometry != Geometry::Transverse)
        throw ConfigError("absorption cell '" + a->cell.name + "' needs a transverse field");
      out.push_back(absorption_cell_transfer(susceptibility(a->cell, grid, conv)));
    } else {
      const auto& rc = std::get<RotatorCell>(e);
      if (rc.cell.geometry != Geometry::Longitudinal)
        throw ConfigError("rotator cell '" + rc.cell.name + "' needs a longitudinal field");
      out.push_back(rotator_transfer(susceptibility(rc.cell, grid, conv)));
    }
  }
  return out;
}

TransmissionSpectrum cascade(const std::vector<JonesTransfer>& transfers, double input_angle_rad) {
  if (transfers.empty()) throw ConfigError("cascade: chain is empty");
  const Eigen::VectorXd& grid = transfers.front().detuning_ghz;
  for (const auto& t : transfers) {
    if (!same_grid(t.detuning_ghz, grid))
      throw DataError("cascade: element grids differ; resample onto a common grid first");
    if (t.matrices.size() != static_cast<std::size_t>(grid.size()))
      throw DataError("cascade: transfer size does not match its grid");
  }
  std::vector<JonesTransfer> linear;
  linear.reserve(transfers.size());
  for (const auto& t : transfers) linear.push_back(t.to_linear());

  const Eigen::Vector2cd input(std::cos(input_angle_rad), std::sin(input_angle_rad));
  TransmissionSpectrum out{grid, Eigen::VectorXd(grid.size())};
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    Eigen::Vector2cd e = input;
    for (const auto& t : linear) e = t.matrices[static_cast<std::size_t>(i)] * e;
    out.transmission(i) = e.squaredNorm();
  }
  return out;
}

TransmissionSpectrum cascade(const FilterChain& chain, const Eigen::VectorXd& grid,
                             const FrequencyConvention& conv) {
  return cascade(element_transfers(chain, grid, conv), chain.input_angle_rad);
}

double opaque_extent_ghz(const TransmissionSpectrum& t, double threshold) {
  const Eigen::Index n = t.size();
  Eigen::Index first = -1, last = -1;
  for (Eigen::Index i = 0; i < n; ++i)
    if (t.transmission(i) < threshold) {
      if (first < 0) first = i;
      last = i;
    }
  if (first < 0) return 0.0;
  const auto crossing = [&](Eigen::Index inside, Eigen::Index outside) {
    const double ti = t.transmission(inside), to = t.transmission(outside);
    const double f = (threshold - ti) / (to - ti);
    return t.detuning_ghz(inside) + f * (t.detuning_ghz(outside) - t.detuning_ghz(inside));
  };
  const double lo = first > 0 ? crossing(first, first - 1) : t.detuning_ghz(0);
  const double hi = last < n - 1 ? crossing(last, last + 1) : t.detuning_ghz(n - 1);
  return hi - lo;
}

TransmissionSpectrum drive_leakage(const FilterChain& chain, const TransmissionSpectrum& signal) {
  return {signal.detuning_ghz, chain.wollaston_extinction * signal.transmission};
}

}  // namespace rbf
