#include "rbfilter/lineshape.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "rbfilter/error.hpp"

namespace rbf {

double doppler_sigma_ghz(double temperature_k, double mass_kg, double line_frequency_hz) {
  if (!(temperature_k > 0.0) || !(mass_kg > 0.0))
    throw DomainError("doppler_sigma: temperature and mass must be positive");
  return line_frequency_hz / constants::speed_of_light *
         std::sqrt(constants::boltzmann * temperature_k / mass_kg) * 1e-9;
}

double CellConfig::lorentzian_hwhm_ghz(const IsotopeSpec& spec) const {
  return 0.5 * (spec.natural_linewidth_hz + pressure_broadening_hz_per_pa * buffer_pressure_pa) *
         1e-9;
}

void CellConfig::validate() const {
  std::vector<std::string> issues;
  const std::string where = "cell '" + name + "': ";
  if (!(length_m > 0.0) || !std::isfinite(length_m)) issues.push_back(where + "length must be > 0");
  const double t = effective_temperature_k();
  if (!(t >= 250.0 && t <= 500.0))
    issues.push_back(where + "effective temperature must lie in [250, 500] K");
  if (!(fraction_rb85 >= 0.0 && fraction_rb85 <= 1.0) ||
      !(fraction_rb87 >= 0.0 && fraction_rb87 <= 1.0))
    issues.push_back(where + "isotope fractions must lie in [0, 1]");
  else if (fraction_rb85 + fraction_rb87 > 1.0 + 1e-12)
    issues.push_back(where + "isotope fractions must sum to at most 1");
  if (!std::isfinite(b_tesla)) issues.push_back(where + "field must be finite");
  if (!(buffer_pressure_pa >= 0.0)) issues.push_back(where + "buffer pressure must be >= 0");
  if (!(pressure_broadening_hz_per_pa >= 0.0))
    issues.push_back(where + "pressure broadening rate must be >= 0");
  if (!std::isfinite(psi_rad)) issues.push_back(where + "psi must be finite");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

Eigen::VectorXd GridSpec::make() const {
  if (points < 2 || !(max_ghz > min_ghz))
    throw ConfigError("grid: need at least 2 points and max > min");
  return Eigen::VectorXd::LinSpaced(points, min_ghz, max_ghz);
}

std::string_view ComplexSpectrum::mode_name(int k) const {
  if (geometry == Geometry::Longitudinal) return k == 0 ? "sigma+" : "sigma-";
  return k == 0 ? "pi" : "sigma";
}

void require_monotone_grid(const Eigen::VectorXd& grid) {
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid(i))) throw DataError("grid contains non-finite detunings");
    if (i > 0 && !(grid(i) > grid(i - 1)))
      throw DataError("grid must be strictly increasing");
  }
}

ComplexSpectrum susceptibility(const CellConfig& cell, std::span<const LineTable> lines,
                               const Eigen::VectorXd& grid, const FrequencyConvention& conv) {
  cell.validate();
  require_monotone_grid(grid);

  const Eigen::Index n = grid.size();
  // Per-component accumulators, index by dm + 1.
  std::array<Eigen::VectorXcd, 3> by_component;
  for (auto& v : by_component) v = Eigen::VectorXcd::Zero(n);

  const double t_eff = cell.effective_temperature_k();
  const double b_abs = std::abs(cell.b_tesla);
  bool seen85 = false, seen87 = false;

  for (const LineTable& table : lines) {
    if (table.geometry != cell.geometry)
      throw ConfigError("susceptibility: line table geometry does not match the cell");
    if (std::abs(table.b_tesla - b_abs) > 1e-15 + 1e-12 * b_abs)
      throw ConfigError("susceptibility: line table field does not match the cell");
    bool& seen = table.isotope == Isotope::Rb85 ? seen85 : seen87;
    if (seen) throw ConfigError("susceptibility: duplicate line table for an isotope");
    seen = true;

    const double fraction = cell.fraction(table.isotope);
    if (fraction == 0.0) continue;
    const IsotopeSpec& spec = isotope(table.isotope);
    const double density = number_density(t_eff, fraction);
    // chi = n |<J||d||J'>|^2 / (3 eps0 hbar) * sum_lines s * V(nu) / 2,
    // with the Voigt profile V taken per Hz.
    const double prefactor = density * spec.reduced_dipole_cm * spec.reduced_dipole_cm /
                             (3.0 * constants::epsilon0 * constants::hbar) * 0.5 * 1e-9;
    const double sigma = doppler_sigma_ghz(t_eff, spec.mass_kg, spec.line_center_hz);
    const double hwhm = cell.lorentzian_hwhm_ghz(spec);
    const double centroid = frequency_to_detuning(spec.line_center_hz, conv);

    for (const Line& line : table.lines) {
      const double center = centroid + line.offset_ghz;
      const double weight = prefactor * line.strength;
      auto& acc = by_component[static_cast<std::size_t>(static_cast<int>(line.component) + 1)];
      for (Eigen::Index i = 0; i < n; ++i)
        acc(i) += weight * voigt_profile(grid(i), center, sigma, hwhm);
    }
  }
  if ((cell.fraction_rb85 > 0.0 && !seen85) || (cell.fraction_rb87 > 0.0 && !seen87))
    throw ConfigError("susceptibility: missing line table for an isotope present in the cell");

  ComplexSpectrum out;
  out.detuning_ghz = grid;
  out.geometry = cell.geometry;
  out.cell = cell;
  out.convention = conv;
  auto& minus = by_component[0];
  auto& pi = by_component[1];
  auto& plus = by_component[2];
  if (cell.geometry == Geometry::Longitudinal) {
    // A field pointing against the beam exchanges the roles of the circular modes.
    if (cell.b_tesla > 0.0) out.chi = {plus, minus};
    else if (cell.b_tesla < 0.0) out.chi = {minus, plus};
    else out.chi = {0.5 * (plus + minus), 0.5 * (plus + minus)};  // degenerate at zero field
  } else {
    out.chi = {pi, 0.5 * (plus + minus)};
  }
  return out;
}

ComplexSpectrum susceptibility(const CellConfig& cell, const Eigen::VectorXd& grid,
                               const FrequencyConvention& conv) {
  std::vector<LineTable> tables;
  for (const IsotopeSpec& spec : isotopes())
    if (cell.fraction(spec.name) > 0.0)
      tables.push_back(zeeman_lines(spec, cell.b_tesla, cell.geometry));
  return susceptibility(cell, tables, grid, conv);
}

}  // namespace rbf
