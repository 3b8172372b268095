#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "rbfilter/atomic_data.hpp"
#include "rbfilter/faddeeva.hpp"
#include "rbfilter/zeeman.hpp"

namespace rbf {

/// Area-normalized complex Voigt profile in units of 1/GHz. The imaginary
/// part is the absorption profile (unit area over the detuning axis), the
/// real part the matching dispersion, with the sign convention of
/// 1 / (pi (center - detuning - i hwhm)).
template <class T>
std::complex<T> voigt_profile(T detuning, T center, T gaussian_sigma, T lorentzian_hwhm) {
  if (!(gaussian_sigma > T(0))) throw DomainError("voigt_profile: sigma must be positive");
  if (!(lorentzian_hwhm >= T(0))) throw DomainError("voigt_profile: hwhm must be >= 0");
  const T sqrt2 = static_cast<T>(1.41421356237309504880168872420969808L);
  const T sqrt2pi = static_cast<T>(2.50662827463100050241576528481104525L);
  const std::complex<T> z((detuning - center) / (sqrt2 * gaussian_sigma),
                          lorentzian_hwhm / (sqrt2 * gaussian_sigma));
  return std::complex<T>(0, 1) * faddeeva(z) / (gaussian_sigma * sqrt2pi);
}

/// Gaussian standard deviation (GHz) of the Doppler profile.
double doppler_sigma_ghz(double temperature_k, double mass_kg, double line_frequency_hz);

/// One vapor cell. Temperatures are the nominal (sensor) values; the model
/// uses temperature_k + temperature_offset_k, the offset being the declared
/// calibration parameter when matching experiment.
struct CellConfig {
  std::string name = "cell";
  double length_m = 0.30;
  double temperature_k = 373.15;
  double temperature_offset_k = 0.0;
  double b_tesla = 0.01;  // signed along the beam for longitudinal cells
  Geometry geometry = Geometry::Transverse;
  double fraction_rb85 = 0.99;
  double fraction_rb87 = 0.01;
  double buffer_pressure_pa = 0.0;
  double pressure_broadening_hz_per_pa = 0.133e6;  // FWHM, Rb D1 in krypton
  double psi_rad = constants::pi / 2.0;  // light polarization vs B (transverse cells)

  double effective_temperature_k() const { return temperature_k + temperature_offset_k; }
  double fraction(Isotope iso) const {
    return iso == Isotope::Rb85 ? fraction_rb85 : fraction_rb87;
  }
  /// Lorentzian HWHM in GHz for the given isotope.
  double lorentzian_hwhm_ghz(const IsotopeSpec& spec) const;

  void validate() const;

  bool operator==(const CellConfig&) const = default;
};

struct GridSpec {
  double min_ghz = -15.0;
  double max_ghz = 15.0;
  int points = 4001;

  Eigen::VectorXd make() const;
  bool operator==(const GridSpec&) const = default;
};

/// Complex susceptibility per polarization eigenmode on a detuning grid.
/// Longitudinal cells carry {sigma+, sigma-} (the L and R circular modes),
/// transverse cells {pi, sigma}.
struct ComplexSpectrum {
  Eigen::VectorXd detuning_ghz;
  Geometry geometry = Geometry::Longitudinal;
  std::array<Eigen::VectorXcd, 2> chi;
  CellConfig cell;
  FrequencyConvention convention;

  std::string_view mode_name(int k) const;
  Eigen::Index size() const { return detuning_ghz.size(); }
};

/// Throws DataError unless the grid is finite and strictly increasing.
void require_monotone_grid(const Eigen::VectorXd& grid);

/// Susceptibility of a cell from precomputed line tables (one per isotope
/// present in the cell).
ComplexSpectrum susceptibility(const CellConfig& cell, std::span<const LineTable> lines,
                               const Eigen::VectorXd& grid,
                               const FrequencyConvention& conv = {});

/// Susceptibility with line tables built for the cell's field and geometry.
ComplexSpectrum susceptibility(const CellConfig& cell, const Eigen::VectorXd& grid,
                               const FrequencyConvention& conv = {});

}  // namespace rbf
