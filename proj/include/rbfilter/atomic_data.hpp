#pragma once

// Physical constants and rubidium D1 data.
//
// Atomic constants are from D. A. Steck, "Rubidium 85 D Line Data" and
// "Rubidium 87 D Line Data" (revision 2.2.1, 2015), http://steck.us/alkalidata.
// Vapor pressure is the liquid-phase formula quoted there (after
// A. N. Nesmeyanov, "Vapor Pressure of the Chemical Elements", 1963):
//     log10(P / torr) = 2.881 + 4.312 - 4040 / T.

#include <array>
#include <string_view>

namespace rbf {

namespace constants {
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double planck = 6.62607015e-34;           // J s
inline constexpr double hbar = planck / (2.0 * pi);        // J s
inline constexpr double boltzmann = 1.380649e-23;          // J / K
inline constexpr double epsilon0 = 8.8541878128e-12;       // F / m
inline constexpr double speed_of_light = 299792458.0;      // m / s
inline constexpr double bohr_magneton_hz = 1.39962449361e10;  // mu_B / h in Hz / T
inline constexpr double torr = 133.322368421;              // Pa
inline constexpr double zero_celsius = 273.15;             // K
}  // namespace constants

enum class Isotope { Rb85, Rb87 };

std::string_view to_string(Isotope iso);
Isotope isotope_from_string(std::string_view name);

/// D1-line constants of one rubidium isotope. Frequencies are ordinary
/// (not angular) and stored in Hz.
struct IsotopeSpec {
  Isotope name = Isotope::Rb87;
  double nuclear_spin = 1.5;
  double mass_kg = 0.0;
  double natural_abundance = 0.0;
  double a_ground_hz = 0.0;         // 5S1/2 magnetic-dipole constant
  double a_excited_hz = 0.0;        // 5P1/2 magnetic-dipole constant
  double isotope_shift_hz = 0.0;    // D1 centroid relative to the Rb-87 D1 centroid
  double line_center_hz = 0.0;      // absolute D1 centroid
  double g_j_ground = 0.0;
  double g_j_excited = 0.0;
  double g_i = 0.0;
  double natural_linewidth_hz = 0.0;  // FWHM
  double reduced_dipole_cm = 0.0;     // <J=1/2||er||J'=1/2>, Steck convention

  /// A (I + 1/2): splitting between F = I + 1/2 and F = I - 1/2 for J = 1/2.
  double ground_splitting_hz() const { return a_ground_hz * (nuclear_spin + 0.5); }
  double excited_splitting_hz() const { return a_excited_hz * (nuclear_spin + 0.5); }

  /// Throws ConfigError if the registry invariants do not hold.
  void validate() const;

  bool operator==(const IsotopeSpec&) const = default;
};

const IsotopeSpec& isotope(Isotope iso);
const std::array<IsotopeSpec, 2>& isotopes();

/// Energy of hyperfine level F of a J = 1/2 manifold relative to its centroid, in Hz.
double hyperfine_level_hz(double a_hz, double nuclear_spin, double f);

/// Detuning axis. Detunings are measured in GHz from one hyperfine
/// transition of the D1 line (by default Rb-87 F=2 -> F'=2).
struct FrequencyConvention {
  Isotope isotope = Isotope::Rb87;
  double f_ground = 2.0;
  double f_excited = 2.0;

  /// Absolute frequency of the reference transition in Hz.
  double reference_frequency_hz() const;

  bool operator==(const FrequencyConvention&) const = default;
};

double detuning_to_omega(double detuning_ghz, const FrequencyConvention& conv = {});
double omega_to_detuning(double omega_rad_s, const FrequencyConvention& conv = {});

/// Detuning (GHz) of an absolute frequency in Hz.
double frequency_to_detuning(double frequency_hz, const FrequencyConvention& conv = {});

/// Positions of the drive lasers and Raman photons on the detuning axis.
/// Stokes and anti-Stokes default to the measured values; the lasers are
/// back-solved through the Rb-87 ground splitting (write = Stokes + split,
/// read = anti-Stokes - split).
struct RamanDetunings {
  double stokes_ghz = -2.3;
  double anti_stokes_ghz = 7.8;

  double write_ghz() const;
  double read_ghz() const;
};

/// Saturated rubidium vapor pressure in Pa, valid for 250 K <= T <= 500 K.
double vapor_pressure(double temperature_k);

/// Number density in m^-3 of one isotope with the given fraction of the vapor.
double number_density(double temperature_k, double isotope_fraction);

}  // namespace rbf
