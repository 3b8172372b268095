#include "rbfilter/atomic_data.hpp"

#include <cmath>
#include <string>

#include "rbfilter/error.hpp"

namespace rbf {

namespace {

constexpr double rb87_d1_hz = 377.107463380e12;
constexpr double rb85_d1_hz = 377.107385690e12;

const std::array<IsotopeSpec, 2> registry = {{
    {
        .name = Isotope::Rb85,
        .nuclear_spin = 2.5,
        .mass_kg = 1.409993199e-25,
        .natural_abundance = 0.7217,
        .a_ground_hz = 1.0119108130e9,
        .a_excited_hz = 120.527e6,
        .isotope_shift_hz = rb85_d1_hz - rb87_d1_hz,
        .line_center_hz = rb85_d1_hz,
        .g_j_ground = 2.00233113,
        .g_j_excited = 0.666,
        .g_i = -0.00029364000,
        .natural_linewidth_hz = 5.7500e6,
        .reduced_dipole_cm = 2.5377e-29,
    },
    {
        .name = Isotope::Rb87,
        .nuclear_spin = 1.5,
        .mass_kg = 1.443160648e-25,
        .natural_abundance = 0.2783,
        .a_ground_hz = 3.417341305452145e9,
        .a_excited_hz = 408.328e6,
        .isotope_shift_hz = 0.0,
        .line_center_hz = rb87_d1_hz,
        .g_j_ground = 2.00233113,
        .g_j_excited = 0.666,
        .g_i = -0.0009951414,
        .natural_linewidth_hz = 5.7500e6,
        .reduced_dipole_cm = 2.5377e-29,
    },
}};

}  // namespace

std::string_view to_string(Isotope iso) {
  return iso == Isotope::Rb85 ? "Rb85" : "Rb87";
}

Isotope isotope_from_string(std::string_view name) {
  if (name == "Rb85" || name == "85") return Isotope::Rb85;
  if (name == "Rb87" || name == "87") return Isotope::Rb87;
  throw ConfigError("unknown isotope '" + std::string(name) + "' (expected Rb85 or Rb87)");
}

void IsotopeSpec::validate() const {
  std::vector<std::string> issues;
  if (nuclear_spin != 1.5 && nuclear_spin != 2.5)
    issues.push_back("nuclear spin must be 3/2 or 5/2");
  if (!(mass_kg > 0.0)) issues.push_back("mass must be positive");
  if (!(natural_abundance >= 0.0 && natural_abundance <= 1.0))
    issues.push_back("natural abundance must lie in [0, 1]");
  if (!(natural_linewidth_hz > 0.0)) issues.push_back("natural linewidth must be positive");
  if (!(ground_splitting_hz() > 0.0)) issues.push_back("ground hyperfine splitting must be positive");
  if (!(ground_splitting_hz() > excited_splitting_hz()))
    issues.push_back("ground hyperfine splitting must exceed the excited splitting");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

const IsotopeSpec& isotope(Isotope iso) {
  return registry[iso == Isotope::Rb85 ? 0 : 1];
}

const std::array<IsotopeSpec, 2>& isotopes() { return registry; }

double hyperfine_level_hz(double a_hz, double nuclear_spin, double f) {
  constexpr double j = 0.5;
  const double k = f * (f + 1.0) - nuclear_spin * (nuclear_spin + 1.0) - j * (j + 1.0);
  return 0.5 * a_hz * k;
}

double FrequencyConvention::reference_frequency_hz() const {
  const IsotopeSpec& spec = rbf::isotope(isotope);
  const double i = spec.nuclear_spin;
  auto valid_f = [i](double f) { return f == i - 0.5 || f == i + 0.5; };
  if (!valid_f(f_ground) || !valid_f(f_excited))
    throw ConfigError("reference transition F values must be I +/- 1/2");
  return spec.line_center_hz + hyperfine_level_hz(spec.a_excited_hz, i, f_excited) -
         hyperfine_level_hz(spec.a_ground_hz, i, f_ground);
}

double detuning_to_omega(double detuning_ghz, const FrequencyConvention& conv) {
  return 2.0 * constants::pi * (conv.reference_frequency_hz() + detuning_ghz * 1e9);
}

double omega_to_detuning(double omega_rad_s, const FrequencyConvention& conv) {
  return frequency_to_detuning(omega_rad_s / (2.0 * constants::pi), conv);
}

double frequency_to_detuning(double frequency_hz, const FrequencyConvention& conv) {
  return (frequency_hz - conv.reference_frequency_hz()) * 1e-9;
}

double RamanDetunings::write_ghz() const {
  return stokes_ghz + isotope(Isotope::Rb87).ground_splitting_hz() * 1e-9;
}

double RamanDetunings::read_ghz() const {
  return anti_stokes_ghz - isotope(Isotope::Rb87).ground_splitting_hz() * 1e-9;
}

double vapor_pressure(double temperature_k) {
  if (!(temperature_k >= 250.0 && temperature_k <= 500.0))
    throw DomainError("vapor_pressure: temperature " + std::to_string(temperature_k) +
                      " K outside [250, 500] K");
  const double log10_torr = 2.881 + 4.312 - 4040.0 / temperature_k;
  return std::pow(10.0, log10_torr) * constants::torr;
}

double number_density(double temperature_k, double isotope_fraction) {
  if (!(isotope_fraction >= 0.0 && isotope_fraction <= 1.0))
    throw DomainError("number_density: isotope fraction must lie in [0, 1]");
  return isotope_fraction * vapor_pressure(temperature_k) /
         (constants::boltzmann * temperature_k);
}

}  // namespace rbf
