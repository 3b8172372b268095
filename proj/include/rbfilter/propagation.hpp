#pragma once

// Jones-calculus propagation through polarizers and vapor cells.
//
// Lab frame: light travels along +z, linear basis (x, y), input polarization
// along x unless stated otherwise. Circular basis: e_L = (x + i y)/sqrt(2)
// drives sigma+ transitions of a field along +z, e_R = (x - i y)/sqrt(2)
// drives sigma-. A cell of length L multiplies an eigenmode amplitude by
// exp(i dK L) with dK = (omega/c) chi / 2; the common vacuum phase is dropped.

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rbfilter/lineshape.hpp"

namespace rbf {

/// Floor applied when expressing transmissions in dB.
inline constexpr double db_floor = -150.0;

double to_db(double transmission);

struct TransmissionSpectrum {
  Eigen::VectorXd detuning_ghz;
  Eigen::VectorXd transmission;

  Eigen::VectorXd db() const;
  Eigen::Index size() const { return detuning_ghz.size(); }
};

enum class JonesBasis { Linear, Circular };

struct JonesTransfer {
  JonesBasis basis = JonesBasis::Linear;
  Eigen::VectorXd detuning_ghz;
  std::vector<Eigen::Matrix2cd> matrices;

  JonesTransfer to_linear() const;
  /// Largest singular value over the grid (<= 1 for a passive element).
  double max_singular_value() const;
};

/// Intensity transmission of a transverse-field cell for light polarized at
/// angle psi to B, weighting the pi and sigma eigenmodes incoherently.
TransmissionSpectrum absorption_transmission(const ComplexSpectrum& chi, double psi_rad);

struct RotationSpectrum {
  Eigen::VectorXd detuning_ghz;
  Eigen::VectorXd theta_rad;  // (n_L - n_R) omega L / (2c)
  Eigen::VectorXd t_rot;      // exp(-(alpha_L + alpha_R) L / 2)
};

RotationSpectrum faraday_rotation(const ComplexSpectrum& chi, double length_m);

enum class PolarizerOrientation { Crossed, Parallel };

/// Full Jones transmission of a longitudinal cell between ideal polarizers:
/// crossed |e^{iK_L L} - e^{iK_R L}|^2 / 4, parallel |e^{iK_L L} + e^{iK_R L}|^2 / 4.
TransmissionSpectrum faraday_transmission(const ComplexSpectrum& chi, double length_m,
                                          PolarizerOrientation orientation);

/// Single-pass intensity transmission exp(-alpha L) of each eigenmode.
std::array<Eigen::VectorXd, 2> mode_transmissions(const ComplexSpectrum& chi, double length_m);

// --- Filter chains ---------------------------------------------------------

struct Polarizer {
  double angle_rad = 0.0;    // transmission axis from x
  double extinction = 0.0;   // intensity transmission of the blocked axis
  bool operator==(const Polarizer&) const = default;
};

/// Transverse-field cell; its psi_rad sets the B axis relative to x.
struct AbsorptionCell {
  CellConfig cell;
  bool operator==(const AbsorptionCell&) const = default;
};

/// Longitudinal-field cell (Faraday rotator).
struct RotatorCell {
  CellConfig cell;
  bool operator==(const RotatorCell&) const = default;
};

using ChainElement = std::variant<Polarizer, AbsorptionCell, RotatorCell>;

struct FilterChain {
  std::vector<ChainElement> elements;
  double wollaston_extinction = 1e-5;  // drive-laser leakage into the signal port
  double input_angle_rad = 0.0;        // input linear polarization

  bool operator==(const FilterChain&) const = default;
};

JonesTransfer polarizer_transfer(const Polarizer& p, const Eigen::VectorXd& grid);
JonesTransfer absorption_cell_transfer(const ComplexSpectrum& chi);
JonesTransfer rotator_transfer(const ComplexSpectrum& chi);

/// Jones transfer of each element on the same grid, in chain order.
std::vector<JonesTransfer> element_transfers(const FilterChain& chain,
                                             const Eigen::VectorXd& grid,
                                             const FrequencyConvention& conv = {});

/// Output intensity for unit linearly polarized input at input_angle_rad.
/// Grids must agree exactly; resampling is the caller's job.
TransmissionSpectrum cascade(const std::vector<JonesTransfer>& transfers,
                             double input_angle_rad = 0.0);

TransmissionSpectrum cascade(const FilterChain& chain, const Eigen::VectorXd& grid,
                             const FrequencyConvention& conv = {});

/// Distance between the outermost crossings of `threshold` that bound the
/// region with T < threshold, edges located by linear interpolation. Zero
/// when the spectrum never drops below the threshold.
double opaque_extent_ghz(const TransmissionSpectrum& t, double threshold = 0.5);

/// Drive-laser leakage: the co-polarized beam attenuated by the Wollaston
/// extinction before the chain.
TransmissionSpectrum drive_leakage(const FilterChain& chain, const TransmissionSpectrum& signal);

}  // namespace rbf
