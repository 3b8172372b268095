#pragma once

// Monte Carlo photon counts for paired Stokes / anti-Stokes angular regions.
//
// Each spatial mode emits a thermal (geometric) number of photon pairs per
// frame. The Stokes photons land in region k of the Stokes camera half, the
// partner anti-Stokes photons in the mirror region M-1-k of the other half.
// Detection thins each stream binomially; backgrounds add independent
// Poisson counts to every region.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rbf {

struct NoiseModel {
  double mean_signal = 0.75;   // thermal pairs per mode per frame
  double eta_stokes = 0.65;
  double eta_anti_stokes = 0.40;
  double fluorescence = 0.30;  // Poisson mean per region
  double leakage = 0.0;
  double four_wave_mixing = 0.0;
  double intensifier = 0.05;   // light-independent background per region

  double background() const { return fluorescence + leakage + four_wave_mixing + intensifier; }
  void validate() const;
  bool operator==(const NoiseModel&) const = default;

  /// Paired regime behind both filters.
  static NoiseModel filtered();
  /// No atomic filters: about 30 photons per region and frame, 1.5 of them
  /// intensifier background, the rest split evenly into fluorescence and leakage.
  static NoiseModel unfiltered(double total_per_region = 30.0, double intensifier = 1.5,
                               double fluorescence_share = 0.5);
};

/// Equal circular regions on a horizontal line, centered on the beam axis.
struct RegionGeometry {
  int count = 8;
  double area_mrad2 = 0.02;

  double radius_mrad() const;
  /// Horizontal center of region k; neighbours touch.
  double center_mrad(int k) const;
  /// Anti-Stokes region paired with Stokes region k.
  int partner(int k) const { return count - 1 - k; }
};

struct CountsFrame {
  std::uint64_t frame = 0;
  std::vector<int> stokes;       // n_S(A_i)
  std::vector<int> anti_stokes;  // n_AS(A_j)
};

/// Per-frame engine seed, independent of how frames are partitioned.
std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t frame);

std::vector<CountsFrame> simulate_frames(int modes, std::int64_t frames, const NoiseModel& noise,
                                         std::uint64_t seed);

CountsFrame simulate_frame(int modes, std::uint64_t frame, const NoiseModel& noise,
                           std::uint64_t seed);

/// Normalized joint distribution p(n_S, n_AS); rows index n_S.
Eigen::MatrixXd joint_histogram(std::span<const CountsFrame> frames, int region_s, int region_as);

/// Pearson coefficient of two equally long series. Throws NumericalError when
/// either has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

double correlation_coefficient(std::span<const CountsFrame> frames, int region_s, int region_as);

Eigen::MatrixXd correlation_map(std::span<const CountsFrame> frames,
                                std::span<const int> regions_s, std::span<const int> regions_as);

/// Delete-one-block jackknife standard error of the correlation coefficient.
double correlation_standard_error(std::span<const CountsFrame> frames, int region_s, int region_as,
                                  int blocks = 50);

struct CorrelationSummary {
  double paired_mean = 0.0;
  double paired_standard_error = 0.0;
  double unpaired_mean = 0.0;
  double unpaired_abs_mean = 0.0;
  double ridge_contrast = 0.0;  // paired mean / unpaired mean |C|
  double mean_counts_stokes = 0.0;
  double mean_counts_anti_stokes = 0.0;
};

CorrelationSummary summarize(std::span<const CountsFrame> frames, const Eigen::MatrixXd& map,
                             int blocks = 50);

}  // namespace rbf
