#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rbfilter/propagation.hpp"

namespace rbf {

/// A measured transmission spectrum. Transmission may overshoot 1 slightly
/// from calibration; weights default to 1.
struct MeasuredSpectrum {
  Eigen::VectorXd detuning_ghz;
  Eigen::VectorXd transmission;
  Eigen::VectorXd weights;

  static constexpr Eigen::Index min_rows = 50;
  static constexpr double max_transmission = 1.05;

  /// Throws DataError on fewer than min_rows rows, non-finite values,
  /// a non-increasing detuning axis or transmission outside [0, 1.05].
  void validate() const;
  Eigen::Index size() const { return detuning_ghz.size(); }
};

enum class FitParam { Temperature, Field, FractionRb87, Length };

std::string_view to_string(FitParam p);
FitParam fit_param_from_string(std::string_view s);

/// What the cell is measured in.
enum class SpectrumModel { Absorption, FaradayCrossed, FaradayParallel };

std::string_view to_string(SpectrumModel m);
SpectrumModel spectrum_model_from_string(std::string_view s);

/// Transmission of a single cell on the given grid.
Eigen::VectorXd model_transmission(const CellConfig& cell, SpectrumModel model,
                                   const Eigen::VectorXd& grid,
                                   const FrequencyConvention& conv = {});

struct FitOptions {
  std::vector<FitParam> free{FitParam::Temperature, FitParam::Field};
  SpectrumModel model = SpectrumModel::Absorption;
  int max_evaluations = 3000;
};

struct FitResult {
  CellConfig cell;  // initial cell with fitted values substituted
  std::vector<FitParam> free;
  Eigen::VectorXd values;           // SI units, order of `free`
  Eigen::VectorXd standard_errors;  // sqrt(diag(covariance))
  Eigen::MatrixXd covariance;
  double rms_residual = 0.0;
  int evaluations = 0;
  bool converged = false;
  bool degenerate = false;
  std::string warning;
};

double get_param(const CellConfig& cell, FitParam p);
void set_param(CellConfig& cell, FitParam p, double value);

/// Least squares over the free parameters by Nelder-Mead, starting from the
/// initial cell. Covariance is sigma^2 (J^T J)^{-1} from a finite-difference
/// Jacobian at the optimum.
FitResult fit_spectrum(const MeasuredSpectrum& measured, const CellConfig& initial,
                       const FitOptions& options, const FrequencyConvention& conv = {});

}  // namespace rbf
