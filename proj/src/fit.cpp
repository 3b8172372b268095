#include "rbfilter/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "rbfilter/error.hpp"
#include "rbfilter/optimize.hpp"

namespace rbf {

void MeasuredSpectrum::validate() const {
  const Eigen::Index n = detuning_ghz.size();
  if (transmission.size() != n) throw DataError("measured spectrum: column lengths differ");
  if (weights.size() != 0 && weights.size() != n)
    throw DataError("measured spectrum: weights length differs from the data");
  if (n < min_rows)
    throw DataError("measured spectrum: need at least " + std::to_string(min_rows) +
                    " rows, got " + std::to_string(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = detuning_ghz(i), t = transmission(i);
    const std::string row = "measured spectrum row " + std::to_string(i + 1) + ": ";
    if (!std::isfinite(d) || !std::isfinite(t)) throw DataError(row + "non-finite value");
    if (i > 0 && !(d > detuning_ghz(i - 1))) throw DataError(row + "detuning is not increasing");
    if (t < 0.0 || t > max_transmission)
      throw DataError(row + "transmission outside [0, 1.05]");
    if (weights.size() && !(weights(i) >= 0.0 && std::isfinite(weights(i))))
      throw DataError(row + "weight must be finite and >= 0");
  }
}

std::string_view to_string(FitParam p) {
  switch (p) {
    case FitParam::Temperature: return "T";
    case FitParam::Field: return "B";
    case FitParam::FractionRb87: return "f87";
    case FitParam::Length: return "L";
  }
  return "?";
}

FitParam fit_param_from_string(std::string_view s) {
  if (s == "T") return FitParam::Temperature;
  if (s == "B") return FitParam::Field;
  if (s == "f87") return FitParam::FractionRb87;
  if (s == "L") return FitParam::Length;
  throw ConfigError("unknown fit parameter '" + std::string(s) + "' (expected T, B, f87 or L)");
}

std::string_view to_string(SpectrumModel m) {
  switch (m) {
    case SpectrumModel::Absorption: return "absorption";
    case SpectrumModel::FaradayCrossed: return "faraday-crossed";
    case SpectrumModel::FaradayParallel: return "faraday-parallel";
  }
  return "?";
}

SpectrumModel spectrum_model_from_string(std::string_view s) {
  if (s == "absorption") return SpectrumModel::Absorption;
  if (s == "faraday-crossed") return SpectrumModel::FaradayCrossed;
  if (s == "faraday-parallel") return SpectrumModel::FaradayParallel;
  throw ConfigError("unknown spectrum model '" + std::string(s) +
                    "' (expected absorption, faraday-crossed or faraday-parallel)");
}

Eigen::VectorXd model_transmission(const CellConfig& cell, SpectrumModel model,
                                   const Eigen::VectorXd& grid, const FrequencyConvention& conv) {
  const bool faraday = model != SpectrumModel::Absorption;
  if (faraday != (cell.geometry == Geometry::Longitudinal))
    throw ConfigError(std::string("spectrum model '") + std::string(to_string(model)) +
                      "' does not match the cell geometry");
  const ComplexSpectrum chi = susceptibility(cell, grid, conv);
  if (!faraday) return absorption_transmission(chi, cell.psi_rad).transmission;
  return faraday_transmission(chi, cell.length_m,
                              model == SpectrumModel::FaradayCrossed ? PolarizerOrientation::Crossed
                                                                     : PolarizerOrientation::Parallel)
      .transmission;
}

double get_param(const CellConfig& cell, FitParam p) {
  switch (p) {
    case FitParam::Temperature: return cell.temperature_k;
    case FitParam::Field: return cell.b_tesla;
    case FitParam::FractionRb87: return cell.fraction_rb87;
    case FitParam::Length: return cell.length_m;
  }
  return 0.0;
}

void set_param(CellConfig& cell, FitParam p, double value) {
  switch (p) {
    case FitParam::Temperature: cell.temperature_k = value; break;
    case FitParam::Field: cell.b_tesla = value; break;
    case FitParam::FractionRb87: cell.fraction_rb87 = value; break;
    case FitParam::Length: cell.length_m = value; break;
  }
}

namespace {

double natural_scale(FitParam p) {
  switch (p) {
    case FitParam::Temperature: return 300.0;
    case FitParam::Field: return 1e-2;
    case FitParam::FractionRb87: return 1e-2;
    case FitParam::Length: return 0.1;
  }
  return 1.0;
}

}  // namespace

FitResult fit_spectrum(const MeasuredSpectrum& measured, const CellConfig& initial,
                       const FitOptions& options, const FrequencyConvention& conv) {
  if (options.free.empty()) throw ConfigError("fit: the set of free parameters is empty");
  if (std::set<FitParam>(options.free.begin(), options.free.end()).size() != options.free.size())
    throw ConfigError("fit: free parameters must be distinct");
  if (options.max_evaluations < 10) throw ConfigError("fit: max_evaluations must be >= 10");
  initial.validate();
  measured.validate();
  // Fails early on a geometry/model mismatch.
  (void)model_transmission(initial, options.model, measured.detuning_ghz.head(2), conv);

  const auto p = static_cast<Eigen::Index>(options.free.size());
  const Eigen::Index n = measured.size();
  const Eigen::VectorXd w =
      measured.weights.size() ? measured.weights : Eigen::VectorXd::Ones(n).eval();

  Eigen::VectorXd scale(p), u0(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const FitParam fp = options.free[static_cast<std::size_t>(i)];
    const double v = get_param(initial, fp);
    scale(i) = v != 0.0 ? std::abs(v) : natural_scale(fp);
    u0(i) = v / scale(i);
  }

  const auto cell_at = [&](const Eigen::VectorXd& u) {
    CellConfig c = initial;
    for (Eigen::Index i = 0; i < p; ++i)
      set_param(c, options.free[static_cast<std::size_t>(i)], u(i) * scale(i));
    return c;
  };
  const auto residuals = [&](const CellConfig& c) -> Eigen::VectorXd {
    return w.cwiseProduct(model_transmission(c, options.model, measured.detuning_ghz, conv) -
                          measured.transmission);
  };
  const Objective ssr = [&](const Eigen::VectorXd& u) {
    const CellConfig c = cell_at(u);
    try {
      c.validate();
    } catch (const ConfigError&) {
      return std::numeric_limits<double>::infinity();
    }
    return residuals(c).squaredNorm();
  };

  FitResult out;
  out.free = options.free;
  SimplexResult r = nelder_mead_minimize(ssr, u0, Eigen::VectorXd::Constant(p, 0.05),
                                         options.max_evaluations * 2 / 3, 1e-10, 1e-15);
  out.evaluations = r.evaluations;
  const int left = options.max_evaluations - r.evaluations;
  if (left > p + 1) {
    SimplexResult r2 = nelder_mead_minimize(ssr, r.x, Eigen::VectorXd::Constant(p, 0.005), left,
                                            1e-11, 1e-15);
    out.evaluations += r2.evaluations;
    if (r2.value <= r.value) r = r2;
  }
  out.converged = r.converged;
  if (!std::isfinite(r.value)) throw NumericalError("fit: no valid parameter set found");

  out.cell = cell_at(r.x);
  out.values = r.x.cwiseProduct(scale);
  out.rms_residual = std::sqrt(r.value / static_cast<double>(n));

  // Central-difference Jacobian in physical units.
  Eigen::MatrixXd jac(n, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double h = 1e-5 * scale(i);
    const FitParam fp = options.free[static_cast<std::size_t>(i)];
    CellConfig up = out.cell, down = out.cell;
    set_param(up, fp, out.values(i) + h);
    set_param(down, fp, out.values(i) - h);
    jac.col(i) = (residuals(up) - residuals(down)) / (2.0 * h);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const double dof = std::max<double>(1.0, static_cast<double>(n - p));
  const double sigma2 = r.value / dof;
  Eigen::VectorXd inv_s2 = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < p; ++i)
    if (s(i) > 1e-10 * s(0)) inv_s2(i) = 1.0 / (s(i) * s(i));
  out.covariance = sigma2 * svd.matrixV() * inv_s2.asDiagonal() * svd.matrixV().transpose();
  out.standard_errors = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();

  if (!(s(0) > 0.0) || s(p - 1) <= 1e-10 * s(0)) {
    out.degenerate = true;
    out.warning = "degenerate fit: the residual is insensitive to some free parameter combination";
  } else if (!out.converged) {
    out.warning = "fit stopped at the evaluation budget before the simplex collapsed";
  }
  return out;
}

}  // namespace rbf
