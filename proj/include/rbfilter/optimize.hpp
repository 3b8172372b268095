#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbfilter/propagation.hpp"

namespace rbf {

/// Detunings at which a chain is scored and the drive suppression it must reach.
struct FomSpec {
  double stokes_ghz = RamanDetunings{}.stokes_ghz;
  double anti_stokes_ghz = RamanDetunings{}.anti_stokes_ghz;
  double write_ghz = RamanDetunings{}.write_ghz();
  double read_ghz = RamanDetunings{}.read_ghz();
  double min_suppression_db = 100.0;

  void validate() const;
  bool operator==(const FomSpec&) const = default;
};

struct FigureOfMerit {
  double t_stokes = 0.0;
  double t_anti_stokes = 0.0;
  /// Total drive attenuation in dB (positive), Wollaston leakage included.
  double suppression_write_db = 0.0;
  double suppression_read_db = 0.0;
  bool feasible = false;
  /// min(T_S, T_AS) when feasible, otherwise minus the dB shortfall.
  double objective = 0.0;
};

/// The four tuned operating parameters, SI units.
struct FilterSettings {
  double t_abs_k = 373.15;
  double t_far_k = 375.15;
  double b_abs_t = 1e-2;
  double b_far_t = 1e-2;

  Eigen::Vector4d as_vector() const { return {t_abs_k, t_far_k, b_abs_t, b_far_t}; }
  static FilterSettings from_vector(const Eigen::Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }
  bool operator==(const FilterSettings&) const = default;
};

/// A filter chain whose absorption and Faraday cells are retuned by the
/// settings; every other property is taken from the template.
struct FilterHardware {
  FilterChain chain_template;
  std::string absorption_cell = "absorption";
  std::string faraday_cell = "faraday";

  /// Wollaston, absorption cell, polarizer, Faraday cell, crossed analyzer.
  static FilterHardware defaults();
  static FilterChain default_chain(const CellConfig& absorption, const CellConfig& faraday,
                                   double wollaston_extinction = 1e-5,
                                   double polarizer_extinction = 1e-5);
  static CellConfig default_absorption_cell();
  static CellConfig default_faraday_cell();

  FilterChain chain(const FilterSettings& s) const;
  FilterSettings settings() const;
};

/// Chain at the given settings scored at the four detunings of the spec.
FigureOfMerit score(const FilterHardware& hw, const FilterSettings& s, const FomSpec& fom);

/// Chain evaluated directly (the chain is scored as given).
FigureOfMerit score(const FilterChain& chain, const FomSpec& fom,
                    const FrequencyConvention& conv = {});

struct ParamBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// T_abs [90,120] C, T_far [60,120] C, B_abs [5,20] mT, B_far [1,20] mT, in SI.
  static ParamBox filter_defaults();

  Eigen::Index dims() const { return lower.size(); }
  void validate() const;
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
  bool operator==(const ParamBox& o) const {
    return lower.size() == o.lower.size() && upper.size() == o.upper.size() &&
           (lower.array() == o.lower.array()).all() && (upper.array() == o.upper.array()).all();
  }
};

struct OptimizerOptions {
  int budget = 2000;
  /// Grid points per dimension for the coarse scan.
  std::vector<int> grid_resolution{2, 3, 2, 96};
  int restarts = 3;
  std::uint64_t seed = 1;
  double x_tolerance = 1e-9;  // simplex size, normalized box units
  double f_tolerance = 1e-12;

  void validate(Eigen::Index dims) const;
  bool operator==(const OptimizerOptions&) const = default;
};

enum class TraceStage { Grid, Simplex };

struct TraceEntry {
  Eigen::VectorXd x;
  double value = 0.0;
  TraceStage stage = TraceStage::Grid;
};

struct OptimizeResult {
  Eigen::VectorXd best;
  double best_value = 0.0;
  std::vector<TraceEntry> trace;
  double wall_seconds = 0.0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Maximizes f over the box: coarse grid scan, then Nelder-Mead from the best
/// grid cell with restarts. Every evaluated point lies inside the box and the
/// reported best is the maximum of the trace.
OptimizeResult maximize(const ParamBox& box, const Objective& f, const OptimizerOptions& opt);

/// Nelder-Mead on an unconstrained objective, used by the fitter. Minimizes.
struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
  /// Final simplex spread of function values relative to |f| + tiny.
  double final_f_spread = 0.0;
};

SimplexResult nelder_mead_minimize(const Objective& f, const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& step, int max_evaluations,
                                   double x_tolerance = 1e-10, double f_tolerance = 1e-14);

/// Optimizes the filter settings against the figure of merit.
OptimizeResult optimize_filters(const FilterHardware& hw, const ParamBox& box,
                                const FomSpec& fom, const OptimizerOptions& opt);

}  // namespace rbf
