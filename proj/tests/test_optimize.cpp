#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "rbfilter/config.hpp"
#include "rbfilter/error.hpp"
#include "rbfilter/optimize.hpp"

using namespace rbf;

namespace {

double kelvin(double c) { return c + constants::zero_celsius; }

double faraday_band_peak(double t_k, double b, double offset_k) {
  CellConfig c = FilterHardware::default_faraday_cell();
  c.temperature_k = t_k;
  c.temperature_offset_k = offset_k;
  c.b_tesla = b;
  const Eigen::VectorXd grid = GridSpec{-10, 0, 4001}.make();
  const auto t = faraday_transmission(susceptibility(c, grid), c.length_m, PolarizerOrientation::Crossed);
  Eigen::Index i = 0;
  t.transmission.maxCoeff(&i);
  return grid(i);
}

}  // namespace

TEST_CASE("transparent chain lands in the penalty branch") {
  CellConfig a = FilterHardware::default_absorption_cell();
  CellConfig f = FilterHardware::default_faraday_cell();
  a.fraction_rb85 = a.fraction_rb87 = 0.0;
  f.fraction_rb85 = f.fraction_rb87 = 0.0;
  const FilterChain chain{{AbsorptionCell{a}, RotatorCell{f}}, 1.0};
  const FigureOfMerit m = score(chain, FomSpec{});
  CHECK(m.suppression_write_db == doctest::Approx(0.0));
  CHECK(m.suppression_read_db == doctest::Approx(0.0));
  CHECK_FALSE(m.feasible);
  CHECK(m.objective == doctest::Approx(-100.0));
}

TEST_CASE("reference settings score near the anti-Stokes transmission") {
  const RunConfig cfg = preset("paper-optimum");
  const FilterHardware hw = cfg.hardware();
  const FilterSettings s{kelvin(100), kelvin(102), 1e-2, 1e-2};
  const FigureOfMerit m = score(hw, s, cfg.fom);
  MESSAGE("objective " << m.objective << " (T_S " << m.t_stokes << ", T_AS " << m.t_anti_stokes
                       << ", suppression " << m.suppression_write_db << " / " << m.suppression_read_db << " dB)");
  CHECK(m.feasible);
  CHECK(std::abs(m.objective - 0.40) <= 0.15);
}

TEST_CASE("hotter absorption cell lowers the anti-Stokes transmission") {
  const FilterHardware hw = preset("paper-optimum").hardware();
  double previous = 2.0;
  for (double t = 100.0; t <= 130.0 + 1e-9; t += 2.5) {
    const FigureOfMerit m = score(hw, {kelvin(t), kelvin(102), 1e-2, 1e-2}, FomSpec{});
    CHECK(m.t_anti_stokes < previous);
    previous = m.t_anti_stokes;
  }
}

TEST_CASE("score is pure") {
  const FilterHardware hw = FilterHardware::defaults();
  const FilterSettings s{kelvin(105), kelvin(95), 1.2e-2, 7e-3};
  const FigureOfMerit a = score(hw, s, FomSpec{});
  const FigureOfMerit b = score(hw, s, FomSpec{});
  CHECK(std::memcmp(&a.objective, &b.objective, sizeof(double)) == 0);
  CHECK(std::memcmp(&a.t_stokes, &b.t_stokes, sizeof(double)) == 0);
}

TEST_CASE("collapsed box returns its single point") {
  const FilterHardware hw = FilterHardware::defaults();
  const FilterSettings s{kelvin(100), kelvin(100), 1e-2, 5e-3};
  ParamBox box{s.as_vector(), s.as_vector()};
  OptimizerOptions opt;
  opt.budget = 100;
  const OptimizeResult r = optimize_filters(hw, box, FomSpec{}, opt);
  CHECK(r.best == Eigen::VectorXd(s.as_vector()));
  CHECK(r.best_value == score(hw, s, FomSpec{}).objective);
}

TEST_CASE("quadratic objective converges to its analytic maximum") {
  ParamBox box{Eigen::Vector3d(-2.0, 0.0, 10.0), Eigen::Vector3d(3.0, 1.0, 20.0)};
  const Eigen::Vector3d target(0.37, 0.81, 13.3);
  const Eigen::Vector3d scale(1.0, 4.0, 0.2);
  const Objective f = [&](const Eigen::VectorXd& x) {
    return -(scale.array() * (x - target).array()).square().sum();
  };
  OptimizerOptions opt;
  opt.budget = 3000;
  opt.grid_resolution = {5, 5, 5};
  const OptimizeResult r = maximize(box, f, opt);
  CHECK((r.best - target).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("optimizer contract: box, trace maximum, determinism") {
  ParamBox box{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 2.0)};
  // Maximum outside the box: the search must stay on the face.
  const Objective f = [](const Eigen::VectorXd& x) {
    return -std::pow(x(0) - 1.7, 2) - std::pow(x(1) - 0.4, 2) + 0.1 * std::sin(9 * x(0));
  };
  OptimizerOptions opt;
  opt.budget = 400;
  opt.grid_resolution = {6, 6};
  const OptimizeResult a = maximize(box, f, opt);
  const OptimizeResult b = maximize(box, f, opt);
  CHECK(static_cast<int>(a.trace.size()) <= opt.budget);
  double best = -1e300;
  for (const auto& e : a.trace) {
    CHECK(box.contains(e.x));
    best = std::max(best, e.value);
  }
  CHECK(a.best_value == best);
  CHECK(box.contains(a.best));
  CHECK(a.best(0) == 1.0);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].x == b.trace[i].x);
}

TEST_CASE("optimizer rejects bad inputs") {
  const Objective f = [](const Eigen::VectorXd& x) { return -x.squaredNorm(); };
  OptimizerOptions opt;
  opt.grid_resolution = {3};
  CHECK_THROWS_AS(maximize(ParamBox{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1)}, f, opt), ConfigError);
  CHECK_THROWS_AS(maximize(ParamBox{Eigen::VectorXd(), Eigen::VectorXd()}, f, opt), ConfigError);
  opt.budget = 99;
  CHECK_THROWS_AS(maximize(ParamBox{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)}, f, opt), ConfigError);
  opt.budget = 100;
  opt.grid_resolution = {200};
  CHECK_THROWS_AS(maximize(ParamBox{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)}, f, opt), ConfigError);
  const Objective nan = [](const Eigen::VectorXd&) { return std::nan(""); };
  opt.grid_resolution = {3};
  CHECK_THROWS_AS(maximize(ParamBox{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)}, nan, opt), NumericalError);
}

TEST_CASE("Nelder-Mead minimizes the Rosenbrock function") {
  const Objective f = [](const Eigen::VectorXd& x) {
    return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2);
  };
  const SimplexResult r = nelder_mead_minimize(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(0.1, 0.1), 5000);
  CHECK(r.converged);
  CHECK(std::abs(r.x(0) - 1.0) < 1e-5);
  CHECK(std::abs(r.x(1) - 1.0) < 1e-5);
}

TEST_CASE("Faraday field grid moves the band by less than 100 MHz per step") {
  const ParamBox box = ParamBox::filter_defaults();
  const OptimizerOptions opt;
  const double step = (box.upper(3) - box.lower(3)) / (opt.grid_resolution[3] - 1);
  std::vector<double> peaks;
  for (int k = 0; k < opt.grid_resolution[3]; ++k)
    peaks.push_back(faraday_band_peak(kelvin(102), box.lower(3) + k * step, optimum_faraday_offset_k));
  double worst = 0.0;
  for (std::size_t k = 1; k < peaks.size(); ++k) worst = std::max(worst, std::abs(peaks[k] - peaks[k - 1]));
  MESSAGE("largest band shift per field step: " << worst * 1e3 << " MHz");
  CHECK(worst < 0.1);
}
