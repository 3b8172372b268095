#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "rbfilter/error.hpp"
#include "rbfilter/photon_stats.hpp"

using namespace rbf;

namespace {

NoiseModel quiet(double mean, double eta_s, double eta_as) {
  NoiseModel m;
  m.mean_signal = mean;
  m.eta_stokes = eta_s;
  m.eta_anti_stokes = eta_as;
  m.fluorescence = m.leakage = m.four_wave_mixing = m.intensifier = 0.0;
  return m;
}

std::vector<int> all_regions(int m) {
  std::vector<int> r(static_cast<std::size_t>(m));
  std::iota(r.begin(), r.end(), 0);
  return r;
}

// Chi-square goodness of fit of observed counts against a pmf, pooling the
// tail so that every expected count is at least 5.
double marginal_p_value(const std::vector<int>& samples, const std::vector<double>& pmf) {
  const double n = static_cast<double>(samples.size());
  std::vector<double> observed(pmf.size(), 0.0);
  for (int s : samples) observed[std::min<std::size_t>(static_cast<std::size_t>(s), pmf.size() - 1)] += 1.0;
  std::vector<double> expected(pmf);
  expected.back() = 1.0 - std::accumulate(pmf.begin(), pmf.end() - 1, 0.0);
  std::vector<double> eo, ee;
  double acc_o = 0, acc_e = 0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc_o += observed[k];
    acc_e += expected[k] * n;
    if (acc_e >= 5.0 || k + 1 == pmf.size()) {
      eo.push_back(acc_o);
      ee.push_back(acc_e);
      acc_o = acc_e = 0;
    }
  }
  if (ee.back() < 5.0 && ee.size() > 1) {
    ee[ee.size() - 2] += ee.back();
    eo[eo.size() - 2] += eo.back();
    ee.pop_back();
    eo.pop_back();
  }
  double chi2 = 0.0;
  for (std::size_t k = 0; k < ee.size(); ++k) chi2 += (eo[k] - ee[k]) * (eo[k] - ee[k]) / ee[k];
  return oracle::chi_square_p_value(chi2, static_cast<int>(ee.size()) - 1);
}

}  // namespace

TEST_CASE("no light, no counts") {
  const auto frames = simulate_frames(8, 500, quiet(0.0, 0.5, 0.5), 1);
  for (const auto& f : frames) {
    for (int v : f.stokes) CHECK(v == 0);
    for (int v : f.anti_stokes) CHECK(v == 0);
  }
}

TEST_CASE("perfect detection pairs mirror regions exactly") {
  const auto frames = simulate_frames(6, 2000, quiet(1.2, 1.0, 1.0), 3);
  for (const auto& f : frames)
    for (int k = 0; k < 6; ++k) CHECK(f.stokes[static_cast<std::size_t>(k)] == f.anti_stokes[static_cast<std::size_t>(5 - k)]);
  CHECK(correlation_coefficient(frames, 1, 4) == 1.0);
  const auto regions = all_regions(6);
  const Eigen::MatrixXd c = correlation_map(frames, regions, regions);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      if (j == 5 - i) CHECK(c(i, j) == 1.0);
      else CHECK(std::abs(c(i, j)) < 4.0 / std::sqrt(2000.0));
    }
}

TEST_CASE("thinned thermal mean") {
  const NoiseModel m = quiet(0.75, 0.5, 0.5);
  const auto frames = simulate_frames(1, 200000, m, 17);
  double sum = 0.0;
  for (const auto& f : frames) sum += f.stokes[0];
  const double mean = sum / static_cast<double>(frames.size());
  const double g = 0.5 * 0.75;
  const double se = std::sqrt(g * (1 + g) / static_cast<double>(frames.size()));
  CHECK(std::abs(mean - g) < 3.0 * se);
}

TEST_CASE("joint histogram") {
  std::vector<CountsFrame> fixed(1000, CountsFrame{0, {3, 3}, {3, 3}});
  const Eigen::MatrixXd d = joint_histogram(fixed, 0, 1);
  CHECK(d(3, 3) == 1.0);
  CHECK(d.sum() == 1.0);
  CHECK_THROWS_AS(joint_histogram(std::span<const CountsFrame>{}, 0, 0), DataError);
  CHECK_THROWS_AS(joint_histogram(fixed, 0, 2), DataError);

  const auto frames = simulate_frames(8, 20000, NoiseModel::filtered(), 5);
  const Eigen::MatrixXd p = joint_histogram(frames, 2, 5);
  CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
  CHECK(p.minCoeff() >= 0.0);
  CHECK(correlation_coefficient(frames, 2, 5) > 0.3);
}

TEST_CASE("independent streams factorize") {
  NoiseModel m = quiet(0.0, 0.5, 0.5);
  m.fluorescence = 1.3;
  const auto frames = simulate_frames(2, 50000, m, 8);
  const Eigen::MatrixXd p = joint_histogram(frames, 0, 1);
  const Eigen::VectorXd ps = p.rowwise().sum();
  const Eigen::RowVectorXd pa = p.colwise().sum();
  const double n = static_cast<double>(frames.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double q = ps(i) * pa(j);
      const double se = std::sqrt(std::max(q * (1 - q), 1.0 / n) / n);
      worst = std::max(worst, std::abs(p(i, j) - q) / se);
    }
  CHECK(worst < 4.0);
}

TEST_CASE("marginals match the thinned-thermal-plus-Poisson distribution") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const NoiseModel m = NoiseModel::filtered();
    const auto frames = simulate_frames(4, 25000, m, seed);
    std::vector<int> s, a;
    for (const auto& f : frames) {
      s.push_back(f.stokes[1]);
      a.push_back(f.anti_stokes[2]);
    }
    CHECK(marginal_p_value(s, oracle::thinned_marginal(m, m.eta_stokes, 15)) > 0.01);
    CHECK(marginal_p_value(a, oracle::thinned_marginal(m, m.eta_anti_stokes, 15)) > 0.01);
  }
}

TEST_CASE("Monte Carlo correlation agrees with the analytic formula") {
  std::vector<NoiseModel> models = {NoiseModel::filtered(), quiet(0.5, 0.9, 0.3), quiet(2.0, 0.2, 0.6)};
  NoiseModel noisy = NoiseModel::filtered();
  noisy.leakage = 2.0;
  models.push_back(noisy);
  NoiseModel fwm = quiet(1.0, 0.5, 0.5);
  fwm.four_wave_mixing = 0.7;
  fwm.intensifier = 0.2;
  models.push_back(fwm);
  std::uint64_t seed = 100;
  for (const auto& m : models) {
    const auto frames = simulate_frames(2, 50000, m, seed++);
    const double c = correlation_coefficient(frames, 0, 1);
    const double se = correlation_standard_error(frames, 0, 1, 50);
    const double ref = oracle::analytic_correlation(m);
    CAPTURE(ref);
    CAPTURE(c);
    CHECK(std::abs(c - ref) < 3.0 * se);
  }
}

TEST_CASE("filtered and unfiltered presets") {
  const NoiseModel f = NoiseModel::filtered();
  const NoiseModel u = NoiseModel::unfiltered();
  CHECK(oracle::analytic_correlation(f) == doctest::Approx(0.38).epsilon(0.05 / 0.38));
  CHECK(oracle::analytic_correlation(u) <= 0.05);
  CHECK(u.intensifier == 1.5);
  CHECK(oracle::analytic_mean(u, 0.5 * (u.eta_stokes + u.eta_anti_stokes)) == doctest::Approx(30.0));
  CHECK(u.fluorescence == doctest::Approx(u.leakage));

  const auto regions = all_regions(8);
  const auto ff = simulate_frames(8, 20000, f, 1);
  const Eigen::MatrixXd cf = correlation_map(ff, regions, regions);
  const CorrelationSummary sf = summarize(ff, cf, 50);
  CHECK(std::abs(sf.paired_mean - 0.38) <= 0.05);
  CHECK(sf.ridge_contrast > 5.0);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (j != 7 - i) CHECK(std::abs(cf(i, j)) < 4.0 / std::sqrt(20000.0));

  const auto fu = simulate_frames(8, 20000, u, 1);
  const Eigen::MatrixXd cu = correlation_map(fu, regions, regions);
  CHECK(summarize(fu, cu, 50).paired_mean <= 0.05);
  CHECK(cu.maxCoeff() <= 0.1);
  CHECK_THROWS_AS(NoiseModel::unfiltered(1.0), ConfigError);
}

TEST_CASE("correlation is invariant under affine rescaling") {
  const auto frames = simulate_frames(2, 5000, NoiseModel::filtered(), 9);
  std::vector<double> s, a, s2;
  for (const auto& f : frames) {
    s.push_back(f.stokes[0]);
    a.push_back(f.anti_stokes[1]);
    s2.push_back(3.5 * f.stokes[0] + 2.0);
  }
  CHECK(std::abs(pearson(s, a) - pearson(s2, a)) <= 1e-12);
  CHECK(pearson(s, a) == correlation_coefficient(frames, 0, 1));
}

TEST_CASE("zero variance is an error, not zero") {
  std::vector<CountsFrame> frames(100, CountsFrame{0, {2}, {2}});
  frames[3].anti_stokes[0] = 5;
  CHECK_THROWS_AS(correlation_coefficient(frames, 0, 0), NumericalError);
  CHECK_THROWS_AS(correlation_standard_error(frames, 0, 0, 10), NumericalError);
}

TEST_CASE("simulation is deterministic and partition independent") {
  const NoiseModel m = NoiseModel::filtered();
  const auto a = simulate_frames(8, 300, m, 42);
  const auto b = simulate_frames(8, 300, m, 42);
  const auto c = simulate_frames(8, 300, m, 43);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].stokes == b[i].stokes);
    CHECK(a[i].anti_stokes == b[i].anti_stokes);
    const CountsFrame single = simulate_frame(8, i, m, 42);
    CHECK(single.stokes == a[i].stokes);
    CHECK(single.anti_stokes == a[i].anti_stokes);
    differs = differs || a[i].stokes != c[i].stokes;
  }
  CHECK(differs);
  CHECK(frame_seed(1, 0) != frame_seed(1, 1));
  CHECK(frame_seed(1, 5) != frame_seed(2, 5));
}

TEST_CASE("simulation input checks") {
  NoiseModel bad = NoiseModel::filtered();
  bad.eta_stokes = 1.5;
  bad.fluorescence = -1.0;
  try {
    simulate_frames(8, 10, bad, 1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() == 2);
  }
  CHECK_THROWS_AS(simulate_frames(0, 10, NoiseModel{}, 1), ConfigError);
  CHECK_THROWS_AS(simulate_frames(8, 0, NoiseModel{}, 1), ConfigError);
}

TEST_CASE("region geometry") {
  const RegionGeometry g;
  CHECK(constants::pi * g.radius_mrad() * g.radius_mrad() == doctest::Approx(0.02));
  CHECK(g.center_mrad(1) - g.center_mrad(0) == doctest::Approx(2 * g.radius_mrad()));
  CHECK(g.center_mrad(0) == doctest::Approx(-g.center_mrad(g.count - 1)));
  CHECK(g.partner(0) == 7);
  CHECK(g.partner(g.partner(3)) == 3);
}
