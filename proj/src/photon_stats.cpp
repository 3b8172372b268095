#include "rbfilter/photon_stats.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rbfilter/atomic_data.hpp"
#include "rbfilter/error.hpp"

namespace rbf {

void NoiseModel::validate() const {
  std::vector<std::string> issues;
  const auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) issues.push_back(std::string("noise: ") + name + " must be >= 0");
  };
  nonneg(mean_signal, "mean_signal");
  nonneg(fluorescence, "fluorescence");
  nonneg(leakage, "leakage");
  nonneg(four_wave_mixing, "four_wave_mixing");
  nonneg(intensifier, "intensifier");
  for (auto [v, name] : {std::pair{eta_stokes, "eta_S"}, std::pair{eta_anti_stokes, "eta_AS"}})
    if (!(v >= 0.0 && v <= 1.0)) issues.push_back(std::string("noise: ") + name + " must lie in [0, 1]");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

NoiseModel NoiseModel::filtered() { return NoiseModel{}; }

NoiseModel NoiseModel::unfiltered(double total_per_region, double intensifier,
                                  double fluorescence_share) {
  NoiseModel m;
  m.eta_stokes = 0.8;
  m.eta_anti_stokes = 0.8;
  m.intensifier = intensifier;
  m.leakage = 0.0;
  m.fluorescence = 0.0;
  const double signal = 0.5 * (m.eta_stokes + m.eta_anti_stokes) * m.mean_signal;
  const double rest = total_per_region - signal - intensifier;
  if (!(rest >= 0.0) || !(fluorescence_share >= 0.0 && fluorescence_share <= 1.0))
    throw ConfigError("unfiltered noise: total below signal plus intensifier background");
  m.fluorescence = fluorescence_share * rest;
  m.leakage = rest - m.fluorescence;
  return m;
}

double RegionGeometry::radius_mrad() const { return std::sqrt(area_mrad2 / constants::pi); }

double RegionGeometry::center_mrad(int k) const {
  return (k - 0.5 * (count - 1)) * 2.0 * radius_mrad();
}

std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t frame) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (frame + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

int draw_poisson(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<int>(mean)(rng);
}

int draw_geometric(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::geometric_distribution<int>(1.0 / (1.0 + mean))(rng);
}

int draw_binomial(std::mt19937_64& rng, int n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<int>(n, p)(rng);
}

void check_region(const CountsFrame& f, int rs, int ras) {
  if (rs < 0 || ras < 0 || rs >= static_cast<int>(f.stokes.size()) ||
      ras >= static_cast<int>(f.anti_stokes.size()))
    throw DataError("frame " + std::to_string(f.frame) + ": region index out of range");
}

struct Moments {
  double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  void add(double x, double y) {
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  Moments operator-(const Moments& o) const {
    return {n - o.n, sx - o.sx, sy - o.sy, sxx - o.sxx, syy - o.syy, sxy - o.sxy};
  }
  double correlation() const {
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    if (!(vx > 0.0) || !(vy > 0.0))
      throw NumericalError("correlation undefined: a count stream has zero variance");
    return (sxy - sx * sy / n) / std::sqrt(vx * vy);
  }
};

}  // namespace

CountsFrame simulate_frame(int modes, std::uint64_t frame, const NoiseModel& noise,
                           std::uint64_t seed) {
  std::mt19937_64 rng(frame_seed(seed, frame));
  CountsFrame f;
  f.frame = frame;
  f.stokes.assign(static_cast<std::size_t>(modes), 0);
  f.anti_stokes.assign(static_cast<std::size_t>(modes), 0);
  const double b = noise.background();
  for (int k = 0; k < modes; ++k) {
    const int pairs = draw_geometric(rng, noise.mean_signal);
    const int j = modes - 1 - k;
    f.stokes[static_cast<std::size_t>(k)] += draw_binomial(rng, pairs, noise.eta_stokes);
    f.anti_stokes[static_cast<std::size_t>(j)] += draw_binomial(rng, pairs, noise.eta_anti_stokes);
  }
  for (int k = 0; k < modes; ++k) {
    f.stokes[static_cast<std::size_t>(k)] += draw_poisson(rng, b);
    f.anti_stokes[static_cast<std::size_t>(k)] += draw_poisson(rng, b);
  }
  return f;
}

std::vector<CountsFrame> simulate_frames(int modes, std::int64_t frames, const NoiseModel& noise,
                                         std::uint64_t seed) {
  if (modes < 1) throw ConfigError("photon-sim: modes must be >= 1");
  if (frames < 1) throw ConfigError("photon-sim: frames must be >= 1");
  noise.validate();
  std::vector<CountsFrame> out;
  out.reserve(static_cast<std::size_t>(frames));
  for (std::int64_t i = 0; i < frames; ++i)
    out.push_back(simulate_frame(modes, static_cast<std::uint64_t>(i), noise, seed));
  return out;
}

Eigen::MatrixXd joint_histogram(std::span<const CountsFrame> frames, int region_s, int region_as) {
  if (frames.empty()) throw DataError("joint_histogram: no frames");
  int max_s = 0, max_as = 0;
  for (const auto& f : frames) {
    check_region(f, region_s, region_as);
    const int s = f.stokes[static_cast<std::size_t>(region_s)];
    const int a = f.anti_stokes[static_cast<std::size_t>(region_as)];
    if (s < 0 || a < 0) throw DataError("joint_histogram: negative counts");
    max_s = std::max(max_s, s);
    max_as = std::max(max_as, a);
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(max_s + 1, max_as + 1);
  for (const auto& f : frames)
    p(f.stokes[static_cast<std::size_t>(region_s)], f.anti_stokes[static_cast<std::size_t>(region_as)]) += 1.0;
  return p / static_cast<double>(frames.size());
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw DataError("pearson: need two series of equal length >= 2");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0))
    throw NumericalError("correlation undefined: a count stream has zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double correlation_coefficient(std::span<const CountsFrame> frames, int region_s, int region_as) {
  if (frames.empty()) throw DataError("correlation: no frames");
  std::vector<double> s, a;
  s.reserve(frames.size());
  a.reserve(frames.size());
  for (const auto& f : frames) {
    check_region(f, region_s, region_as);
    s.push_back(f.stokes[static_cast<std::size_t>(region_s)]);
    a.push_back(f.anti_stokes[static_cast<std::size_t>(region_as)]);
  }
  return pearson(s, a);
}

Eigen::MatrixXd correlation_map(std::span<const CountsFrame> frames, std::span<const int> regions_s,
                                std::span<const int> regions_as) {
  Eigen::MatrixXd c(static_cast<Eigen::Index>(regions_s.size()),
                    static_cast<Eigen::Index>(regions_as.size()));
  for (std::size_t i = 0; i < regions_s.size(); ++i)
    for (std::size_t j = 0; j < regions_as.size(); ++j)
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          correlation_coefficient(frames, regions_s[i], regions_as[j]);
  return c;
}

double correlation_standard_error(std::span<const CountsFrame> frames, int region_s, int region_as,
                                  int blocks) {
  const auto n = static_cast<std::ptrdiff_t>(frames.size());
  if (blocks < 2 || n < 2 * blocks)
    throw DataError("jackknife: need at least two frames per block");
  std::vector<Moments> per(static_cast<std::size_t>(blocks));
  Moments total;
  // Shift by the first frame to keep the moment sums well conditioned.
  check_region(frames[0], region_s, region_as);
  const double x0 = frames[0].stokes[static_cast<std::size_t>(region_s)];
  const double y0 = frames[0].anti_stokes[static_cast<std::size_t>(region_as)];
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& f = frames[static_cast<std::size_t>(i)];
    check_region(f, region_s, region_as);
    const double x = f.stokes[static_cast<std::size_t>(region_s)] - x0;
    const double y = f.anti_stokes[static_cast<std::size_t>(region_as)] - y0;
    per[static_cast<std::size_t>(i * blocks / n)].add(x, y);
    total.add(x, y);
  }
  std::vector<double> c(static_cast<std::size_t>(blocks));
  double mean = 0.0;
  for (int b = 0; b < blocks; ++b) {
    c[static_cast<std::size_t>(b)] = (total - per[static_cast<std::size_t>(b)]).correlation();
    mean += c[static_cast<std::size_t>(b)];
  }
  mean /= blocks;
  double ss = 0.0;
  for (double v : c) ss += (v - mean) * (v - mean);
  return std::sqrt((blocks - 1.0) / blocks * ss);
}

CorrelationSummary summarize(std::span<const CountsFrame> frames, const Eigen::MatrixXd& map,
                             int blocks) {
  if (frames.empty()) throw DataError("summary: no frames");
  const Eigen::Index m = map.rows();
  if (map.cols() != m) throw DataError("summary: correlation map must be square");
  CorrelationSummary s;
  double var = 0.0;
  int off = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == m - 1 - i) {
        s.paired_mean += map(i, j);
        const double se = correlation_standard_error(frames, static_cast<int>(i),
                                                     static_cast<int>(j), blocks);
        var += se * se;
      } else {
        s.unpaired_mean += map(i, j);
        s.unpaired_abs_mean += std::abs(map(i, j));
        ++off;
      }
    }
  }
  s.paired_mean /= static_cast<double>(m);
  s.paired_standard_error = std::sqrt(var) / static_cast<double>(m);
  if (off > 0) {
    s.unpaired_mean /= off;
    s.unpaired_abs_mean /= off;
    s.ridge_contrast = s.unpaired_abs_mean > 0.0 ? s.paired_mean / s.unpaired_abs_mean : 0.0;
  }
  double ns = 0.0, nas = 0.0, cells = 0.0;
  for (const auto& f : frames) {
    for (int v : f.stokes) ns += v;
    for (int v : f.anti_stokes) nas += v;
    cells += static_cast<double>(f.stokes.size());
  }
  s.mean_counts_stokes = ns / cells;
  s.mean_counts_anti_stokes = nas / cells;
  return s;
}

}  // namespace rbf
