#include "rbfilter/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "rbfilter/error.hpp"

namespace rbf {

void FomSpec::validate() const {
  std::vector<std::string> issues;
  for (double d : {stokes_ghz, anti_stokes_ghz, write_ghz, read_ghz})
    if (!std::isfinite(d)) issues.push_back("fom: detunings must be finite");
  if (!(min_suppression_db >= 0.0) || !std::isfinite(min_suppression_db))
    issues.push_back("fom: min_suppression_dB must be a finite value >= 0");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

CellConfig FilterHardware::default_absorption_cell() {
  CellConfig c;
  c.name = "absorption";
  c.geometry = Geometry::Transverse;
  c.temperature_k = 373.15;
  c.b_tesla = 1e-2;
  c.fraction_rb85 = 0.99;
  c.fraction_rb87 = 0.01;
  return c;
}

CellConfig FilterHardware::default_faraday_cell() {
  CellConfig c;
  c.name = "faraday";
  c.geometry = Geometry::Longitudinal;
  c.temperature_k = 375.15;
  c.b_tesla = 1e-2;
  c.fraction_rb85 = 0.0;
  c.fraction_rb87 = 1.0;
  return c;
}

FilterChain FilterHardware::default_chain(const CellConfig& absorption, const CellConfig& faraday,
                                          double wollaston_extinction,
                                          double polarizer_extinction) {
  FilterChain chain;
  chain.wollaston_extinction = wollaston_extinction;
  chain.elements = {Polarizer{0.0, 0.0}, AbsorptionCell{absorption},
                    Polarizer{0.0, polarizer_extinction}, RotatorCell{faraday},
                    Polarizer{constants::pi / 2.0, polarizer_extinction}};
  return chain;
}

FilterHardware FilterHardware::defaults() {
  FilterHardware hw;
  hw.chain_template = default_chain(default_absorption_cell(), default_faraday_cell());
  return hw;
}

namespace {

template <class F>
void for_each_cell(FilterChain& chain, F&& f) {
  for (ChainElement& e : chain.elements) {
    if (auto* a = std::get_if<AbsorptionCell>(&e)) f(a->cell);
    else if (auto* r = std::get_if<RotatorCell>(&e)) f(r->cell);
  }
}

}  // namespace

FilterChain FilterHardware::chain(const FilterSettings& s) const {
  FilterChain c = chain_template;
  bool abs_found = false, far_found = false;
  for_each_cell(c, [&](CellConfig& cell) {
    if (cell.name == absorption_cell) {
      cell.temperature_k = s.t_abs_k;
      cell.b_tesla = s.b_abs_t;
      abs_found = true;
    } else if (cell.name == faraday_cell) {
      cell.temperature_k = s.t_far_k;
      cell.b_tesla = s.b_far_t;
      far_found = true;
    }
  });
  if (!abs_found || !far_found)
    throw ConfigError("filter chain needs cells named '" + absorption_cell + "' and '" +
                      faraday_cell + "'");
  return c;
}

FilterSettings FilterHardware::settings() const {
  FilterSettings s;
  FilterChain c = chain_template;
  for_each_cell(c, [&](CellConfig& cell) {
    if (cell.name == absorption_cell) {
      s.t_abs_k = cell.temperature_k;
      s.b_abs_t = cell.b_tesla;
    } else if (cell.name == faraday_cell) {
      s.t_far_k = cell.temperature_k;
      s.b_far_t = cell.b_tesla;
    }
  });
  return s;
}

FigureOfMerit score(const FilterChain& chain, const FomSpec& fom, const FrequencyConvention& conv) {
  fom.validate();
  std::map<double, Eigen::Index> index;
  for (double d : {fom.stokes_ghz, fom.anti_stokes_ghz, fom.write_ghz, fom.read_ghz}) index[d] = 0;
  Eigen::VectorXd grid(static_cast<Eigen::Index>(index.size()));
  Eigen::Index k = 0;
  for (auto& [d, i] : index) {
    grid(k) = d;
    i = k++;
  }
  const TransmissionSpectrum t = cascade(chain, grid, conv);
  const auto at = [&](double d) { return t.transmission(index.at(d)); };

  FigureOfMerit m;
  m.t_stokes = at(fom.stokes_ghz);
  m.t_anti_stokes = at(fom.anti_stokes_ghz);
  m.suppression_write_db = -to_db(chain.wollaston_extinction * at(fom.write_ghz));
  m.suppression_read_db = -to_db(chain.wollaston_extinction * at(fom.read_ghz));
  const double worst = std::min(m.suppression_write_db, m.suppression_read_db);
  m.feasible = worst >= fom.min_suppression_db;
  m.objective = m.feasible ? std::min(m.t_stokes, m.t_anti_stokes)
                           : -(fom.min_suppression_db - worst);
  return m;
}

FigureOfMerit score(const FilterHardware& hw, const FilterSettings& s, const FomSpec& fom) {
  return score(hw.chain(s), fom);
}

ParamBox ParamBox::filter_defaults() {
  const double c0 = constants::zero_celsius;
  ParamBox b;
  b.lower = Eigen::Vector4d(90.0 + c0, 60.0 + c0, 5e-3, 1e-3);
  b.upper = Eigen::Vector4d(120.0 + c0, 120.0 + c0, 2e-2, 2e-2);
  return b;
}

void ParamBox::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw ConfigError("param box: bounds must be nonempty and of equal dimension");
  std::vector<std::string> issues;
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    if (!std::isfinite(lower(k)) || !std::isfinite(upper(k)))
      issues.push_back("param box: dimension " + std::to_string(k) + " has non-finite bounds");
    else if (lower(k) > upper(k))
      issues.push_back("param box: dimension " + std::to_string(k) + " is empty (lower > upper)");
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

bool ParamBox::contains(const Eigen::VectorXd& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

Eigen::VectorXd ParamBox::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

void OptimizerOptions::validate(Eigen::Index dims) const {
  std::vector<std::string> issues;
  if (budget < 100) issues.push_back("optimizer: budget must be >= 100");
  if (restarts < 0) issues.push_back("optimizer: restarts must be >= 0");
  if (static_cast<Eigen::Index>(grid_resolution.size()) != dims)
    issues.push_back("optimizer: grid_resolution needs one entry per parameter (" +
                     std::to_string(dims) + ")");
  for (int r : grid_resolution)
    if (r < 1) issues.push_back("optimizer: grid_resolution entries must be >= 1");
  if (!(x_tolerance > 0.0) || !(f_tolerance >= 0.0))
    issues.push_back("optimizer: tolerances must be positive");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

SimplexResult nelder_mead_minimize(const Objective& f, const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& step, int max_evaluations,
                                   double x_tolerance, double f_tolerance) {
  const Eigen::Index n = start.size();
  SimplexResult res;
  if (n == 0 || max_evaluations < 1) {
    res.x = start;
    res.value = f(start);
    res.evaluations = 1;
    res.converged = true;
    return res;
  }

  int evals = 0;
  const auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), start);
  std::vector<double> vals(static_cast<std::size_t>(n + 1));
  vals[0] = eval(start);
  for (Eigen::Index k = 0; k < n && evals < max_evaluations; ++k) {
    pts[static_cast<std::size_t>(k + 1)](k) += step(k);
    vals[static_cast<std::size_t>(k + 1)] = eval(pts[static_cast<std::size_t>(k + 1)]);
  }
  if (evals < n + 1) {
    const auto best = std::min_element(vals.begin(), vals.begin() + evals) - vals.begin();
    res.x = pts[static_cast<std::size_t>(best)];
    res.value = vals[static_cast<std::size_t>(best)];
    res.evaluations = evals;
    return res;
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(n + 1));
  const auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> p2;
    std::vector<double> v2;
    for (std::size_t i : order) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  const auto spreads = [&] {
    double xs = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      xs = std::max(xs, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
    return std::pair{xs, vals.back() - vals.front()};
  };

  const std::size_t worst = static_cast<std::size_t>(n);
  while (true) {
    sort_simplex();
    const auto [xs, fs] = spreads();
    res.final_f_spread = fs / (std::abs(vals.front()) + 1e-300);
    if (xs <= x_tolerance || fs <= f_tolerance * std::abs(vals.front())) {
      res.converged = true;
      break;
    }
    if (evals >= max_evaluations) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < worst; ++i) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals.front()) {
      if (evals >= max_evaluations) {
        pts[worst] = xr;
        vals[worst] = fr;
        continue;
      }
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[worst - 1]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    if (evals >= max_evaluations) break;
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc = outside ? (centroid + 0.5 * (xr - centroid)).eval()
                                       : (centroid + 0.5 * (pts[worst] - centroid)).eval();
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i < pts.size() && evals < max_evaluations; ++i) {
      pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
      vals[i] = eval(pts[i]);
    }
  }
  sort_simplex();
  res.x = pts.front();
  res.value = vals.front();
  res.evaluations = evals;
  return res;
}

namespace {

struct BudgetExhausted {};

}  // namespace

OptimizeResult maximize(const ParamBox& box, const Objective& f, const OptimizerOptions& opt) {
  box.validate();
  opt.validate(box.dims());
  const auto t0 = std::chrono::steady_clock::now();

  OptimizeResult out;
  const Eigen::Index dims = box.dims();
  std::vector<Eigen::Index> free;
  for (Eigen::Index k = 0; k < dims; ++k)
    if (box.upper(k) > box.lower(k)) free.push_back(k);
  const auto nfree = static_cast<Eigen::Index>(free.size());

  const auto to_box = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd x = box.lower;
    for (Eigen::Index i = 0; i < nfree; ++i) {
      const Eigen::Index k = free[static_cast<std::size_t>(i)];
      const double ui = std::clamp(u(i), 0.0, 1.0);
      x(k) = ui == 1.0 ? box.upper(k) : box.lower(k) + ui * (box.upper(k) - box.lower(k));
    }
    return x;
  };
  const auto evaluate = [&](const Eigen::VectorXd& u, TraceStage stage) {
    if (static_cast<int>(out.trace.size()) >= opt.budget) throw BudgetExhausted{};
    const Eigen::VectorXd x = to_box(u);
    const double v = f(x);
    if (std::isnan(v)) throw NumericalError("optimizer: objective returned NaN");
    out.trace.push_back({x, v, stage});
    return v;
  };

  // Coarse grid over the free dimensions.
  std::vector<int> res;
  long long cells = 1;
  for (Eigen::Index k : free) {
    res.push_back(opt.grid_resolution[static_cast<std::size_t>(k)]);
    cells *= res.back();
  }
  if (cells > opt.budget)
    throw ConfigError("optimizer: grid scan needs " + std::to_string(cells) +
                      " evaluations, more than the budget of " + std::to_string(opt.budget));

  std::vector<std::pair<double, Eigen::VectorXd>> grid;
  std::vector<int> idx(static_cast<std::size_t>(nfree), 0);
  for (long long c = 0; c < cells; ++c) {
    Eigen::VectorXd u(nfree);
    for (Eigen::Index i = 0; i < nfree; ++i) {
      const int r = res[static_cast<std::size_t>(i)];
      u(i) = r == 1 ? 0.5 : static_cast<double>(idx[static_cast<std::size_t>(i)]) / (r - 1);
    }
    grid.emplace_back(evaluate(u, TraceStage::Grid), u);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (++idx[i] < res[i]) break;
      idx[i] = 0;
    }
  }

  if (nfree > 0) {
    Eigen::VectorXd step(nfree);
    for (Eigen::Index i = 0; i < nfree; ++i) {
      const int r = res[static_cast<std::size_t>(i)];
      step(i) = r == 1 ? 0.25 : 0.5 / (r - 1);
    }
    const auto best_grid = std::max_element(
        grid.begin(), grid.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Eigen::VectorXd start = best_grid->second;
    std::mt19937_64 rng(opt.seed);
    std::bernoulli_distribution flip(0.5);

    const Objective neg = [&](const Eigen::VectorXd& u) {
      return -evaluate(u.cwiseMax(0.0).cwiseMin(1.0), TraceStage::Simplex);
    };
    try {
      for (int run = 0; run <= opt.restarts; ++run) {
        const int left = opt.budget - static_cast<int>(out.trace.size());
        if (left <= 0) break;
        const int share = left / (opt.restarts + 1 - run);
        Eigen::VectorXd s = step;
        if (run > 0)
          for (Eigen::Index i = 0; i < nfree; ++i)
            if (flip(rng)) s(i) = -s(i);
        // Point the initial simplex into the box when starting on a face.
        for (Eigen::Index i = 0; i < nfree; ++i)
          if (start(i) + s(i) > 1.0 || start(i) + s(i) < 0.0) s(i) = -s(i);
        const SimplexResult r =
            nelder_mead_minimize(neg, start, s, share, opt.x_tolerance, opt.f_tolerance);
        start = r.x.cwiseMax(0.0).cwiseMin(1.0);
      }
    } catch (const BudgetExhausted&) {
    }
  }

  const auto best = std::max_element(out.trace.begin(), out.trace.end(),
                                     [](const auto& a, const auto& b) { return a.value < b.value; });
  out.best = best->x;
  out.best_value = best->value;
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

OptimizeResult optimize_filters(const FilterHardware& hw, const ParamBox& box, const FomSpec& fom,
                                const OptimizerOptions& opt) {
  if (box.dims() != 4) throw ConfigError("optimize: the filter box has four parameters");
  fom.validate();
  return maximize(
      box,
      [&](const Eigen::VectorXd& x) {
        return score(hw, FilterSettings::from_vector(x), fom).objective;
      },
      opt);
}

}  // namespace rbf
