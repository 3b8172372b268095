#include "rbfilter/zeeman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rbfilter/error.hpp"
#include "rbfilter/wigner.hpp"

namespace rbf {

namespace {

bool is_half_integer(double x) {
  return std::abs(2.0 * x - std::round(2.0 * x)) < 1e-12;
}

std::vector<double> projections(double j) {
  std::vector<double> m;
  for (double x = -j; x <= j + 1e-9; x += 1.0) m.push_back(x);
  return m;
}

// Matrix element <j, m + 1| J_+ |j, m>.
double raising(double j, double m) { return std::sqrt(j * (j + 1.0) - m * (m + 1.0)); }

}  // namespace

std::string_view to_string(Component c) {
  switch (c) {
    case Component::SigmaMinus: return "sigma-";
    case Component::Pi: return "pi";
    case Component::SigmaPlus: return "sigma+";
  }
  return "?";
}

std::string_view to_string(Geometry g) {
  return g == Geometry::Longitudinal ? "longitudinal" : "transverse";
}

Component component_from_string(std::string_view s) {
  if (s == "sigma-") return Component::SigmaMinus;
  if (s == "pi") return Component::Pi;
  if (s == "sigma+") return Component::SigmaPlus;
  throw ConfigError("unknown polarization component '" + std::string(s) + "'");
}

Geometry geometry_from_string(std::string_view s) {
  if (s == "longitudinal") return Geometry::Longitudinal;
  if (s == "transverse") return Geometry::Transverse;
  throw ConfigError("unknown field geometry '" + std::string(s) +
                    "' (expected longitudinal or transverse)");
}

ManifoldHamiltonian build_hamiltonian(const IsotopeSpec& isotope, Manifold manifold,
                                      double b_tesla) {
  if (!(b_tesla >= 0.0) || !std::isfinite(b_tesla))
    throw DomainError("build_hamiltonian: field must be finite and >= 0");
  const double spin = isotope.nuclear_spin;
  if (spin < 0.0 || !is_half_integer(spin))
    throw ConfigError("build_hamiltonian: nuclear spin must be a non-negative half-integer");

  double a_hz = 0.0, g_j = 0.0;
  switch (manifold) {
    case Manifold::Ground:
      a_hz = isotope.a_ground_hz;
      g_j = isotope.g_j_ground;
      break;
    case Manifold::Excited:
      a_hz = isotope.a_excited_hz;
      g_j = isotope.g_j_excited;
      break;
    default:
      throw ConfigError("build_hamiltonian: unknown manifold");
  }

  ManifoldHamiltonian h;
  h.isotope = isotope;
  h.manifold = manifold;
  h.j = 0.5;
  h.b_tesla = b_tesla;

  const auto m_i = projections(spin);
  const auto m_j = projections(h.j);
  for (double mi : m_i)
    for (double mj : m_j) h.basis.push_back({mi, mj});

  const auto n = static_cast<Eigen::Index>(h.basis.size());
  const double zeeman = constants::bohr_magneton_hz * b_tesla;
  h.matrix = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto [mi, mj] = h.basis[a];
    h.matrix(a, a) = a_hz * mi * mj + zeeman * (g_j * mj + isotope.g_i * mi);
    // (A/2)(I+ J- + I- J+): connect |mi, mj> to |mi + 1, mj - 1>.
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto [mi2, mj2] = h.basis[b];
      if (std::abs(mi2 - (mi + 1.0)) < 1e-9 && std::abs(mj2 - (mj - 1.0)) < 1e-9) {
        const double v = 0.5 * a_hz * raising(spin, mi) * raising(h.j, mj - 1.0);
        h.matrix(b, a) = v;
        h.matrix(a, b) = v;
      }
    }
  }
  return h;
}

Eigensystem diagonalize(const ManifoldHamiltonian& h) {
  const auto n = static_cast<Eigen::Index>(h.basis.size());
  const double spin = h.isotope.nuclear_spin;
  const double a_hz =
      h.manifold == Manifold::Ground ? h.isotope.a_ground_hz : h.isotope.a_excited_hz;

  struct State {
    double energy;
    Eigen::VectorXd vector;
    StateLabel label;
  };
  std::vector<State> states;
  states.reserve(n);

  std::vector<double> m_f_values;
  for (const auto& s : h.basis) m_f_values.push_back(s.m_i + s.m_j);
  std::sort(m_f_values.begin(), m_f_values.end());
  m_f_values.erase(std::unique(m_f_values.begin(), m_f_values.end(),
                               [](double x, double y) { return std::abs(x - y) < 1e-9; }),
                   m_f_values.end());

  for (double m_f : m_f_values) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index a = 0; a < n; ++a)
      if (std::abs(h.basis[a].m_i + h.basis[a].m_j - m_f) < 1e-9) idx.push_back(a);
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd block(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) block(r, c) = h.matrix(idx[r], idx[c]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
    if (solver.info() != Eigen::Success)
      throw NumericalError("diagonalize: eigensolver failed");

    // F values reachable in this block; for A > 0 larger F lies higher and
    // levels of equal m_F never cross, so the energy order fixes the label.
    std::vector<double> f_values;
    for (double f = std::abs(spin - h.j); f <= spin + h.j + 1e-9; f += 1.0)
      if (f + 1e-9 >= std::abs(m_f)) f_values.push_back(f);
    if (a_hz < 0.0) std::reverse(f_values.begin(), f_values.end());

    for (Eigen::Index r = 0; r < k; ++r) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      for (Eigen::Index c = 0; c < k; ++c) v(idx[c]) = solver.eigenvectors()(c, r);
      states.push_back({solver.eigenvalues()(r), std::move(v),
                        {f_values[static_cast<std::size_t>(r)], m_f}});
    }
  }

  std::stable_sort(states.begin(), states.end(),
                   [](const State& x, const State& y) { return x.energy < y.energy; });
  Eigensystem out;
  out.energies.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.energies(k) = states[k].energy;
    out.vectors.col(k) = states[k].vector;
    out.labels.push_back(states[k].label);
  }
  return out;
}

double LineTable::total_strength(Component c) const {
  double s = 0.0;
  for (const auto& l : lines)
    if (l.component == c) s += l.strength;
  return s;
}

LineTable eigenlines(const ManifoldHamiltonian& ground, const ManifoldHamiltonian& excited,
                     Geometry geometry) {
  if (ground.manifold != Manifold::Ground || excited.manifold != Manifold::Excited)
    throw ConfigError("eigenlines: expected a ground and an excited manifold");
  if (ground.isotope.name != excited.isotope.name ||
      ground.isotope.nuclear_spin != excited.isotope.nuclear_spin)
    throw ConfigError("eigenlines: manifolds belong to different isotopes");
  if (ground.b_tesla != excited.b_tesla)
    throw ConfigError("eigenlines: manifolds were built at different fields");

  const Eigensystem g = diagonalize(ground);
  const Eigensystem e = diagonalize(excited);
  const auto ng = static_cast<Eigen::Index>(ground.basis.size());
  const auto ne = static_cast<Eigen::Index>(excited.basis.size());
  const double jg = ground.j, je = excited.j;

  LineTable table;
  table.isotope = ground.isotope.name;
  table.b_tesla = ground.b_tesla;
  table.geometry = geometry;

  for (int dm = -1; dm <= 1; ++dm) {
    // Dipole operator in the uncoupled basis, rows excited, columns ground:
    // <J m|d_q|J' m'> = <J||d||J'> (-1)^(J'-1+m) sqrt(2J+1) (J' 1 J; m' q -m),
    // q = m - m' = -dm; the nuclear projection is a spectator.
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ne, ng);
    for (Eigen::Index r = 0; r < ne; ++r) {
      for (Eigen::Index c = 0; c < ng; ++c) {
        const auto& es = excited.basis[r];
        const auto& gs = ground.basis[c];
        if (std::abs(es.m_i - gs.m_i) > 1e-9) continue;
        if (std::abs(es.m_j - gs.m_j - dm) > 1e-9) continue;
        const double q = gs.m_j - es.m_j;
        const double phase = std::fmod(std::abs(je - 1.0 + gs.m_j), 2.0) < 0.5 ? 1.0 : -1.0;
        d(r, c) = phase * std::sqrt(2.0 * jg + 1.0) * wigner3j(je, 1.0, jg, es.m_j, q, -gs.m_j);
      }
    }
    const Eigen::MatrixXd amp = e.vectors.transpose() * d * g.vectors;
    const double norm = 3.0 / static_cast<double>(ng);
    for (Eigen::Index r = 0; r < ne; ++r) {
      for (Eigen::Index c = 0; c < ng; ++c) {
        const double s = amp(r, c) * amp(r, c) * norm;
        if (s < 1e-13) continue;
        table.lines.push_back({(e.energies(r) - g.energies(c)) * 1e-9,
                               static_cast<Component>(dm), s, g.labels[c], e.labels[r]});
      }
    }
  }
  return table;
}

LineTable zeeman_lines(const IsotopeSpec& isotope, double b_tesla, Geometry geometry) {
  const double b = std::abs(b_tesla);
  return eigenlines(build_hamiltonian(isotope, Manifold::Ground, b),
                    build_hamiltonian(isotope, Manifold::Excited, b), geometry);
}

std::vector<int> match_by_overlap(const Eigen::MatrixXd& previous,
                                  const Eigen::MatrixXd& current) {
  if (previous.rows() != current.rows() || previous.cols() != current.cols())
    throw ConfigError("match_by_overlap: eigenvector sets differ in shape");
  const Eigen::MatrixXd overlap = (previous.transpose() * current).cwiseAbs();
  const auto n = overlap.rows();
  std::vector<int> perm(static_cast<std::size_t>(n), -1);
  std::vector<bool> row_used(n, false), col_used(n, false);
  for (Eigen::Index step = 0; step < n; ++step) {
    double best = -1.0;
    Eigen::Index br = 0, bc = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (row_used[r]) continue;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (!col_used[c] && overlap(r, c) > best) {
          best = overlap(r, c);
          br = r;
          bc = c;
        }
      }
    }
    row_used[br] = col_used[bc] = true;
    perm[static_cast<std::size_t>(br)] = static_cast<int>(bc);
  }
  return perm;
}

Eigen::MatrixXd sweep_energies(const IsotopeSpec& isotope, Manifold manifold,
                               const std::vector<double>& b_values) {
  const auto dim = static_cast<Eigen::Index>((2.0 * isotope.nuclear_spin + 1.0) * 2.0 + 0.5);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(b_values.size()), dim);
  Eigen::MatrixXd prev_vectors;
  for (std::size_t k = 0; k < b_values.size(); ++k) {
    const Eigensystem es = diagonalize(build_hamiltonian(isotope, manifold, b_values[k]));
    Eigen::MatrixXd vectors = es.vectors;
    Eigen::VectorXd energies = es.energies;
    if (k > 0) {
      const auto perm = match_by_overlap(prev_vectors, es.vectors);
      for (Eigen::Index c = 0; c < dim; ++c) {
        vectors.col(c) = es.vectors.col(perm[static_cast<std::size_t>(c)]);
        energies(c) = es.energies(perm[static_cast<std::size_t>(c)]);
      }
    }
    out.row(static_cast<Eigen::Index>(k)) = energies.transpose();
    prev_vectors = std::move(vectors);
  }
  return out;
}

}  // namespace rbf
