#pragma once

// Hyperfine + Zeeman structure of the 5S1/2 and 5P1/2 manifolds.
//
//   H = A (I . J) + mu_B B (g_J J_z + g_I I_z)
//
// in the uncoupled basis |m_I, m_J>, energies in Hz (E/h), quantization
// axis along B. Both D1 manifolds have J = 1/2, so there is no electric
// quadrupole term. The matrix is real symmetric and commutes with F_z, so it
// is diagonalized block by block in m_F; every eigenstate carries a definite
// m_F and a low-field F label.

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rbfilter/atomic_data.hpp"

namespace rbf {

enum class Manifold { Ground, Excited };
enum class Component { SigmaMinus = -1, Pi = 0, SigmaPlus = 1 };
enum class Geometry { Longitudinal, Transverse };

std::string_view to_string(Component c);
std::string_view to_string(Geometry g);
Component component_from_string(std::string_view s);
Geometry geometry_from_string(std::string_view s);

struct BasisState {
  double m_i;
  double m_j;
};

struct ManifoldHamiltonian {
  IsotopeSpec isotope;
  Manifold manifold = Manifold::Ground;
  double j = 0.5;
  double b_tesla = 0.0;
  std::vector<BasisState> basis;
  Eigen::MatrixXd matrix;  // Hz
};

ManifoldHamiltonian build_hamiltonian(const IsotopeSpec& isotope, Manifold manifold,
                                      double b_tesla);

struct StateLabel {
  double f;    // adiabatically connected zero-field F
  double m_f;
};

/// Eigen-decomposition with energies in ascending order. Column k of
/// `vectors` is the eigenvector in the uncoupled basis.
struct Eigensystem {
  Eigen::VectorXd energies;  // Hz
  Eigen::MatrixXd vectors;
  std::vector<StateLabel> labels;
};

Eigensystem diagonalize(const ManifoldHamiltonian& h);

struct Line {
  double offset_ghz;  // from the isotope's D1 centroid
  Component component;
  double strength;    // per-component strengths of one isotope sum to 1
  StateLabel ground;
  StateLabel excited;
};

struct LineTable {
  Isotope isotope = Isotope::Rb87;
  double b_tesla = 0.0;
  Geometry geometry = Geometry::Longitudinal;
  std::vector<Line> lines;

  double total_strength(Component c) const;
};

/// All electric-dipole lines between the eigenstates of a ground and an
/// excited manifold, with strengths |<e|d_q|g>|^2 averaged over an equally
/// populated ground manifold and normalized by |<J||d||J'>|^2 / 3.
LineTable eigenlines(const ManifoldHamiltonian& ground, const ManifoldHamiltonian& excited,
                     Geometry geometry = Geometry::Longitudinal);

/// Convenience: build both manifolds at field |B| and return the lines.
LineTable zeeman_lines(const IsotopeSpec& isotope, double b_tesla,
                       Geometry geometry = Geometry::Longitudinal);

/// Permutation p such that current column p[k] continues previous column k,
/// chosen greedily by maximal |overlap|.
std::vector<int> match_by_overlap(const Eigen::MatrixXd& previous,
                                  const Eigen::MatrixXd& current);

/// Energies (rows: field values, columns: states) of one manifold over a
/// field sweep, with columns kept continuous by overlap matching.
Eigen::MatrixXd sweep_energies(const IsotopeSpec& isotope, Manifold manifold,
                               const std::vector<double>& b_values);

}  // namespace rbf
