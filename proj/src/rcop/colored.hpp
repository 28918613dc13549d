#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rcop/perm.hpp"

namespace rcop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Orbit classes of a group acting on vertices {0..p-1} and on unordered pairs
// {i,j}, i != j. Z_Γ is spanned by one indicator matrix per class.
struct Coloring {
  int p = 0;
  std::vector<int> vertex_class;  // size p
  std::vector<int> edge_class;    // size p(p-1)/2, indexed by pair_index(i, j)
  int vertex_class_count = 0;
  int edge_class_count = 0;

  int dimension() const { return vertex_class_count + edge_class_count; }

  /// Row-major index of the pair i < j.
  static std::size_t pair_index(int p, int i, int j);

  /// Class id of every cell: vertex classes first, edge classes offset by
  /// vertex_class_count. Suitable for heat-map rendering.
  Eigen::MatrixXi class_grid() const;

  friend bool operator==(const Coloring&, const Coloring&) = default;
};

Coloring coloring(const Group& g);

/// Orthogonal projection onto Z_Γ, computed by averaging entries over orbit
/// classes.
Matrix project(const Coloring& c, const Matrix& x);
inline Matrix project(const Group& g, const Matrix& x) { return project(coloring(g), x); }

/// One 0/1 indicator per class, vertex classes first.
std::vector<Matrix> basis(const Coloring& c);

/// True iff R(σ) x R(σ)^T = x for every generator, entrywise within
/// tol * max|x|.
bool is_member(const Group& g, const Matrix& x, double tol = 1e-10);

/// R(σ) = Σ_i E_{σ(i), i}.
Matrix permutation_matrix(const Permutation& s);

/// (x + x^T) / 2.
Matrix symmetrize(const Matrix& x);

}  // namespace rcop
