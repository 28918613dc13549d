#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "rcop/colored.hpp"
#include "rcop/perm.hpp"

namespace rcop {

// One simple component Herm(r; K) of Z_Γ, K = R, C, H for d = 1, 2, 4. In the
// adapted basis the component occupies `r * k` consecutive columns and has the
// real form M_K(x) ⊗ I_{k/d}.
struct BlockSpec {
  int r = 1;
  int d = 1;
  int k = 1;
  int col_begin = 0;

  int width() const { return r * k; }
  int omega_dim() const { return r + d * r * (r - 1) / 2; }
  std::string name() const;  // "Sym(3;R)", "Herm(2;H)", ...

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

struct BlockDecomposition {
  Group group;
  std::string key;
  Matrix U;  // orthogonal, columns grouped by block
  std::vector<BlockSpec> blocks;

  int p() const { return group.p; }
  int dimension() const;        // Σ dim Ω_i = dim Z_Γ
  std::string structure() const;  // "Sym(3;R) ⊕ Herm(1;C) ⊕ Sym(1;R)"
};

/// Sorted (r, d, k) triples with d reset to 1 whenever r = 1, where the field
/// is not determined by Z_Γ.
std::vector<std::tuple<int, int, int>> normalized_signature(const std::vector<BlockSpec>& blocks);

std::vector<BlockSpec> cyclic_structure_constants(const CyclicGroup& c);
BlockDecomposition cyclic_basis(const CyclicGroup& c);

/// Numeric block diagonalization for an arbitrary permutation group.
BlockDecomposition numeric_decompose(const Group& g, std::uint64_t seed = 0);

/// Cyclic closed form when g has at most one generator, numeric otherwise.
BlockDecomposition decompose(const Group& g, std::uint64_t seed = 0);

struct BlockValue {
  std::vector<double> eigenvalues;  // r values, each of real multiplicity k
  double log_det = 0.0;             // log |det φ_i(X)|
  bool positive = false;
};

struct BlockValues {
  std::vector<BlockValue> blocks;

  /// log Det X = Σ k_i log det φ_i(X).
  double log_det(const std::vector<BlockSpec>& specs) const;
  /// Smallest block eigenvalue exceeds rel_tol times the largest.
  bool positive_definite(double rel_tol = 1e-10) const;
};

/// Per-block spectra of X ∈ Z_Γ. Throws Numeric when X is not in Z_Γ or the
/// spectrum does not split into r groups of k equal values.
BlockValues block_values(const BlockDecomposition& dec, const Matrix& X, bool check_membership = true);

/// log φ_Γ(X) = -Σ (dim Ω_i / r_i) log det φ_i(X); requires X ∈ P_Γ.
double log_phi(const BlockDecomposition& dec, const Matrix& X);
double log_phi(const BlockDecomposition& dec, const BlockValues& values);

/// Largest entry of U^T X U outside the diagonal blocks.
double off_block_residual(const BlockDecomposition& dec, const Matrix& X);

/// Largest deviation of a diagonal block of U^T X U from the pattern
/// M_K(x) ⊗ I_{k/d}.
double pattern_residual(const BlockDecomposition& dec, const Matrix& X);

/// Real d×d matrix of a d-component number (M_R, M_C or M_H).
Matrix field_matrix(int d, const double* q);

// Memoizes decompositions by key; concurrent readers, exclusive inserts.
class DecompositionCache {
 public:
  using Ptr = std::shared_ptr<const BlockDecomposition>;

  Ptr get_or_build(const std::string& key, const std::function<BlockDecomposition()>& build);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, Ptr> map_;
};

}  // namespace rcop
