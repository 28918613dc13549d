#pragma once

#include <cstdint>
#include <string>

#include "rcop/decomp.hpp"
#include "rcop/rng.hpp"

namespace rcop {

// Observations as rows plus their scatter matrix Σ z zᵀ. `samples` may be empty
// when only the scatter matrix is known.
struct DataSet {
  Matrix samples;
  Matrix scatter;
  int n = 0;

  int p() const { return static_cast<int>(scatter.rows()); }
  static DataSet from_samples(Matrix rows);
  static DataSet from_scatter(Matrix scatter, int n);
};

struct WishartParams {
  double eta = 0.0;
  Matrix Sigma;
};

/// π_Γ(U) / n. Requires n >= n₀ and a positive definite result.
Matrix mle(const BlockDecomposition& dec, const DataSet& data);

double log_pdf(const BlockDecomposition& dec, const WishartParams& w, const Matrix& X);

/// Density of Y = W⁻¹ for W ~ W^Γ_{η,Σ}.
double log_pdf_inverse(const BlockDecomposition& dec, const WishartParams& w, const Matrix& Y);

/// π_Γ of the scatter matrix of n draws from N_p(0, Σ).
Matrix sample_wn(const Group& g, int n, const Matrix& Sigma, Rng& rng);

DataSet gaussian_sample(const Matrix& Sigma, int n, Rng& rng);

/// Symmetric circulant with c_0 = 1 + 1/p and c_k = 1 - k/p, k <= p/2.
Matrix circulant_sigma(int p);

/// Frets' head measurements: scatter matrix of 25 observations, variables L1, B1, L2, B2.
DataSet frets_fixture();

}  // namespace rcop
