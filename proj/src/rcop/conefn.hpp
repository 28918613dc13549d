#pragma once

#include <vector>

#include "rcop/decomp.hpp"

namespace rcop {

struct Hyperparams {
  double delta = 3.0;
  Matrix D;
};

struct ConeConstants {
  double A = 0.0;
  double B = 0.0;
  int n0 = 1;
  double lambda_min_phi = 0.0;    // log_gamma_P needs lambda above this
  double lambda_min_nophi = 0.0;  // same integral without the φ_Γ weight
};

/// log of the gamma function of the cone Sym+(r; K), dim K = d.
double log_gamma_omega(int r, int d, double lambda);

ConeConstants cone_constants(const std::vector<BlockSpec>& blocks);

/// log ∫_{P_Γ} Det(X)^λ e^{-Tr X} φ_Γ(X) dX.
double log_gamma_P(const BlockDecomposition& dec, double lambda);

/// Smallest admissible prior shape: delta must exceed 2 max(1 - 1/k).
double delta_lower_bound(const std::vector<BlockSpec>& blocks);

/// log ∫_{P_Γ} Det(K)^{(δ-2)/2} e^{-Tr(K D)/2} dK.
double log_I(const BlockDecomposition& dec, const Hyperparams& h);
double log_I(const BlockDecomposition& dec, double delta, const BlockValues& d_values);

/// log ∫_{P_Γ} Π det φ_i(X)^{λ_i} e^{-Tr(XY)} dX, one exponent per block, each > -1.
double log_integral_general(const BlockDecomposition& dec, const std::vector<double>& lambdas,
                            const Matrix& Y);

}  // namespace rcop
