#include "rcop/conefn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rcop/error.hpp"

namespace rcop {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorKind::Domain, std::string(what) + " must be finite");
}

}  // namespace

double log_gamma_omega(int r, int d, double lambda) {
  require_finite(lambda, "lambda");
  if (r < 1 || (d != 1 && d != 2 && d != 4)) fail(ErrorKind::InvalidArgument, "log_gamma_omega: bad (r, d)");
  const double bound = 0.5 * (r - 1) * d;
  if (!(lambda > bound))
    fail(ErrorKind::Domain, "cone gamma integral diverges: lambda = " + std::to_string(lambda) +
                                " must exceed " + std::to_string(bound));
  const double dim = r + 0.5 * d * r * (r - 1);
  double out = 0.5 * (dim - r) * std::log(2.0 * std::numbers::pi);
  for (int j = 0; j < r; ++j) out += std::lgamma(lambda - 0.5 * j * d);
  return out;
}

ConeConstants cone_constants(const std::vector<BlockSpec>& blocks) {
  ConeConstants c;
  c.n0 = 0;
  for (const auto& b : blocks) {
    const double lk = std::log(static_cast<double>(b.k));
    c.A += b.r * b.k * lk;
    c.B += 0.5 * b.omega_dim() * lk;
    c.n0 = std::max(c.n0, (b.r * b.d + b.k - 1) / b.k);
    c.lambda_min_phi = std::max(c.lambda_min_phi, 0.5 * (b.r - 1) * b.d / b.k);
    c.lambda_min_nophi =
        std::max(c.lambda_min_nophi, (0.5 * (b.r - 1) * b.d - static_cast<double>(b.omega_dim()) / b.r) / b.k);
  }
  c.n0 = std::max(c.n0, 1);
  return c;
}

double log_gamma_P(const BlockDecomposition& dec, double lambda) {
  require_finite(lambda, "lambda");
  const ConeConstants c = cone_constants(dec.blocks);
  if (!(lambda > c.lambda_min_phi))
    fail(ErrorKind::Domain, "Gamma integral over P_Γ diverges: lambda = " + std::to_string(lambda) +
                                " must exceed " + std::to_string(c.lambda_min_phi));
  double out = -c.A * lambda + c.B;
  for (const auto& b : dec.blocks) out += log_gamma_omega(b.r, b.d, b.k * lambda);
  return out;
}

double delta_lower_bound(const std::vector<BlockSpec>& blocks) {
  double bound = 0.0;
  for (const auto& b : blocks) bound = std::max(bound, 2.0 * (1.0 - 1.0 / b.k));
  return bound;
}

double log_I(const BlockDecomposition& dec, double delta, const BlockValues& d_values) {
  require_finite(delta, "delta");
  const double bound = delta_lower_bound(dec.blocks);
  if (!(delta > bound))
    fail(ErrorKind::Domain, "prior does not normalize: delta = " + std::to_string(delta) +
                                " must exceed " + std::to_string(bound));
  if (!d_values.positive_definite()) fail(ErrorKind::Domain, "D is not positive definite");
  // The integrand's exponent is Tr(K D)/2; absorbing the 1/2 into D gives the
  // exact normalizer, log det φ_i(D/2) = log det φ_i(D) - r_i log 2.
  const ConeConstants c = cone_constants(dec.blocks);
  const double half = 0.5 * (delta - 2.0);
  double out = -c.A * half - c.B;
  for (std::size_t i = 0; i < dec.blocks.size(); ++i) {
    const auto& b = dec.blocks[i];
    const double shape = b.k * half + static_cast<double>(b.omega_dim()) / b.r;
    const double log_det_half = d_values.blocks[i].log_det - b.r * std::numbers::ln2;
    out += log_gamma_omega(b.r, b.d, shape) - shape * log_det_half;
  }
  return out;
}

double log_I(const BlockDecomposition& dec, const Hyperparams& h) {
  return log_I(dec, h.delta, block_values(dec, h.D));
}

double log_integral_general(const BlockDecomposition& dec, const std::vector<double>& lambdas,
                            const Matrix& Y) {
  if (lambdas.size() != dec.blocks.size())
    fail(ErrorKind::InvalidArgument, "log_integral_general: one exponent per block required");
  const BlockValues yv = block_values(dec, Y);
  if (!yv.positive_definite()) fail(ErrorKind::Domain, "Y is not positive definite");
  const ConeConstants c = cone_constants(dec.blocks);
  double out = -c.B;
  for (std::size_t i = 0; i < dec.blocks.size(); ++i) {
    const auto& b = dec.blocks[i];
    const double lam = lambdas[i];
    require_finite(lam, "lambda_i");
    if (!(lam > -1.0)) fail(ErrorKind::Domain, "block exponent must exceed -1");
    const double shape = lam + static_cast<double>(b.omega_dim()) / b.r;
    out += -b.r * lam * std::log(static_cast<double>(b.k)) + log_gamma_omega(b.r, b.d, shape) -
           shape * yv.blocks[i].log_det;
  }
  return out;
}

}  // namespace rcop
