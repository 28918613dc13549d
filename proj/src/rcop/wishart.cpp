#include "rcop/wishart.hpp"

#include <cmath>
#include <numbers>

#include "rcop/conefn.hpp"
#include "rcop/error.hpp"

namespace rcop {

namespace {

void check_eta(const BlockDecomposition& dec, double eta) {
  const double bound = 2.0 * cone_constants(dec.blocks).lambda_min_phi;
  if (!std::isfinite(eta) || !(eta > bound))
    fail(ErrorKind::Domain, "Wishart shape " + std::to_string(eta) + " must exceed " + std::to_string(bound));
}

// log Det, log φ and positivity of an invariant matrix in one pass.
struct Certified {
  double log_det;
  double log_phi;
};

Certified certify(const BlockDecomposition& dec, const Matrix& X, const char* what) {
  const BlockValues v = block_values(dec, X);
  if (!v.positive_definite()) fail(ErrorKind::Domain, std::string(what) + " is not positive definite");
  return {v.log_det(dec.blocks), log_phi(dec, v)};
}

}  // namespace

DataSet DataSet::from_samples(Matrix rows) {
  DataSet d;
  d.n = static_cast<int>(rows.rows());
  d.scatter = rows.transpose() * rows;
  d.samples = std::move(rows);
  return d;
}

DataSet DataSet::from_scatter(Matrix scatter, int n) {
  if (scatter.rows() != scatter.cols()) fail(ErrorKind::InvalidArgument, "scatter matrix must be square");
  if (n < 0) fail(ErrorKind::InvalidArgument, "sample count must be non-negative");
  DataSet d;
  d.scatter = symmetrize(scatter);
  d.n = n;
  return d;
}

Matrix mle(const BlockDecomposition& dec, const DataSet& data) {
  const int n0 = cone_constants(dec.blocks).n0;
  if (data.n < n0)
    fail(ErrorKind::Domain, "MLE does not exist: n = " + std::to_string(data.n) + " < n0 = " + std::to_string(n0));
  const Matrix sigma = project(dec.group, data.scatter) / data.n;
  if (!block_values(dec, sigma).positive_definite())
    fail(ErrorKind::Numeric, "degenerate data: projected scatter matrix is singular");
  return sigma;
}

double log_pdf(const BlockDecomposition& dec, const WishartParams& w, const Matrix& X) {
  check_eta(dec, w.eta);
  const Certified x = certify(dec, X, "X");
  const Certified s = certify(dec, w.Sigma, "Sigma");
  const double trace = w.Sigma.ldlt().solve(X).trace();
  const double log_det_2sigma = s.log_det + dec.p() * std::numbers::ln2;
  return 0.5 * w.eta * x.log_det - 0.5 * trace - 0.5 * w.eta * log_det_2sigma - log_gamma_P(dec, 0.5 * w.eta) +
         x.log_phi;
}

double log_pdf_inverse(const BlockDecomposition& dec, const WishartParams& w, const Matrix& Y) {
  check_eta(dec, w.eta);
  const Certified y = certify(dec, Y, "Y");
  const Certified s = certify(dec, w.Sigma, "Sigma");
  // Tr(Y⁻¹ Σ⁻¹) = Tr((Σ Y)⁻¹)
  const double trace = (w.Sigma * Y).inverse().trace();
  const double log_det_2sigma = s.log_det + dec.p() * std::numbers::ln2;
  return -0.5 * w.eta * y.log_det - 0.5 * trace - 0.5 * w.eta * log_det_2sigma - log_gamma_P(dec, 0.5 * w.eta) +
         y.log_phi;
}

DataSet gaussian_sample(const Matrix& Sigma, int n, Rng& rng) {
  const int p = static_cast<int>(Sigma.rows());
  Eigen::LLT<Matrix> llt(Sigma);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Numeric, "Sigma is not positive definite");
  Matrix z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = rng.normal();
  Matrix rows = z * llt.matrixU();  // each row ~ N(0, LLᵀ)
  return DataSet::from_samples(std::move(rows));
}

Matrix sample_wn(const Group& g, int n, const Matrix& Sigma, Rng& rng) {
  if (n < 0) fail(ErrorKind::InvalidArgument, "sample count must be non-negative");
  if (n == 0) return Matrix::Zero(g.p, g.p);
  return project(g, gaussian_sample(Sigma, n, rng).scatter);
}

Matrix circulant_sigma(int p) {
  if (p < 1) fail(ErrorKind::InvalidArgument, "circulant_sigma: p must be positive");
  Matrix s(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      const int k = std::min((i - j + p) % p, (j - i + p) % p);
      s(i, j) = k == 0 ? 1.0 + 1.0 / p : 1.0 - static_cast<double>(k) / p;
    }
  return s;
}

DataSet frets_fixture() {
  Matrix u(4, 4);
  u << 2287.04, 1268.84, 1671.88, 1106.68,
       1268.84, 1304.64, 1231.48, 841.28,
       1671.88, 1231.48, 2419.36, 1356.96,
       1106.68, 841.28, 1356.96, 1080.56;
  return DataSet::from_scatter(u, 25);
}

}  // namespace rcop
