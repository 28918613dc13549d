#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "quadrature.hpp"
#include "rcop/conefn.hpp"
#include "rcop/error.hpp"
#include "rcop/wishart.hpp"

using namespace rcop;

namespace {

const char* const kS3 = "(1,2,3),(1,2)";

Matrix s3_member(double a, double b) {
  Matrix x = Matrix::Constant(3, 3, b);
  x.diagonal().setConstant(a);
  return x;
}

// Orthonormal basis of Z_Γ in the trace inner product.
std::vector<Matrix> orthonormal_basis(const Group& g) {
  auto b = basis(coloring(g));
  for (auto& e : b) e /= e.norm();
  return b;
}

// |det| of the differential of X -> X⁻¹ on Z_Γ by central differences.
double inversion_jacobian_fd(const Group& g, const Matrix& x, double h = 1e-5) {
  const auto b = orthonormal_basis(g);
  const int m = static_cast<int>(b.size());
  Matrix J(m, m);
  for (int l = 0; l < m; ++l) {
    const Matrix d = ((x + h * b[l]).inverse() - (x - h * b[l]).inverse()) / (2 * h);
    for (int k = 0; k < m; ++k) J(k, l) = (b[k].cwiseProduct(d)).sum();
  }
  return std::abs(J.determinant());
}

Matrix random_pd_member(const Group& g, Rng& rng) {
  Matrix a(g.p, g.p);
  for (int i = 0; i < g.p; ++i)
    for (int j = 0; j < g.p; ++j) a(i, j) = rng.normal();
  return project(g, a * a.transpose() / g.p + 0.5 * Matrix::Identity(g.p, g.p));
}

// Classical Wishart log density w.r.t. Lebesgue measure on the entries x_ij, i <= j.
double classical_wishart(const Matrix& x, double n, const Matrix& sigma) {
  const int p = static_cast<int>(x.rows());
  double mgamma = 0.25 * p * (p - 1) * std::log(std::numbers::pi);
  for (int j = 0; j < p; ++j) mgamma += std::lgamma(0.5 * n - 0.5 * j);
  return 0.5 * (n - p - 1) * std::log(x.determinant()) - 0.5 * (sigma.inverse() * x).trace() -
         0.5 * n * p * std::numbers::ln2 - 0.5 * n * std::log(sigma.determinant()) - mgamma;
}

}  // namespace

TEST_CASE("maximum likelihood estimate") {
  const DataSet frets = frets_fixture();
  const auto trivial = decompose(Group::trivial(4));
  CHECK((mle(trivial, frets) - frets.scatter / 25.0).cwiseAbs().maxCoeff() < 1e-12);

  const auto g13 = decompose(Group::parse("(1,3)(2,4)", 4));
  const Matrix s = mle(g13, frets);
  CHECK(s(0, 0) == doctest::Approx((2287.04 + 2419.36) / 2 / 25));
  CHECK(s(2, 2) == doctest::Approx((2287.04 + 2419.36) / 2 / 25));
  CHECK(s(1, 1) == doctest::Approx((1304.64 + 1080.56) / 2 / 25));
  CHECK(s(0, 1) == doctest::Approx((1268.84 + 1356.96) / 2 / 25));
  CHECK(s(0, 3) == doctest::Approx((1106.68 + 1231.48) / 2 / 25));
  CHECK(s(0, 2) == doctest::Approx(1671.88 / 25));
  CHECK(is_member(g13.group, s));
}

TEST_CASE("MLE needs n >= n0") {
  auto rng = Rng::stream(41, "wishart-test");
  const DataSet two = gaussian_sample(Matrix::Identity(3, 3), 2, rng);
  try {
    (void)mle(decompose(Group::trivial(3)), two);
    FAIL("MLE below n0");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  // S_3 has n0 = 1, so a single observation suffices
  const DataSet one = gaussian_sample(Matrix::Identity(3, 3), 1, rng);
  CHECK(block_values(decompose(Group::parse(kS3, 3)), mle(decompose(Group::parse(kS3, 3)), one)).positive_definite());
}

TEST_CASE("MLE is a stationary point of the restricted likelihood") {
  auto rng = Rng::stream(42, "wishart-test");
  const Group g = Group::parse("(1,2,3)(4,5)", 6);
  const auto dec = decompose(g);
  const DataSet data = gaussian_sample(random_pd_member(g, rng), 40, rng);
  const Matrix s = mle(dec, data);
  auto loglik = [&](const Matrix& sig) {
    return -0.5 * data.n * std::log(sig.determinant()) - 0.5 * sig.ldlt().solve(data.scatter).trace();
  };
  const double h = 1e-6 * s.norm();
  for (const auto& e : orthonormal_basis(g)) {
    const double grad = (loglik(s + h * e) - loglik(s - h * e)) / (2 * h);
    CHECK(std::abs(grad) * s.norm() / data.n < 1e-6);
  }
}

TEST_CASE("trivial group gives the classical Wishart density") {
  auto rng = Rng::stream(43, "wishart-test");
  for (int p : {1, 2, 4}) {
    const Group g = Group::trivial(p);
    const auto dec = decompose(g);
    const Matrix sigma = random_pd_member(g, rng), x = random_pd_member(g, rng);
    const double eta = p + 1.5;
    // The trace measure carries an extra factor 2^{p(p-1)/4} over dx_ij.
    CHECK(log_pdf(dec, WishartParams{eta, sigma}, x) ==
          doctest::Approx(classical_wishart(x, eta, sigma) - 0.25 * p * (p - 1) * std::numbers::ln2).epsilon(1e-12));
  }
}

TEST_CASE("S3 density integrates to one") {
  const auto dec = decompose(Group::parse(kS3, 3));
  for (auto [eta, a, b] : {std::tuple{3.0, 1.0, 0.2}, std::tuple{2.2, 2.0, -0.5}, std::tuple{8.0, 0.7, 0.3}}) {
    const WishartParams w{eta, s3_member(a, b)};
    // Points within rounding of the boundary carry negligible mass.
    const double total = oracle::integrate_s3([&](double, double, double l1, double l2) {
      const Matrix ones = Matrix::Constant(3, 3, 1.0 / 3.0);
      const Matrix x = l1 * ones + l2 * (Matrix::Identity(3, 3) - ones);
      try {
        return std::exp(log_pdf(dec, w, x));
      } catch (const Error&) {
        return 0.0;
      }
    }, 1e-10);
    CAPTURE(eta);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("density mode solves the blockwise stationarity equation") {
  // Stationarity on block i: X_i = (η - 2 dim Ω_i / (r_i k_i)) Σ_i.
  auto rng = Rng::stream(44, "wishart-test");
  const Group g = Group::parse("(1,2,3)(4,5)", 6);
  const auto dec = decompose(g);
  const Matrix sigma = random_pd_member(g, rng);
  const double eta = 9.0;
  Matrix mode = Matrix::Zero(6, 6);
  for (const auto& b : dec.blocks) {
    const Matrix P = dec.U.middleCols(b.col_begin, b.width());
    const double c = eta - 2.0 * b.omega_dim() / (b.r * b.k);
    mode += c * P * (P.transpose() * sigma * P) * P.transpose();
  }
  REQUIRE(is_member(g, mode, 1e-10));
  const WishartParams w{eta, sigma};
  const double top = log_pdf(dec, w, mode);
  const double h = 1e-4;
  for (const auto& e : orthonormal_basis(g)) {
    const double up = log_pdf(dec, w, mode + h * e), down = log_pdf(dec, w, mode - h * e);
    CHECK(std::abs(up - down) / (2 * h) < 1e-6);
    CHECK(up < top);
    CHECK(down < top);
  }
}

TEST_CASE("inversion Jacobian equals phi squared") {
  auto rng = Rng::stream(45, "wishart-test");
  for (auto [gens, p] : {std::pair{kS3, 3}, std::pair{"(1,2,3,4)", 4}, std::pair{"", 3}, std::pair{"(1,2),(3,4)", 4},
                         std::pair{"(1,2,3,4),(1,3)", 4}}) {
    const Group g = Group::parse(gens, p);
    const auto dec = decompose(g, 6);
    for (int trial = 0; trial < 3; ++trial) {
      const Matrix y = random_pd_member(g, rng);
      const double fd = inversion_jacobian_fd(g, y);
      CAPTURE(gens);
      CHECK(std::log(fd) == doctest::Approx(2 * log_phi(dec, y)).epsilon(1e-6).scale(1.0));
      CHECK(2 * log_phi(dec, y) == doctest::Approx(-2 * log_phi(dec, Matrix(y.inverse()))).epsilon(1e-10));
    }
  }
}

TEST_CASE("inverse law is the change of variables of the Wishart law") {
  auto rng = Rng::stream(46, "wishart-test");
  const Group g = Group::parse("(1,2,3,4)", 4);
  const auto dec = decompose(g);
  const WishartParams w{6.5, random_pd_member(g, rng)};
  const Matrix y = random_pd_member(g, rng);
  const double via_jacobian = log_pdf(dec, w, y.inverse()) + std::log(inversion_jacobian_fd(g, y));
  CHECK(log_pdf_inverse(dec, w, y) == doctest::Approx(via_jacobian).epsilon(1e-6));
}

TEST_CASE("trivial inverse law is the classical inverse Wishart") {
  auto rng = Rng::stream(47, "wishart-test");
  const Group g = Group::trivial(3);
  const auto dec = decompose(g);
  const Matrix sigma = random_pd_member(g, rng), y = random_pd_member(g, rng);
  const double eta = 7.0;
  // classical: density of Y = W⁻¹ is f_W(Y⁻¹) Det(Y)^{-(p+1)} on dx_ij
  const double classical = classical_wishart(y.inverse(), eta, sigma) - 4.0 * std::log(y.determinant());
  CHECK(log_pdf_inverse(dec, WishartParams{eta, sigma}, y) ==
        doctest::Approx(classical - 1.5 * std::numbers::ln2).epsilon(1e-12));
}

TEST_CASE("scalar inverse law matches simulated reciprocals (Kolmogorov-Smirnov)") {
  const Group g = Group::trivial(1);
  const auto dec = decompose(g);
  const double sigma2 = 1.3;
  const int n = 5, draws = 10000;
  Matrix sig(1, 1);
  sig << sigma2;
  auto rng = Rng::stream(48, "wishart-test");
  std::vector<double> ys;
  for (int i = 0; i < draws; ++i) ys.push_back(1.0 / sample_wn(g, n, sig, rng)(0, 0));
  std::sort(ys.begin(), ys.end());
  const WishartParams w{static_cast<double>(n), sig};
  auto density = [&](double y) {
    Matrix m(1, 1);
    m << y;
    return std::exp(log_pdf_inverse(dec, w, m));
  };
  boost::math::quadrature::tanh_sinh<double> q;
  double ks = 0.0, cdf = 0.0, prev = 0.0;
  for (int i = 0; i < draws; ++i) {
    if (ys[i] > prev) cdf += q.integrate(density, prev, ys[i]);
    prev = ys[i];
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / draws), std::abs(cdf - static_cast<double>(i + 1) / draws)});
  }
  CHECK(ks < 1.628 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("sampling the projected scatter matrix") {
  const Group g = Group::parse(kS3, 3);
  const Matrix sigma = s3_member(1.0, 0.3);
  auto rng = Rng::stream(49, "wishart-test");
  CHECK(sample_wn(g, 0, sigma, rng).norm() == 0.0);
  const int n = 5, draws = 10000;
  Matrix sum = Matrix::Zero(3, 3), sumsq = Matrix::Zero(3, 3);
  for (int i = 0; i < draws; ++i) {
    const Matrix w = sample_wn(g, n, sigma, rng);
    CHECK((project(g, w) - w).cwiseAbs().maxCoeff() < 1e-12);
    sum += w;
    sumsq += w.cwiseProduct(w);
  }
  const Matrix mean = sum / draws;
  const Matrix se = ((sumsq / draws - mean.cwiseProduct(mean)) / draws).cwiseSqrt();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(mean(i, j) - n * sigma(i, j)) < 3 * se(i, j) + 1e-12);
}

TEST_CASE("below n0 the projected scatter matrix is singular") {
  auto rng = Rng::stream(50, "wishart-test");
  const Group g = Group::parse("(1,2)", 4);  // n0 = 3
  const auto dec = decompose(g);
  REQUIRE(cone_constants(dec.blocks).n0 == 3);
  const Matrix w = sample_wn(g, 2, Matrix::Identity(4, 4), rng);
  const auto v = block_values(dec, w);
  double lo = 1e300, hi = 0.0;
  for (const auto& b : v.blocks)
    for (double e : b.eigenvalues) {
      lo = std::min(lo, std::abs(e));
      hi = std::max(hi, std::abs(e));
    }
  CHECK(lo < 1e-12 * hi);
}

TEST_CASE("Gaussian samples") {
  auto a = Rng::stream(51, "wishart-test"), b = Rng::stream(51, "wishart-test");
  const Matrix sigma = circulant_sigma(5);
  const DataSet x = gaussian_sample(sigma, 50, a), y = gaussian_sample(sigma, 50, b);
  CHECK(x.samples == y.samples);
  CHECK(x.scatter == y.scatter);
  const DataSet one = gaussian_sample(sigma, 1, a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(one.scatter);
  CHECK(es.eigenvalues()(3) < 1e-12 * es.eigenvalues()(4));
  CHECK(es.eigenvalues()(0) > -1e-12 * es.eigenvalues()(4));
  const int n = 20000;
  const DataSet big = gaussian_sample(Matrix::Identity(4, 4), n, a);
  const double dev = (big.scatter / n - Matrix::Identity(4, 4)).operatorNorm();
  CHECK(dev < 5 * std::sqrt(4.0 / n));
  CHECK_THROWS_AS(gaussian_sample(-Matrix::Identity(2, 2), 3, a), Error);
}

TEST_CASE("circulant covariance") {
  const Matrix s = circulant_sigma(4);
  CHECK(s(0, 0) == 1.25);
  CHECK(s(0, 1) == 0.75);
  CHECK(s(0, 2) == 0.5);
  CHECK(s(0, 3) == 0.75);
  for (int p = 2; p <= 100; ++p) {
    std::string cycle = "(";
    for (int i = 1; i <= p; ++i) cycle += std::to_string(i) + (i < p ? "," : ")");
    const Group g = Group::parse(cycle, p);
    const Matrix c = circulant_sigma(p);
    CAPTURE(p);
    CHECK(is_member(g, c));
    CHECK(block_values(decompose(g), c).positive_definite());
  }
}
