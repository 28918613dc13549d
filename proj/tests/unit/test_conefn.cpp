#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "quadrature.hpp"
#include "rcop/conefn.hpp"
#include "rcop/error.hpp"
#include "rcop/rng.hpp"

using namespace rcop;

namespace {

const double kLn2 = std::numbers::ln2;
const double kLog2Pi = std::log(2 * std::numbers::pi);

BlockDecomposition s3() { return decompose(Group::parse("(1,2,3),(1,2)", 3), 1); }

// Classical multivariate gamma, Lebesgue measure on the p(p+1)/2 entries.
double classical_log_multigamma(int p, double a) {
  double out = 0.25 * p * (p - 1) * std::log(std::numbers::pi);
  for (int j = 0; j < p; ++j) out += std::lgamma(a - 0.5 * j);
  return out;
}

template <class F>
void expect_domain_error(F&& f) {
  try {
    f();
    FAIL("no domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

}  // namespace

TEST_CASE("gamma of the symmetric cones") {
  CHECK(log_gamma_omega(1, 1, 1.0) == 0.0);
  CHECK(log_gamma_omega(1, 4, 1.0) == 0.0);
  CHECK(log_gamma_omega(2, 1, 2.0) == doctest::Approx(0.5 * kLog2Pi + std::log(std::sqrt(std::numbers::pi) / 2)));
  CHECK(log_gamma_omega(2, 2, 3.0) == doctest::Approx(kLog2Pi + std::lgamma(3.0) + std::lgamma(2.0)));
  // r = 2, d = 4: dim Ω = 6, Γ(λ)Γ(λ - 2)
  CHECK(log_gamma_omega(2, 4, 3.5) == doctest::Approx(2 * kLog2Pi + std::lgamma(3.5) + std::lgamma(1.5)));
}

TEST_CASE("gamma of Sym+(2) against a three-dimensional quadrature") {
  // ∫ Det(X)^{λ-3/2} e^{-Tr X} dX with dX = √2 dx11 dx22 dx12
  const double lambda = 2.0;
  boost::math::quadrature::tanh_sinh<double> inner;
  boost::math::quadrature::exp_sinh<double> half;
  const double value = std::sqrt(2.0) * half.integrate([&](double x) {
    if (!(x > 0)) return 0.0;
    return half.integrate([&](double y) {
      if (!(y > 0)) return 0.0;
      const double r = std::sqrt(x * y);
      return inner.integrate([&](double z) {
        const double det = std::max(x * y - z * z, 0.0);
        return std::pow(det, lambda - 1.5) * std::exp(-x - y);
      }, -r, r, 1e-12);
    }, 1e-11);
  }, 1e-11);
  CHECK(log_gamma_omega(2, 1, lambda) == doctest::Approx(std::log(value)).epsilon(1e-8));
}

TEST_CASE("domain of the cone gamma is strict") {
  expect_domain_error([] { (void)log_gamma_omega(3, 2, 2.0); });  // boundary (r-1)d/2 = 2
  CHECK(std::isfinite(log_gamma_omega(3, 2, 2.0 + 1e-9)));
  expect_domain_error([] { (void)log_gamma_omega(1, 1, 0.0); });
  expect_domain_error([] { (void)log_gamma_omega(1, 1, std::nan("")); });
}

TEST_CASE("cone constants") {
  const auto c = cone_constants(s3().blocks);
  CHECK(c.A == doctest::Approx(2 * kLn2));
  CHECK(c.B == doctest::Approx(0.5 * kLn2));
  CHECK(c.n0 == 1);
  for (int p : {1, 4, 9}) {
    const auto t = cone_constants(decompose(Group::trivial(p)).blocks);
    CHECK(t.A == 0.0);
    CHECK(t.B == 0.0);
    CHECK(t.n0 == p);
  }
  const auto ex = decompose(
      Group::parse("(1,2,5,6)(3,4,7,8)(9,10,13,14)(11,12,15,16),(1,3,5,7)(2,8,6,4)(9,11,13,15)(10,16,14,12)", 16), 1);
  CHECK(cone_constants(ex.blocks).n0 == 2);
}

TEST_CASE("trivial group gives the multivariate gamma") {
  // The trace measure differs from the entrywise Lebesgue measure by 2^{p(p-1)/4}.
  for (int p : {1, 2, 5}) {
    const auto dec = decompose(Group::trivial(p));
    for (double lambda : {0.5 * p + 0.1, 3.0, 17.25}) {
      CAPTURE(p);
      CAPTURE(lambda);
      const double expected = classical_log_multigamma(p, lambda) + 0.25 * p * (p - 1) * kLn2;
      CHECK(log_gamma_P(dec, lambda) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  CHECK(log_gamma_P(decompose(Group::trivial(1)), 2.5) == doctest::Approx(std::lgamma(2.5)));
}

TEST_CASE("S3 gamma integral: closed form and quadrature") {
  const auto dec = s3();
  CHECK(log_gamma_P(dec, 1.0) == doctest::Approx(-1.5 * kLn2).epsilon(1e-14));
  for (double lambda : {1.0, 0.6, 2.3}) {
    // eigenvalues a + 2b (once) and a - b (twice); φ = 1 / ((a + 2b)(a - b))
    const double q = oracle::integrate_s3([&](double a, double, double l1, double l2) {
      return std::exp((lambda - 1) * std::log(l1) + (2 * lambda - 1) * std::log(l2) - 3 * a);
    });
    CAPTURE(lambda);
    CHECK(log_gamma_P(dec, lambda) == doctest::Approx(std::log(q)).epsilon(1e-8));
  }
  expect_domain_error([&] { (void)log_gamma_P(dec, 0.0); });
}

TEST_CASE("normalizing constant, scalar case") {
  const auto dec = decompose(Group::trivial(1));
  for (double delta : {3.0, 0.5, 7.2})
    for (double d : {2.0, 0.3, 11.0}) {
      const double q = oracle::integrate_half_line(
          [&](double k) { return std::pow(k, 0.5 * (delta - 2)) * std::exp(-0.5 * k * d); });
      Matrix D(1, 1);
      D << d;
      CAPTURE(delta);
      CAPTURE(d);
      CHECK(log_I(dec, Hyperparams{delta, D}) == doctest::Approx(std::log(q)).epsilon(1e-9));
    }
  Matrix two(1, 1);
  two << 2.0;
  CHECK(log_I(dec, Hyperparams{3.0, two}) == doctest::Approx(std::lgamma(1.5)));
}

TEST_CASE("normalizing constant on the S3 cone against quadrature") {
  const auto dec = s3();
  for (auto [delta, diag, off] : {std::tuple{3.0, 1.0, 0.0}, std::tuple{1.4, 2.0, 0.7}, std::tuple{6.0, 0.5, -0.2}}) {
    Matrix D = Matrix::Constant(3, 3, off);
    D.diagonal().setConstant(diag);
    const double q = oracle::integrate_s3([&](double a, double b, double l1, double l2) {
      const double trace_kd = 3 * a * diag + 6 * b * off;
      return std::exp(0.5 * (delta - 2) * std::log(l1 * l2 * l2) - 0.5 * trace_kd);
    });
    CAPTURE(delta);
    CHECK(log_I(dec, Hyperparams{delta, D}) == doctest::Approx(std::log(q)).epsilon(1e-8));
  }
  expect_domain_error([&] { (void)log_I(dec, Hyperparams{1.0, Matrix::Identity(3, 3)}); });
}

TEST_CASE("the general integral specializes to both closed forms") {
  auto rng = Rng::stream(31, "conefn-test");
  for (const char* gens : {"(1,2,3)(4,5)", "(1,2),(3,4)", "(1,2,3,4),(1,2)"}) {
    const int p = std::string(gens).find('5') != std::string::npos ? 6 : 4;
    const auto dec = decompose(Group::parse(gens, p), 4);
    CAPTURE(gens);
    const double lambda = 2.75, delta = 4.5;
    std::vector<double> gamma_exp, prior_exp;
    for (const auto& b : dec.blocks) {
      gamma_exp.push_back(b.k * lambda - static_cast<double>(b.omega_dim()) / b.r);
      prior_exp.push_back(b.k * 0.5 * (delta - 2));
    }
    CHECK(log_integral_general(dec, gamma_exp, Matrix::Identity(p, p)) ==
          doctest::Approx(log_gamma_P(dec, lambda)).epsilon(1e-13));
    Matrix a(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
    const Matrix D = project(dec.group, a * a.transpose() + Matrix::Identity(p, p));
    CHECK(log_integral_general(dec, prior_exp, 0.5 * D) ==
          doctest::Approx(log_I(dec, Hyperparams{delta, D})).epsilon(1e-13));
  }
}

TEST_CASE("scaling law of the normalizing constant") {
  const auto dec = decompose(Group::parse("(1,2,3)(4,5)", 6));
  const double delta = 3.3, t = 5.5;
  const Matrix D = project(dec.group, Matrix::Identity(6, 6) + 0.2 * Matrix::Ones(6, 6));
  const double shift = log_I(dec, Hyperparams{delta, t * D}) - log_I(dec, Hyperparams{delta, D});
  // Det(tD) = t^p Det D and φ(tD) = t^{-dim Z} φ(D)
  CHECK(shift == doctest::Approx(-(0.5 * (delta - 2) * 6 + dec.dimension()) * std::log(t)).epsilon(1e-12));
}

TEST_CASE("posterior ratios ignore the global measure constant") {
  // Two models share data; the ratio of their posteriors is unchanged when the
  // normalizer is recomputed at a rescaled D (a rescaled measure).
  const Matrix D = Matrix::Identity(4, 4);
  const Matrix U = 2.0 * Matrix::Identity(4, 4) + Matrix::Ones(4, 4);
  const auto a = decompose(Group::parse("(1,2)", 4)), b = decompose(Group::parse("(1,2,3,4),(1,2)", 4));
  auto log_ratio = [&](const BlockDecomposition& dec) {
    return log_I(dec, Hyperparams{3.0 + 10, D + project(dec.group, U)}) - log_I(dec, Hyperparams{3.0, D});
  };
  const double base = log_ratio(a) - log_ratio(b);
  CHECK(std::isfinite(base));
  CHECK(log_ratio(a) - log_ratio(b) == base);
}

TEST_CASE("log domain keeps large problems finite") {
  const auto dec = decompose(Group::trivial(100));
  CHECK(std::isfinite(log_I(dec, Hyperparams{1e4, Matrix::Identity(100, 100)})));
  CHECK(std::isfinite(log_gamma_P(dec, 5000.0)));
  const auto cyc = decompose(Group::parse("(1,2,3,4,5,6,7,8,9,10)", 10));
  CHECK(std::isfinite(log_I(cyc, Hyperparams{1e4, 1e3 * Matrix::Identity(10, 10)})));
}

TEST_CASE("prior shape bound") {
  const auto dec = decompose(Group::parse("(1,2,3,4),(1,2)", 4));  // k = 3 block
  CHECK(delta_lower_bound(dec.blocks) == doctest::Approx(4.0 / 3.0));
  expect_domain_error([&] { (void)log_I(dec, Hyperparams{4.0 / 3.0, Matrix::Identity(4, 4)}); });
  CHECK(std::isfinite(log_I(dec, Hyperparams{1.34, Matrix::Identity(4, 4)})));
}
