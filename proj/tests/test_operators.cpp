#include <doctest.h>

#include <cmath>
#include <vector>

#include "finsler/operators.hpp"
#include "support.hpp"

using namespace finsler;
using testsupport::mat2;
using testsupport::quadratic_form_poly;
using testsupport::vec2;

namespace {

const Norm quad41 = Norm::quadratic(validate_spd(mat2(4, 0, 0, 1)));

/// Midpoint quadrature of |f| * phi over the support box; test-side scale for
/// relative weak-form bounds.
double pairing_scale(const ScalarField& f, const BumpFunction& phi, int density) {
  const Vec& c = phi.center();
  const double rho = phi.radius();
  const double cell = 2.0 * rho / density;
  double acc = 0.0;
  Vec x(2);
  for (int i = 0; i < density; ++i) {
    x[0] = c[0] - rho + (i + 0.5) * cell;
    for (int j = 0; j < density; ++j) {
      x[1] = c[1] - rho + (j + 0.5) * cell;
      acc += std::abs(f(x)) * phi(x) * cell * cell;
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("flux: closed forms and degenerate handling") {
  const Vec f = flux(quad41, 4.0, vec2(1, 0));
  CHECK(f[0] == doctest::Approx(16.0).epsilon(1e-13));
  CHECK(f[1] == doctest::Approx(0.0));

  CHECK(flux(Norm::euclidean(2), 2.0, vec2(3, 4)).isApprox(vec2(3, 4)));

  CHECK(flux(quad41, 3.0, vec2(0, 0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(flux(quad41, 1.5, vec2(0, 0)), DegenerateGradient);
}

TEST_CASE("finsler_p_laplacian: quadratic fields give div(M grad u)") {
  const OperatorConfig cfg = OperatorConfig::analytic(2.0);
  const ScalarField u = make_polynomial({{{2, 0}, 1.0}, {{0, 2}, 1.0}}, 2);
  CHECK(finsler_p_laplacian(quad41, cfg, u, vec2(0.3, -1.2)) ==
        doctest::Approx(10.0).epsilon(1e-10));

  const ScalarField harmonic = make_polynomial({{{2, 0}, 1.0}, {{0, 2}, -1.0}}, 2);
  CHECK(std::abs(finsler_p_laplacian(Norm::euclidean(2), cfg, harmonic, vec2(1, 1))) < 1e-10);

  const ScalarField linear = make_polynomial({{{1, 0}, 2.0}, {{0, 1}, -1.0}}, 2);
  const OperatorConfig cfg4 = OperatorConfig::analytic(4.0);
  CHECK(std::abs(finsler_p_laplacian(quad41, cfg4, linear, vec2(0.5, 0.5))) < 1e-10);
}

TEST_CASE("p_laplacian: isotropic values") {
  const ScalarField u = make_polynomial({{{2, 0}, 1.0}, {{0, 2}, 1.0}}, 2);
  CHECK(p_laplacian(OperatorConfig::analytic(2.0), u, vec2(5, -2)) ==
        doctest::Approx(4.0).epsilon(1e-11));

  const ScalarField lin = make_polynomial({{{1, 0}, 1.0}}, 2);
  CHECK(std::abs(p_laplacian(OperatorConfig::analytic(3.0), lin, vec2(0.7, 0.1))) < 1e-12);

  // p = 4, u = |x|^2: flux = 8 |x|^2 x, divergence 32 |x|^2
  CHECK(p_laplacian(OperatorConfig::analytic(4.0), u, vec2(1, 0)) ==
        doctest::Approx(32.0).epsilon(1e-7));
}

TEST_CASE("isotropic consistency: Euclidean norm reproduces p_laplacian exactly") {
  Rng rng(42);
  const std::vector<ScalarField> fields = {
      make_polynomial({{{2, 0}, 1.0}, {{0, 2}, 1.0}}, 2),
      make_polynomial({{{4, 0}, 1.0}, {{0, 4}, 1.0}, {{2, 2}, 2.0}}, 2),
      make_polynomial({{{3, 0}, 0.5}, {{1, 1}, 1.0}}, 2),
  };
  const Norm euclid = Norm::euclidean(2);
  int done = 0;
  for (int t = 0; done < 50; ++t) {
    const ScalarField& u = fields[t % fields.size()];
    const double p = 2.0 + 0.5 * (t % 5);
    const Vec x = rng.uniform(0.5, 2.0) * rng.sphere_dir(2);
    if (u.gradient(x).norm() < 1e-2) continue;
    const OperatorConfig cfg = OperatorConfig::analytic(p);
    const double a = finsler_p_laplacian(euclid, cfg, u, x);
    const double b = p_laplacian(cfg, u, x);
    CHECK(std::abs(a - b) <= 1e-12 * (std::abs(a) + 1e-12));
    ++done;
  }
}

TEST_CASE("p = 2 quadratic closed form: Delta^H <Ax,x> = 2 tr(MA)") {
  Rng rng(4242);
  const OperatorConfig cfg = OperatorConfig::analytic(2.0);
  for (const Mat& mraw : {mat2(4, 0, 0, 1), mat2(5, 3, 3, 5)}) {
    const Norm h = Norm::quadratic(validate_spd(mraw));
    for (int t = 0; t < 25; ++t) {
      Mat a(2, 2);
      const double a01 = rng.uniform(-1.0, 1.0);
      a << rng.uniform(-2.0, 2.0), a01, a01, rng.uniform(-2.0, 2.0);
      const ScalarField u = quadratic_form_poly(a).field();
      const double expect = 2.0 * (mraw * a).trace();
      const Vec x = rng.uniform(0.3, 2.0) * rng.sphere_dir(2);
      CHECK(std::abs(finsler_p_laplacian(h, cfg, u, x) - expect) <=
            1e-8 * (1.0 + std::abs(expect)));
    }
  }
}

TEST_CASE("step halving shrinks the truncation error by about 4x") {
  const ScalarField u = testsupport::norm4_poly(2).field();
  // exact: div(4 |y|^2 M y) = 8 y^T M y + 4 |y|^2 tr M
  const Mat m = mat2(5, 3, 3, 5);
  const Norm h = Norm::quadratic(validate_spd(m));
  const Vec x = vec2(1.1, -0.4);
  const double exact = 8.0 * x.dot(m * x) + 4.0 * x.squaredNorm() * m.trace();

  OperatorConfig coarse = OperatorConfig::analytic(2.0);
  coarse.h_flux = 1e-3;
  OperatorConfig fine = coarse;
  fine.h_flux = 0.5e-3;
  const double e_coarse = std::abs(finsler_p_laplacian(h, coarse, u, x) - exact);
  const double e_fine = std::abs(finsler_p_laplacian(h, fine, u, x) - exact);
  CHECK(e_coarse > 1e-9);  // truncation-dominated regime
  CHECK(e_coarse / e_fine >= 3.0);
}

TEST_CASE("weak_form_residual: manufactured solution and exact cases") {
  const ScalarField u = make_polynomial({{{2, 0}, 1.0}, {{0, 2}, 1.0}}, 2);
  const ScalarField f = make_constant(-10.0, 2);  // f = -Delta^H u for M = diag(4,1)
  const BumpFunction phi(vec2(0, 0), 1.0);

  const double res = weak_form_residual(quad41, 2.0, u, f, phi, 64);
  const double scale = pairing_scale(f, phi, 256);
  CHECK(scale > 1.0);
  CHECK(std::abs(res) <= 1e-4 * scale);

  // refining the mesh does not worsen the residual
  const double res128 = weak_form_residual(quad41, 2.0, u, f, phi, 128);
  CHECK(std::abs(res128) <= std::max(std::abs(res), 1e-12));

  const ScalarField lin = make_polynomial({{{1, 0}, 1.0}, {{0, 1}, 3.0}}, 2);
  CHECK(std::abs(weak_form_residual(quad41, 2.0, lin, make_constant(0.0, 2), phi, 64)) <= 1e-12);

  const ScalarField harmonic = make_polynomial({{{2, 0}, 1.0}, {{0, 2}, -1.0}}, 2);
  CHECK(std::abs(weak_form_residual(Norm::euclidean(2), 2.0, harmonic, make_constant(0.0, 2),
                                    phi, 64)) <= 1e-6);

  CHECK_THROWS_AS(weak_form_residual(quad41, 2.0, u, f, phi, 16), Error);
}

TEST_CASE("operator config validation") {
  OperatorConfig bad = OperatorConfig::analytic(2.0);
  bad.p = 1.0;
  CHECK_THROWS_AS(bad.check(), Error);
  bad = OperatorConfig::analytic(2.0);
  bad.h_flux = 0.0;
  CHECK_THROWS_AS(bad.check(), Error);
  CHECK_NOTHROW(OperatorConfig::finite_difference(3.0).check());
}
