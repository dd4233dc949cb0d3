#include <doctest.h>

#include <cmath>
#include <vector>

#include "finsler/norm.hpp"
#include "support.hpp"

using namespace finsler;
using testsupport::mat2;
using testsupport::vec2;
using testsupport::vec3;

namespace {

const Norm quad41 = Norm::quadratic(validate_spd(mat2(4, 0, 0, 1)));
const Norm quad53 = Norm::quadratic(validate_spd(mat2(5, 3, 3, 5)));

/// Independent Hessian oracle: second differences of xi -> H(xi)^2, touching
/// only eval_norm.
Mat fd_hessian_normsq(const Norm& h, const Vec& xi, double step) {
  const int n = h.dim();
  auto f = [&](const Vec& v) {
    const double e = eval_norm(h, v);
    return e * e;
  };
  Mat out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec a = xi;
      if (i == j) {
        a[i] = xi[i] + step;
        const double up = f(a);
        a[i] = xi[i] - step;
        const double dn = f(a);
        out(i, i) = (up - 2.0 * f(xi) + dn) / (step * step);
      } else {
        a[i] += step;
        a[j] += step;
        const double pp = f(a);
        a[j] -= 2.0 * step;
        const double pm = f(a);
        a[i] -= 2.0 * step;
        const double mm = f(a);
        a[j] += 2.0 * step;
        const double mp = f(a);
        out(i, j) = (pp - pm - mp + mm) / (4.0 * step * step);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("eval_norm: closed-form values") {
  CHECK(eval_norm(quad41, vec2(1, 1)) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(eval_norm(Norm::qnorm(4, 2), vec2(1, 1)) ==
        doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-14));
  CHECK(eval_norm(quad41, vec2(0, 0)) == 0.0);
  CHECK(eval_norm(Norm::qnorm(3, 2), vec2(0, 0)) == 0.0);
}

TEST_CASE("grad_norm: closed-form values and Euler identity") {
  const Vec g = grad_norm(quad41, vec2(1, 1));
  CHECK(g[0] == doctest::Approx(4.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));

  const Vec e = grad_norm(Norm::euclidean(2), vec2(3, 4));
  CHECK(e[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(e[1] == doctest::Approx(0.8).epsilon(1e-14));

  const Norm q4 = Norm::qnorm(4, 2);
  const Vec gq = grad_norm(q4, vec2(1, 1));
  CHECK(gq[0] == doctest::Approx(std::pow(2.0, -0.75)).epsilon(1e-13));
  CHECK(gq[1] == doctest::Approx(std::pow(2.0, -0.75)).epsilon(1e-13));
  CHECK(gq.dot(vec2(1, 1)) == doctest::Approx(eval_norm(q4, vec2(1, 1))).epsilon(1e-13));
}

TEST_CASE("grad_norm: error paths") {
  CHECK_THROWS_AS(grad_norm(quad41, vec2(0, 0)), ZeroVector);
  CHECK_THROWS_AS(grad_norm(Norm::qnorm(1.5, 2), vec2(1, 0)), SingularGradient);
  // q >= 2 is fine on the axes
  CHECK_NOTHROW(grad_norm(Norm::qnorm(4, 2), vec2(1, 0)));
  CHECK_THROWS_AS(grad_norm(quad41, vec3(1, 1, 1)), DimensionMismatch);
}

TEST_CASE("hessian_normsq: quadratic norms give 2M everywhere") {
  const Mat expect = 2.0 * mat2(4, 0, 0, 1);
  CHECK(testsupport::max_rel_diff(hessian_normsq(quad41, vec2(1, 1)), expect) < 1e-15);
  CHECK(testsupport::max_rel_diff(hessian_normsq(quad41, vec2(-2, 0.3)), expect) < 1e-15);
  CHECK(hessian_normsq(Norm::qnorm(2, 2), vec2(0.3, -2)).isApprox(2.0 * Mat::Identity(2, 2)));
  CHECK_THROWS_AS(hessian_normsq(quad41, vec2(0, 0)), ZeroVector);
}

TEST_CASE("hessian_normsq: q-norm Hessian varies between directions") {
  const Norm q4 = Norm::qnorm(4, 2);
  const Mat axis = hessian_normsq(q4, vec2(1, 0));
  const Mat diag = hessian_normsq(q4, vec2(1, 1));
  CHECK(axis(1, 1) == doctest::Approx(0.0));
  CHECK(diag(1, 1) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(std::abs(axis(1, 1) - diag(1, 1)) > 1.0);

  // agreement with the finite-difference oracle at generic points
  Rng rng(31);
  for (const Norm& h : {quad53, q4, Norm::qnorm(1.5, 2), Norm::qnorm(3, 3)}) {
    for (int t = 0; t < 25; ++t) {
      Vec xi = rng.sphere_dir(h.dim());
      if (xi.cwiseAbs().minCoeff() < 0.05) continue;
      const Mat closed = hessian_normsq(h, xi);
      const Mat fd = fd_hessian_normsq(h, xi, 2e-5);
      CHECK((closed - fd).cwiseAbs().maxCoeff() < 5e-5 * (1.0 + closed.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("dual_norm: closed forms and involution") {
  const Norm d = dual_norm(quad41);
  CHECK(d.matrix().matrix()(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(d.matrix().matrix()(1, 1) == doctest::Approx(1.0).epsilon(1e-14));

  const Norm q43 = dual_norm(Norm::qnorm(4, 2));
  CHECK(q43.exponent() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  const Norm id = dual_norm(Norm::euclidean(3));
  CHECK(id.matrix().matrix().isApprox(Mat::Identity(3, 3), 1e-13));

  // structural involution
  const Norm dd = dual_norm(dual_norm(quad53));
  CHECK(testsupport::max_rel_diff(dd.matrix().matrix(), quad53.matrix().matrix()) < 1e-12);
  CHECK(dual_norm(dual_norm(Norm::qnorm(4, 2))).exponent() == doctest::Approx(4.0));
}

TEST_CASE("dual_eval_numeric matches the closed-form dual") {
  CHECK(dual_eval_numeric(quad41, vec2(1, 1), 256) ==
        doctest::Approx(std::sqrt(1.25)).epsilon(1e-6));
  CHECK(dual_eval_numeric(Norm::euclidean(2), vec2(3, 4), 256) ==
        doctest::Approx(5.0).epsilon(1e-6));
  CHECK(dual_eval_numeric(Norm::qnorm(4, 2), vec2(1, 1), 256) ==
        doctest::Approx(std::pow(2.0, 0.75)).epsilon(1e-6));
  CHECK(dual_eval_numeric(quad41, vec2(0, 0), 256) == 0.0);
  CHECK_THROWS_AS(dual_eval_numeric(quad41, vec2(1, 1), 8), Error);

  Rng rng(12);
  const Norm quad3 = Norm::quadratic(validate_spd(testsupport::random_spd(rng, 3, 50.0)));
  for (const Norm& h : {quad41, quad53, quad3, Norm::qnorm(4, 2), Norm::qnorm(1.5, 3)}) {
    const Norm hd = dual_norm(h);
    for (int t = 0; t < 20; ++t) {
      const Vec x = rng.uniform(0.5, 2.0) * rng.sphere_dir(h.dim());
      const double closed = eval_norm(hd, x);
      const double numeric = dual_eval_numeric(h, x, 256);
      CHECK(std::abs(numeric - closed) <= 1e-6 * closed);
    }
  }
}

TEST_CASE("check_fk_condition: quadratic norms satisfy the pairing") {
  // H grad H = Mx and H* grad H* = M^{-1}y, so the pairing telescopes
  CHECK(std::abs(check_fk_condition(quad41, vec2(1, 1), vec2(1, 0))) < 1e-14);
  Rng rng(5);
  for (const Norm& h : {quad41, quad53}) {
    for (int t = 0; t < 500; ++t) {
      const Vec x = rng.uniform(0.2, 3.0) * rng.sphere_dir(2);
      const Vec y = rng.uniform(0.2, 3.0) * rng.sphere_dir(2);
      const double res = check_fk_condition(h, x, y);
      CHECK(std::abs(res) <= 1e-12 * (1.0 + std::abs(x.dot(y))));
    }
  }
}

TEST_CASE("check_fk_condition: q-norms violate the pairing") {
  const Norm q4 = Norm::qnorm(4, 2);
  const double res = check_fk_condition(q4, vec2(1, 1), vec2(1, 0));
  CHECK(res == doctest::Approx(1.0 / std::sqrt(2.0) - 1.0).epsilon(1e-12));
  CHECK(std::abs(res) > 0.29);
  CHECK_THROWS_AS(check_fk_condition(q4, vec2(0, 0), vec2(1, 0)), ZeroVector);
}

TEST_CASE("recover_quadratic") {
  const std::vector<Vec> samples = {vec2(1, 0), vec2(0, 1), vec2(1, 1), vec2(2, -1)};
  const auto m = recover_quadratic(quad41, samples);
  REQUIRE(m.has_value());
  CHECK(testsupport::max_rel_diff(m->matrix(), mat2(4, 0, 0, 1)) < 1e-14);

  CHECK_FALSE(recover_quadratic(Norm::qnorm(4, 2), samples).has_value());

  const auto id = recover_quadratic(Norm::qnorm(2, 3), {vec3(1, 0, 0), vec3(1, 1, 1)});
  REQUIRE(id.has_value());
  CHECK(id->matrix().isApprox(Mat::Identity(3, 3), 1e-13));

  CHECK_THROWS_AS(recover_quadratic(quad41, {vec2(1, 0)}), TooFewSamples);
  CHECK_THROWS_AS(recover_quadratic(quad41, {vec2(1, 0), vec2(0, 0)}), ZeroVector);
}

TEST_CASE("norm invariants hold on seeded samples") {
  Rng rng(2024);
  const std::vector<Norm> family = {quad41, quad53, Norm::qnorm(4, 2), Norm::qnorm(1.5, 2),
                                    Norm::qnorm(3, 3)};
  for (const Norm& h : family) {
    const auto [a, b] = h.equivalence_bounds();
    for (int t = 0; t < 200; ++t) {
      const Vec xi = rng.uniform(0.1, 2.0) * rng.sphere_dir(h.dim());
      const double hv = eval_norm(h, xi);

      // positivity and norm equivalence
      CHECK(hv > 0.0);
      CHECK(hv >= a * xi.norm() * (1.0 - 1e-12));
      CHECK(hv <= b * xi.norm() * (1.0 + 1e-12));

      // 1-homogeneity
      const double t_scale = rng.uniform(-3.0, 3.0);
      const double left = eval_norm(h, (t_scale * xi).eval());
      CHECK(std::abs(left - std::abs(t_scale) * hv) <= 1e-12 * (left + 1e-300));

      // Euler identity and FD gradient check away from singular loci
      const bool singular = h.kind() == NormKind::QNorm && h.exponent() < 2.0 &&
                            xi.cwiseAbs().minCoeff() < 1e-3;
      if (!singular) {
        const Vec g = grad_norm(h, xi);
        CHECK(std::abs(g.dot(xi) - hv) <= 1e-10 * hv);
        const Vec unit = xi / xi.norm();
        const Vec gfd = [&] {
          Vec out(h.dim());
          Vec e = unit;
          for (int i = 0; i < h.dim(); ++i) {
            e[i] = unit[i] + 1e-6;
            const double up = eval_norm(h, e);
            e[i] = unit[i] - 1e-6;
            const double dn = eval_norm(h, e);
            e[i] = unit[i];
            out[i] = (up - dn) / 2e-6;
          }
          return out;
        }();
        CHECK((grad_norm(h, unit) - gfd).cwiseAbs().maxCoeff() <= 1e-6);
      }
    }
  }
}

TEST_CASE("duality pairing bound with equality at conjugate directions") {
  Rng rng(77);
  for (const Norm& h : {quad41, quad53, Norm::qnorm(4, 2)}) {
    const Norm hd = dual_norm(h);
    for (int t = 0; t < 500; ++t) {
      const Vec x = rng.uniform(0.2, 2.0) * rng.sphere_dir(h.dim());
      const Vec xi = rng.uniform(0.2, 2.0) * rng.sphere_dir(h.dim());
      CHECK(x.dot(xi) <= eval_norm(hd, x) * eval_norm(h, xi) * (1.0 + 1e-12));
    }
    if (h.is_quadratic()) {
      for (int t = 0; t < 50; ++t) {
        const Vec x = rng.uniform(0.2, 2.0) * rng.sphere_dir(h.dim());
        const Vec conj = norm_times_grad(hd, x);  // M^{-1} x direction
        const double lhs = x.dot(conj);
        const double rhs = eval_norm(hd, x) * eval_norm(h, conj);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * rhs);
      }
    }
  }
}

TEST_CASE("H*(grad H(xi)) = 1 for quadratic norms") {
  Rng rng(101);
  for (const Norm& h : {quad41, quad53}) {
    const Norm hd = dual_norm(h);
    for (int t = 0; t < 100; ++t) {
      const Vec xi = rng.uniform(0.1, 3.0) * rng.sphere_dir(2);
      CHECK(eval_norm(hd, grad_norm(h, xi)) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}
