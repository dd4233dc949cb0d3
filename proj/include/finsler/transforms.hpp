#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "finsler/errors.hpp"
#include "finsler/field.hpp"
#include "finsler/norm.hpp"
#include "finsler/types.hpp"

namespace finsler {

/// Anisotropic Kelvin map T_H(xi) = grad H(xi) / H(xi) = M xi / H(xi)^2 for a
/// quadratic norm, factoring as L_B o inversion o L_B with B = sqrt(M).
/// Construction refuses non-quadratic norms: the transform has no meaningful
/// counterpart for general anisotropies.
class KelvinMap {
 public:
  explicit KelvinMap(Norm h) : norm_(std::move(h)) {
    if (!norm_.is_quadratic())
      throw UnsupportedNorm("Kelvin transform requires a quadratic norm");
  }

  const Norm& norm() const { return norm_; }
  int dim() const { return norm_.dim(); }
  const Mat& matrix() const { return norm_.matrix().matrix(); }
  const Mat& sqrt() const { return norm_.matrix().sqrt(); }

 private:
  Norm norm_;
};

/// Euclidean spherical inversion x / |x|^2; an involution away from 0.
inline Vec spherical_inversion(const Vec& x) {
  const double r2 = x.squaredNorm();
  if (r2 == 0.0) throw ZeroVector("spherical inversion at the origin");
  return x / r2;
}

/// T_H(xi) = M xi / <M xi, xi>, via the closed form rather than numerical
/// differentiation of H; the equivalence with grad H / H is a tested
/// invariant instead.
inline Vec kelvin_point(const KelvinMap& k, const Vec& xi) {
  if (xi.size() != k.dim()) throw DimensionMismatch("kelvin_point size mismatch");
  const Vec mx = k.matrix() * xi;
  const double h2 = mx.dot(xi);
  if (h2 == 0.0) throw ZeroVector("Kelvin map at the origin");
  return mx / h2;
}

/// Linear pullback u~(x) = u(Bx), with gradient B^T grad u(Bx) when available.
/// B may be any invertible square matrix.
inline ScalarField pullback_linear(const ScalarField& u, const Mat& b) {
  if (b.rows() != b.cols()) throw NotSquare("pullback matrix must be square");
  if (b.rows() != u.dim()) throw DimensionMismatch("pullback matrix size mismatch");
  if (!Eigen::FullPivLU<Mat>(b).isInvertible())
    throw SingularMatrix("pullback matrix is singular");
  ScalarField base = u;
  Mat bc = b;
  ScalarField::GradFn grad;
  if (u.has_gradient()) {
    Mat bt = b.transpose();
    grad = [base, bc, bt](const Vec& x) { return Vec(bt * base.gradient(bc * x)); };
  }
  return ScalarField(
      u.dim(), [base, bc](const Vec& x) { return base(bc * x); }, std::move(grad), u.domain());
}

namespace detail {

/// Jacobian of T_H at x: M/H^2 - 2 (Mx)(Mx)^T / H^4. Symmetric.
inline Mat kelvin_jacobian(const Mat& m, const Vec& x) {
  const Vec mx = m * x;
  const double h2 = mx.dot(x);
  return m / h2 - (2.0 / (h2 * h2)) * (mx * mx.transpose());
}

/// Shared body of the hat transform u(T_H x) * H(x)^{-weight}, with the chain
/// rule gradient when u has one. weight = n-2 gives the hat transform,
/// weight = 0 the star transform.
inline ScalarField kelvin_conjugate(const ScalarField& u, const KelvinMap& k, int weight) {
  if (u.dim() != k.dim()) throw DimensionMismatch("field and Kelvin map dimensions differ");
  ScalarField base = u;
  Mat m = k.matrix();
  ScalarField::GradFn grad;
  if (u.has_gradient()) {
    grad = [base, m, weight](const Vec& x) {
      const Vec mx = m * x;
      const double h2 = mx.dot(x);
      const double h = std::sqrt(h2);
      const Vec t = mx / h2;
      Vec g = std::pow(h, -weight) * (kelvin_jacobian(m, x) * base.gradient(t));
      if (weight != 0)
        g -= (weight * std::pow(h, -weight - 2) * base(t)) * mx;
      return g;
    };
  }
  return ScalarField(
      u.dim(),
      [base, m, weight](const Vec& x) {
        const Vec mx = m * x;
        const double h2 = mx.dot(x);
        const double v = base(mx / h2);
        return weight == 0 ? v : v * std::pow(std::sqrt(h2), -weight);
      },
      std::move(grad), Domain::Punctured);
}

}  // namespace detail

/// Hat transform u^ = (u o T_H) / H^{n-2} on R^n minus the origin. For n = 2
/// the weight is 1 and this coincides with the star transform.
inline ScalarField hat_transform(const ScalarField& u, const KelvinMap& k) {
  return detail::kelvin_conjugate(u, k, k.dim() - 2);
}

/// Star transform u* = u o T_H, the p = n conjugation.
inline ScalarField star_transform(const ScalarField& u, const KelvinMap& k) {
  return detail::kelvin_conjugate(u, k, 0);
}

/// Classical Kelvin transform u(x/|x|^2) / |x|^{n-2}: the hat transform of
/// the Euclidean norm.
inline ScalarField classical_kelvin(const ScalarField& u, int n) {
  if (u.dim() != n) throw DimensionMismatch("classical_kelvin dimension mismatch");
  return hat_transform(u, KelvinMap(Norm::euclidean(n)));
}

}  // namespace finsler
