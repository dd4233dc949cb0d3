#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/field.hpp"
#include "finsler/norm.hpp"
#include "finsler/spd.hpp"
#include "finsler/types.hpp"

namespace finsler {
namespace quadrature {

/// Gauss-Legendre nodes and weights on [-1, 1] (weights sum to 2), by Newton
/// iteration on the Legendre recurrence.
inline void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < count; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = count * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[count - 1 - i] = x;
    weights[i] = weights[count - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

/// Averaging rule on the unit sphere: weights sum to 1. n = 2 uses the
/// composite trapezoid on the angle (spectrally accurate for periodic
/// integrands); n = 3 a product of Gauss-Legendre in cos(polar) and the
/// trapezoid in azimuth.
struct SphereRule {
  std::vector<Vec> nodes;
  std::vector<double> weights;
};

inline SphereRule sphere_rule(int n, int density) {
  SphereRule rule;
  if (n == 2) {
    rule.nodes.reserve(density);
    rule.weights.assign(density, 1.0 / density);
    for (int k = 0; k < density; ++k) {
      const double th = 2.0 * kPi * k / density;
      Vec w(2);
      w << std::cos(th), std::sin(th);
      rule.nodes.push_back(std::move(w));
    }
  } else if (n == 3) {
    std::vector<double> t, wt;
    gauss_legendre(density, t, wt);
    const int nazi = 2 * density;
    rule.nodes.reserve(static_cast<std::size_t>(density) * nazi);
    rule.weights.reserve(static_cast<std::size_t>(density) * nazi);
    for (int i = 0; i < density; ++i) {
      const double z = t[i];
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int j = 0; j < nazi; ++j) {
        const double phi = 2.0 * kPi * j / nazi;
        Vec w(3);
        w << r * std::cos(phi), r * std::sin(phi), z;
        rule.nodes.push_back(std::move(w));
        rule.weights.push_back(wt[i] / 2.0 / nazi);
      }
    }
  } else {
    throw DimensionMismatch("sphere quadrature is implemented for n = 2 and n = 3");
  }
  return rule;
}

/// Euclidean unit-ball volume omega_n.
inline double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

}  // namespace quadrature

/// Wulff ball B_r(a) = { x : H*(x - a) < r } of a dual norm H*. For quadratic
/// duals (H* from M^{-1}) the ball is the ellipsoid a + r B D, B = sqrt(M),
/// D the Euclidean unit ball, and that parametrization is cached.
class WulffBall {
 public:
  WulffBall(Vec center, double radius, Norm dual)
      : center_(std::move(center)), radius_(radius), dual_(std::move(dual)) {
    if (!(radius_ > 0.0)) throw Error("Wulff ball radius must be positive");
    if (center_.size() != dual_.dim())
      throw DimensionMismatch("Wulff ball center size does not match the norm");
    if (dual_.is_quadratic())
      primal_ = SpdMatrix::validate(dual_.matrix().inverse());
  }

  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Norm& dual() const { return dual_; }
  int dim() const { return dual_.dim(); }

  bool contains(const Vec& x) const { return eval_norm(dual_, x - center_) < radius_; }

  /// The primal matrix M = (dual matrix)^{-1}; its sqrt is the B of the
  /// parametrization x = center + radius * B * omega, |omega| <= 1.
  const SpdMatrix& primal() const {
    if (!primal_) throw UnsupportedNorm("Wulff quadrature requires a quadratic dual norm");
    return *primal_;
  }

 private:
  Vec center_;
  double radius_;
  Norm dual_;
  std::optional<SpdMatrix> primal_;
};

/// kappa = |B_1(0)| = det(B) * omega_n, the Lebesgue measure of the unit
/// Wulff ball of a quadratic dual norm.
inline double wulff_kappa(const Norm& hstar, int n) {
  if (!hstar.is_quadratic())
    throw UnsupportedNorm("wulff_kappa requires a quadratic dual norm");
  if (hstar.dim() != n) throw DimensionMismatch("wulff_kappa dimension mismatch");
  // det(B) = det(sqrt(W^{-1})) = det(W)^{-1/2} for the dual matrix W = M^{-1}.
  const double det_b = 1.0 / hstar.matrix().det_sqrt();
  return det_b * quadrature::unit_ball_volume(n);
}

/// (1 / (kappa r^n)) * integral of u over B_r(a). Substituting x = a + B z
/// (Jacobian det B) turns the domain into the Euclidean ball |z| < r, handled
/// by radial Gauss-Legendre times a sphere rule; exact for low-degree
/// polynomial integrands, no boundary clipping.
inline double wulff_volume_average(const ScalarField& u, const WulffBall& ball, int quad_density) {
  if (quad_density < 32) throw Error("wulff_volume_average needs quad_density >= 32");
  if (u.dim() != ball.dim()) throw DimensionMismatch("field and ball dimensions differ");
  const SpdMatrix& primal = ball.primal();
  if (u.domain() == Domain::Punctured && eval_norm(ball.dual(), -ball.center()) <= ball.radius())
    throw OutOfDomain("ball reaches the puncture at the origin");
  const int n = ball.dim();
  const double r = ball.radius();
  const Mat& b = primal.sqrt();

  std::vector<double> t, wt;
  quadrature::gauss_legendre(quad_density, t, wt);
  const quadrature::SphereRule sphere = quadrature::sphere_rule(n, quad_density);

  double acc = 0.0;
  for (int j = 0; j < quad_density; ++j) {
    const double s = 0.5 * r * (t[j] + 1.0);
    const double wr = 0.5 * r * wt[j] * std::pow(s, n - 1);
    double shell = 0.0;
    for (std::size_t k = 0; k < sphere.nodes.size(); ++k)
      shell += sphere.weights[k] * u(ball.center() + s * (b * sphere.nodes[k]));
    acc += wr * shell;
  }
  const double det_b = primal.det_sqrt();
  const double n_omega = n * quadrature::unit_ball_volume(n);
  const double kappa = wulff_kappa(ball.dual(), n);
  return det_b * n_omega * acc / (kappa * std::pow(r, n));
}

enum class SurfaceMeasure { Anisotropic, Euclidean };

/// (1 / (n kappa r^{n-1})) * integral of u over the boundary of B_r(a).
///
/// The anisotropic measure is the coarea one, dS = dH^{n-1} / |grad H*|,
/// which pulls back through x = a + r B omega to det(B) r^{n-1} times the
/// uniform sphere measure; it is the unique choice consistent with the volume
/// formula under differentiation in r. The Euclidean variant weights nodes by
/// the ellipsoid's surface element det(B) |B^{-1} omega| and normalizes by
/// the Euclidean perimeter, and is kept so checkers can report the gap.
inline double wulff_surface_average(const ScalarField& u, const WulffBall& ball, int quad_density,
                                    SurfaceMeasure measure = SurfaceMeasure::Anisotropic) {
  if (quad_density < 64) throw Error("wulff_surface_average needs quad_density >= 64");
  if (u.dim() != ball.dim()) throw DimensionMismatch("field and ball dimensions differ");
  const SpdMatrix& primal = ball.primal();
  const double r = ball.radius();
  if (u.domain() == Domain::Punctured &&
      std::abs(eval_norm(ball.dual(), -ball.center()) - r) <= 1e-12 * r)
    throw OutOfDomain("ball boundary passes through the puncture at the origin");
  const int n = ball.dim();
  const Mat& b = primal.sqrt();

  const quadrature::SphereRule sphere = quadrature::sphere_rule(n, quad_density);
  if (measure == SurfaceMeasure::Anisotropic) {
    const double det_b = primal.det_sqrt();
    const double kappa = wulff_kappa(ball.dual(), n);
    const double omega_n = quadrature::unit_ball_volume(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < sphere.nodes.size(); ++k)
      acc += sphere.weights[k] * u(ball.center() + r * (b * sphere.nodes[k]));
    return det_b * omega_n * acc / kappa;
  }
  // B^{-1} = sqrt(dual matrix).
  const Mat& binv = ball.dual().matrix().sqrt();
  double acc = 0.0, perim = 0.0;
  for (std::size_t k = 0; k < sphere.nodes.size(); ++k) {
    const double w = sphere.weights[k] * (binv * sphere.nodes[k]).norm();
    acc += w * u(ball.center() + r * (b * sphere.nodes[k]));
    perim += w;
  }
  return acc / perim;
}

}  // namespace finsler
