#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/field.hpp"
#include "finsler/norm.hpp"

namespace finsler {

enum class GradMode { Analytic, FiniteDifference };

/// Settings for pointwise operator evaluation. The divergence stencil uses
/// step h_flux * (1 + |x|).
struct OperatorConfig {
  double p = 2.0;
  double h_flux = 1e-5;
  GradMode grad_mode = GradMode::Analytic;
  double degenerate_tol = 1e-10;

  static OperatorConfig analytic(double p) {
    OperatorConfig c;
    c.p = p;
    return c;
  }

  /// Nested finite differences need a larger step (see fd_step_nested).
  static OperatorConfig finite_difference(double p) {
    OperatorConfig c;
    c.p = p;
    c.grad_mode = GradMode::FiniteDifference;
    c.h_flux = 1e-4;
    return c;
  }

  void check() const {
    if (!(p > 1.0)) throw Error("operator exponent p must be > 1, got " + std::to_string(p));
    if (!(h_flux > 0.0)) throw Error("flux step must be positive");
    if (degenerate_tol < 0.0) throw Error("degenerate tolerance must be >= 0");
  }
};

/// Anisotropic flux H^{p-1}(g) grad H(g) = H^{p-2}(g) (H grad H)(g).
/// Extended by zero across the degenerate set H(g) <= tol when p >= 2 (the
/// flux is continuous there); unbounded for p < 2, hence an error.
inline Vec flux(const Norm& h, double p, const Vec& g, double degenerate_tol = 1e-10) {
  const double hg = eval_norm(h, g);
  if (hg <= degenerate_tol) {
    if (p < 2.0)
      throw DegenerateGradient("flux unbounded at H(grad u) = " + std::to_string(hg) +
                               " with p < 2");
    return Vec::Zero(g.size());
  }
  if (p == 2.0) return norm_times_grad(h, g);
  return std::pow(hg, p - 2.0) * norm_times_grad(h, g);
}

/// Finsler p-Laplacian at a point: central-difference divergence of the flux
/// field y -> flux(h, p, grad u(y)). The divergence is always taken of the
/// flux itself, never via a second-derivative stencil of u, matching the
/// divergence-form definition of the operator.
inline double finsler_p_laplacian(const Norm& h, const OperatorConfig& cfg, const ScalarField& u,
                                  const Vec& x) {
  cfg.check();
  if (u.dim() != h.dim()) throw DimensionMismatch("field and norm dimensions differ");
  const double step = cfg.h_flux * (1.0 + x.norm());
  if (u.domain() == Domain::Punctured && x.norm() <= 2.0 * step)
    throw OutOfDomain("operator stencil reaches the puncture at the origin");
  const bool analytic = cfg.grad_mode == GradMode::Analytic && u.has_gradient();
  auto flux_at = [&](const Vec& y) {
    const Vec g = analytic ? u.gradient(y) : fd_gradient(u, y, cfg.h_flux * (1.0 + y.norm()));
    return flux(h, cfg.p, g, cfg.degenerate_tol);
  };
  return fd_divergence(flux_at, h.dim(), x, step);
}

/// Classical isotropic p-Laplacian: the Euclidean specialization, same code
/// path as finsler_p_laplacian.
inline double p_laplacian(const OperatorConfig& cfg, const ScalarField& u, const Vec& x) {
  return finsler_p_laplacian(Norm::euclidean(u.dim()), cfg, u, x);
}

/// Weak-form residual of Definition-style solutions:
///   integral( flux(grad u) . grad phi ) - integral( f phi )
/// over the support of the bump phi, by tensor-product midpoint quadrature on
/// the bounding box of the support. Vanishes up to quadrature error when
/// -Delta_p^H u = f classically.
inline double weak_form_residual(const Norm& h, double p, const ScalarField& u,
                                 const ScalarField& f, const BumpFunction& phi, int quad_density) {
  if (quad_density < 32) throw Error("weak_form_residual needs quad_density >= 32");
  const int n = u.dim();
  if (f.dim() != n || phi.dim() != n || h.dim() != n)
    throw DimensionMismatch("weak_form_residual inputs disagree on dimension");
  const Vec& c = phi.center();
  const double rho = phi.radius();
  if ((u.domain() == Domain::Punctured || f.domain() == Domain::Punctured) &&
      c.norm() <= rho)
    throw OutOfDomain("support of phi reaches the puncture at the origin");

  const double cell = 2.0 * rho / quad_density;
  double vol = 1.0;
  for (int i = 0; i < n; ++i) vol *= cell;

  std::vector<int> idx(n, 0);
  Vec x(n);
  double pairing = 0.0, source = 0.0;
  for (;;) {
    for (int i = 0; i < n; ++i) x[i] = c[i] - rho + (idx[i] + 0.5) * cell;
    if ((x - c).squaredNorm() < rho * rho) {
      const Vec g = u.has_gradient() ? u.gradient(x) : fd_gradient(u, x, fd_step_first(x));
      pairing += flux(h, p, g).dot(phi.gradient(x)) * vol;
      source += f(x) * phi(x) * vol;
    }
    int i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < quad_density) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  return pairing - source;
}

}  // namespace finsler
