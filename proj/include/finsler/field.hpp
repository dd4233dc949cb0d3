#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/norm.hpp"
#include "finsler/spd.hpp"
#include "finsler/types.hpp"

namespace finsler {

/// Open set a field lives on: all of R^n, or R^n minus the origin (the domain
/// of every Kelvin-transformed field).
enum class Domain { AllSpace, Punctured };

/// Evaluation contract for u: R^n -> R with an optional analytic gradient.
/// Immutable value object; evaluators must be pure.
class ScalarField {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;

  ScalarField(int n, ValueFn value, GradFn grad = nullptr, Domain domain = Domain::AllSpace)
      : n_(n), value_(std::move(value)), grad_(std::move(grad)), domain_(domain) {
    if (n_ < 1) throw DimensionMismatch("field dimension must be >= 1");
    if (!value_) throw Error("field needs a value evaluator");
  }

  int dim() const { return n_; }
  Domain domain() const { return domain_; }
  bool has_gradient() const { return static_cast<bool>(grad_); }

  double operator()(const Vec& x) const {
    check(x);
    return value_(x);
  }

  Vec gradient(const Vec& x) const {
    if (!grad_) throw Error("field has no analytic gradient");
    check(x);
    return grad_(x);
  }

 private:
  void check(const Vec& x) const {
    if (x.size() != n_)
      throw DimensionMismatch("point of size " + std::to_string(x.size()) +
                              " passed to a field on R^" + std::to_string(n_));
    if (domain_ == Domain::Punctured && x.norm() == 0.0)
      throw ZeroVector("field is defined on R^n minus the origin");
  }

  int n_;
  ValueFn value_;
  GradFn grad_;
  Domain domain_;
};

/// Smooth bump exp(-1/(1 - |x-c|^2/rho^2)) on |x-c| < rho, identically zero
/// outside. Plays the test function phi in weak-form integrals.
class BumpFunction {
 public:
  BumpFunction(Vec center, double radius) : c_(std::move(center)), rho_(radius) {
    if (!(rho_ > 0.0)) throw Error("bump radius must be positive");
  }

  const Vec& center() const { return c_; }
  double radius() const { return rho_; }
  int dim() const { return static_cast<int>(c_.size()); }

  double operator()(const Vec& x) const {
    const double s = (x - c_).squaredNorm() / (rho_ * rho_);
    return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
  }

  Vec gradient(const Vec& x) const {
    const Vec d = x - c_;
    const double s = d.squaredNorm() / (rho_ * rho_);
    if (s >= 1.0) return Vec::Zero(c_.size());
    const double one_m = 1.0 - s;
    return (-2.0 / (rho_ * rho_) * std::exp(-1.0 / one_m) / (one_m * one_m)) * d;
  }

  ScalarField field() const {
    BumpFunction copy = *this;
    return ScalarField(
        dim(), [copy](const Vec& x) { return copy(x); },
        [copy](const Vec& x) { return copy.gradient(x); });
  }

 private:
  Vec c_;
  double rho_;
};

/// Multivariate polynomial as a multi-index coefficient table. Supports exact
/// (table-level) differentiation, which is how harmonicity preconditions are
/// checked without a numeric tolerance.
class Polynomial {
 public:
  using Terms = std::map<std::vector<int>, double>;

  explicit Polynomial(int n) : n_(n) {
    if (n_ < 1) throw DimensionMismatch("polynomial dimension must be >= 1");
  }

  Polynomial(int n, const Terms& terms) : Polynomial(n) {
    for (const auto& [mi, c] : terms) add_term(mi, c);
  }

  void add_term(const std::vector<int>& exponents, double coeff) {
    if (static_cast<int>(exponents.size()) != n_)
      throw DimensionMismatch("multi-index size does not match dimension");
    for (int e : exponents)
      if (e < 0) throw Error("negative exponent in polynomial term");
    terms_[exponents] += coeff;
  }

  int dim() const { return n_; }
  const Terms& terms() const { return terms_; }

  double value(const Vec& x) const {
    double acc = 0.0;
    for (const auto& [mi, c] : terms_) {
      double t = c;
      for (int i = 0; i < n_; ++i) t *= ipow(x[i], mi[i]);
      acc += t;
    }
    return acc;
  }

  Vec gradient(const Vec& x) const {
    Vec g = Vec::Zero(n_);
    for (const auto& [mi, c] : terms_) {
      for (int i = 0; i < n_; ++i) {
        if (mi[i] == 0) continue;
        double t = c * mi[i] * ipow(x[i], mi[i] - 1);
        for (int j = 0; j < n_; ++j)
          if (j != i) t *= ipow(x[j], mi[j]);
        g[i] += t;
      }
    }
    return g;
  }

  /// Term-wise Laplacian on the coefficient table; exact.
  Polynomial laplacian() const {
    Polynomial out(n_);
    for (const auto& [mi, c] : terms_) {
      for (int i = 0; i < n_; ++i) {
        if (mi[i] < 2) continue;
        std::vector<int> d = mi;
        d[i] -= 2;
        out.add_term(d, c * mi[i] * (mi[i] - 1));
      }
    }
    return out;
  }

  /// True when every accumulated coefficient is exactly zero.
  bool is_zero() const {
    for (const auto& [mi, c] : terms_)
      if (c != 0.0) return false;
    return true;
  }

  ScalarField field() const {
    Polynomial copy = *this;
    return ScalarField(
        n_, [copy](const Vec& x) { return copy.value(x); },
        [copy](const Vec& x) { return copy.gradient(x); });
  }

 private:
  static double ipow(double base, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= base;
    return r;
  }

  int n_;
  Terms terms_;
};

/// Central-difference gradient, second-order accurate. Step h must keep the
/// whole stencil inside the field's domain.
inline Vec fd_gradient(const ScalarField& u, const Vec& x, double h) {
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  if (x.size() != u.dim()) throw DimensionMismatch("fd_gradient point size mismatch");
  if (u.domain() == Domain::Punctured && x.norm() <= h)
    throw OutOfDomain("stencil of radius " + std::to_string(h) + " reaches the puncture");
  const int n = u.dim();
  Vec g(n), e = x;
  for (int i = 0; i < n; ++i) {
    e[i] = x[i] + h;
    const double up = u(e);
    e[i] = x[i] - h;
    const double dn = u(e);
    e[i] = x[i];
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

/// Central-difference divergence of a vector field evaluator.
inline double fd_divergence(const std::function<Vec(const Vec&)>& flux_field, int n, const Vec& x,
                            double h) {
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  if (x.size() != n) throw DimensionMismatch("fd_divergence point size mismatch");
  double div = 0.0;
  Vec e = x;
  for (int i = 0; i < n; ++i) {
    e[i] = x[i] + h;
    const double up = flux_field(e)[i];
    e[i] = x[i] - h;
    const double dn = flux_field(e)[i];
    e[i] = x[i];
    div += (up - dn) / (2.0 * h);
  }
  return div;
}

/// Default step policies: first derivatives of analytic fluxes, and nested
/// second-difference paths, both scaled by 1 + |x| to balance truncation
/// against rounding in 64-bit arithmetic.
inline double fd_step_first(const Vec& x) { return 1e-5 * (1.0 + x.norm()); }
inline double fd_step_nested(const Vec& x) { return 1e-4 * (1.0 + x.norm()); }

inline ScalarField make_polynomial(const Polynomial::Terms& coeffs, int n) {
  return Polynomial(n, coeffs).field();
}

inline ScalarField make_constant(double c, int n) {
  return ScalarField(
      n, [c](const Vec&) { return c; }, [n](const Vec&) { return Vec::Zero(n); });
}

/// u(x) = h(B^{-1} x) for a classically harmonic polynomial h; such u is
/// annihilated by the Finsler Laplacian of the quadratic norm with M = B^2.
/// Harmonicity of h is verified exactly on the coefficient table.
inline ScalarField make_harmonic_pullback(const Polynomial& h_poly, const SpdMatrix& b) {
  if (h_poly.dim() != b.dim())
    throw DimensionMismatch("polynomial and matrix dimensions differ");
  if (!h_poly.laplacian().is_zero())
    throw NotHarmonic("coefficient-table Laplacian of h is not identically zero");
  const Mat binv = b.inverse();
  Polynomial h = h_poly;
  return ScalarField(
      b.dim(), [h, binv](const Vec& x) { return h.value(binv * x); },
      // B is symmetric, so the pullback gradient B^{-T} grad h(B^{-1}x)
      // is B^{-1} grad h(B^{-1}x).
      [h, binv](const Vec& x) { return Vec(binv * h.gradient(binv * x)); });
}

/// The alpha = 0 Liouville profile u(x) = -2 ln(1 + H*(x)^2 / 8) in the
/// plane, with -Delta^H u = e^u and mass 8 pi det(sqrt M).
inline ScalarField make_liouville_profile(const Norm& hstar) {
  if (hstar.dim() != 2)
    throw DimensionMismatch("Liouville profile is two-dimensional");
  Norm hs = hstar;
  return ScalarField(
      2,
      [hs](const Vec& x) {
        const double v = eval_norm(hs, x);
        return -2.0 * std::log1p(v * v / 8.0);
      },
      // grad u = -(H* grad H*)(x) / (2 (1 + H*^2/8)); the product form keeps
      // the gradient smooth through the origin.
      [hs](const Vec& x) {
        const double v = eval_norm(hs, x);
        return Vec(norm_times_grad(hs, x) / (-2.0 * (1.0 + v * v / 8.0)));
      });
}

}  // namespace finsler
