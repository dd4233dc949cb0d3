#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "finsler/errors.hpp"
#include "finsler/rng.hpp"
#include "finsler/spd.hpp"
#include "finsler/types.hpp"

namespace finsler {

enum class NormKind { Quadratic, QNorm };

/// Closed family of norms on R^n:
///   Quadratic:  H(xi) = sqrt(<M xi, xi>) for an SPD matrix M,
///   QNorm:      H(xi) = (sum_i |xi_i|^q)^(1/q) with q > 1.
/// Both members are 1-homogeneous, positive away from 0, and admit closed-form
/// value, gradient, Hessian of H^2, and dual norm. The family is deliberately
/// closed: every operation below needs analytic derivatives.
class Norm {
 public:
  static Norm quadratic(SpdMatrix m) {
    const int n = m.dim();
    return Norm(NormKind::Quadratic, n, std::move(m), 0.0);
  }

  static Norm euclidean(int n) { return quadratic(SpdMatrix::identity(n)); }

  static Norm qnorm(double q, int n) {
    if (!(q > 1.0)) throw Error("q-norm exponent must be > 1, got " + std::to_string(q));
    if (n < 2) throw DimensionMismatch("norm dimension must be >= 2");
    return Norm(NormKind::QNorm, n, std::nullopt, q);
  }

  NormKind kind() const { return kind_; }
  int dim() const { return n_; }
  bool is_quadratic() const { return kind_ == NormKind::Quadratic; }

  const SpdMatrix& matrix() const {
    if (!m_) throw UnsupportedNorm("norm is not quadratic");
    return *m_;
  }

  double exponent() const {
    if (kind_ != NormKind::QNorm) throw UnsupportedNorm("norm is not a q-norm");
    return q_;
  }

  /// Equivalence constants a, b with a|xi| <= H(xi) <= b|xi|.
  std::pair<double, double> equivalence_bounds() const {
    if (kind_ == NormKind::Quadratic) {
      const Vec& ev = m_->eigenvalues();
      return {std::sqrt(ev[0]), std::sqrt(ev[ev.size() - 1])};
    }
    const double c = std::pow(static_cast<double>(n_), 1.0 / q_ - 0.5);
    return {std::min(1.0, c), std::max(1.0, c)};
  }

 private:
  Norm(NormKind kind, int n, std::optional<SpdMatrix> m, double q)
      : kind_(kind), n_(n), m_(std::move(m)), q_(q) {}

  NormKind kind_;
  int n_;
  std::optional<SpdMatrix> m_;
  double q_;
};

namespace detail {

inline void check_dim(const Norm& h, Eigen::Index size) {
  if (size != h.dim())
    throw DimensionMismatch("vector of size " + std::to_string(size) +
                            " passed to a norm on R^" + std::to_string(h.dim()));
}

}  // namespace detail

/// H(xi). Zero iff xi = 0.
template <typename Derived>
double eval_norm(const Norm& h, const Eigen::MatrixBase<Derived>& xi) {
  detail::check_dim(h, xi.size());
  if (h.kind() == NormKind::Quadratic) {
    const double q = (h.matrix().matrix() * xi.derived()).dot(xi.derived());
    return std::sqrt(std::max(q, 0.0));
  }
  const double q = h.exponent();
  const double m = xi.derived().cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  const double s = (xi.derived().cwiseAbs() / m).array().pow(q).sum();
  return m * std::pow(s, 1.0 / q);
}

/// H(xi) * grad H(xi) = grad(H^2)(xi) / 2. Unlike grad H alone this is
/// well defined for every xi != 0 in both families (for the q-norm the
/// components are sign(xi_i) |xi_i|^{q-1} S^{2/q-1}, finite also on the
/// coordinate hyperplanes), and it extends continuously by 0 at the origin.
template <typename Derived>
Vec norm_times_grad(const Norm& h, const Eigen::MatrixBase<Derived>& xi) {
  detail::check_dim(h, xi.size());
  if (h.kind() == NormKind::Quadratic) return h.matrix().matrix() * xi.derived();
  const double q = h.exponent();
  const double m = xi.derived().cwiseAbs().maxCoeff();
  const int n = h.dim();
  if (m == 0.0) return Vec::Zero(n);
  const Vec t = xi.derived() / m;
  const double s = t.cwiseAbs().array().pow(q).sum();
  const double factor = m * std::pow(s, 2.0 / q - 1.0);
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(t[i]);
    out[i] = (a == 0.0) ? 0.0 : factor * ((t[i] > 0) - (t[i] < 0)) * std::pow(a, q - 1.0);
  }
  return out;
}

/// grad H(xi) for xi != 0. For q-norms with q < 2 the gradient field is not
/// C^1 across coordinate hyperplanes; such points are rejected instead of
/// returning a subgradient.
inline Vec grad_norm(const Norm& h, const Vec& xi) {
  detail::check_dim(h, xi.size());
  const int n = h.dim();
  if (xi.norm() == 0.0) throw ZeroVector("grad_norm at the origin");
  if (h.kind() == NormKind::Quadratic) {
    Vec mx = h.matrix().matrix() * xi;
    return mx / std::sqrt(mx.dot(xi));
  }
  const double q = h.exponent();
  if (q < 2.0) {
    for (int i = 0; i < n; ++i)
      if (xi[i] == 0.0)
        throw SingularGradient("q-norm with q < 2 has a singular gradient on coordinate " +
                               std::to_string(i));
  }
  const double m = xi.cwiseAbs().maxCoeff();
  const Vec t = xi / m;
  const double s = t.cwiseAbs().array().pow(q).sum();
  const double factor = std::pow(s, (1.0 - q) / q);
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(t[i]);
    out[i] = (a == 0.0) ? 0.0 : factor * ((t[i] > 0) - (t[i] < 0)) * std::pow(a, q - 1.0);
  }
  return out;
}

/// Hessian of H^2 at xi != 0. Constant (= 2M) exactly in the quadratic case;
/// that constancy is what recover_quadratic tests.
inline Mat hessian_normsq(const Norm& h, const Vec& xi) {
  detail::check_dim(h, xi.size());
  const int n = h.dim();
  if (xi.norm() == 0.0) throw ZeroVector("hessian_normsq at the origin");
  if (h.kind() == NormKind::Quadratic) return 2.0 * h.matrix().matrix();
  const double q = h.exponent();
  if (q == 2.0) return 2.0 * Mat::Identity(n, n);
  if (q < 2.0) {
    for (int i = 0; i < n; ++i)
      if (xi[i] == 0.0)
        throw SingularGradient("q-norm Hessian singular on coordinate " + std::to_string(i));
  }
  // H^2 = S^{2/q}, S = sum |xi_i|^q. With v_i = sign(xi_i)|xi_i|^{q-1}:
  //   D^2(H^2) = 2(2-q) S^{2/q-2} v v^T + 2(q-1) S^{2/q-1} diag(|xi_i|^{q-2}).
  // Both terms are 0-homogeneous, so evaluate on xi scaled by its max entry.
  const double m = xi.cwiseAbs().maxCoeff();
  const Vec t = xi / m;
  const double s = t.cwiseAbs().array().pow(q).sum();
  Vec v(n), d(n);
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(t[i]);
    v[i] = (a == 0.0) ? 0.0 : ((t[i] > 0) - (t[i] < 0)) * std::pow(a, q - 1.0);
    d[i] = (a == 0.0) ? 0.0 : std::pow(a, q - 2.0);
  }
  Mat out = (2.0 * (2.0 - q) * std::pow(s, 2.0 / q - 2.0)) * (v * v.transpose());
  out += (2.0 * (q - 1.0) * std::pow(s, 2.0 / q - 1.0)) * d.asDiagonal().toDenseMatrix();
  return out;
}

/// Dual norm H*(x) = sup_{H(xi) < 1} <x, xi> in closed form:
/// Quadratic(M) -> Quadratic(M^{-1}), QNorm(q) -> QNorm(q/(q-1)).
inline Norm dual_norm(const Norm& h) {
  if (h.kind() == NormKind::Quadratic)
    return Norm::quadratic(SpdMatrix::validate(h.matrix().inverse()));
  const double q = h.exponent();
  return Norm::qnorm(q / (q - 1.0), h.dim());
}

namespace detail {

/// Direction grids used by the numeric dual: angle grid (n=2), Fibonacci
/// sphere (n=3), seeded quasi-random directions otherwise.
inline std::vector<Vec> direction_grid(int n, int density) {
  std::vector<Vec> grid;
  grid.reserve(density);
  if (n == 2) {
    for (int k = 0; k < density; ++k) {
      const double th = 2.0 * kPi * k / density;
      Vec w(2);
      w << std::cos(th), std::sin(th);
      grid.push_back(std::move(w));
    }
  } else if (n == 3) {
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int k = 0; k < density; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / density;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = 2.0 * kPi * k / golden;
      Vec w(3);
      w << r * std::cos(phi), r * std::sin(phi), z;
      grid.push_back(std::move(w));
    }
  } else {
    Rng rng(0x4655ULL * 31 + static_cast<std::uint64_t>(n));
    for (int k = 0; k < density; ++k) grid.push_back(rng.sphere_dir(n));
  }
  return grid;
}

}  // namespace detail

/// H*(x) from the support-function definition: maximizes <x, w>/H(w) over
/// unit directions w (equivalent to the sup over the unit ball of H by
/// homogeneity). Grid scan followed by 20 projected-ascent steps.
inline double dual_eval_numeric(const Norm& h, const Vec& x, int grid_density) {
  detail::check_dim(h, x.size());
  if (grid_density < 16) throw Error("dual_eval_numeric needs grid_density >= 16");
  if (x.norm() == 0.0) return 0.0;
  const int n = h.dim();
  auto value = [&](const Vec& w) { return x.dot(w) / eval_norm(h, w); };

  Vec w;
  double fw = -std::numeric_limits<double>::infinity();
  for (const Vec& g : detail::direction_grid(n, grid_density)) {
    const double f = value(g);
    if (f > fw) {
      fw = f;
      w = g;
    }
  }

  double step = 3.0 / grid_density;
  for (int it = 0; it < 20; ++it) {
    Vec grad;
    try {
      const double hw = eval_norm(h, w);
      grad = x / hw - (x.dot(w) / (hw * hw)) * grad_norm(h, w);
    } catch (const SingularGradient&) {
      // Iterate landed exactly on the q<2 singular set; nudge off it.
      w = (w + Vec::Constant(n, 1e-9)).normalized();
      continue;
    }
    Vec tang = grad - grad.dot(w) * w;
    const double tn = tang.norm();
    if (tn < 1e-15 * (1.0 + grad.norm())) break;
    tang /= tn;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Vec trial = (w + step * tang).normalized();
      const double ft = value(trial);
      if (ft > fw) {
        w = trial;
        fw = ft;
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return fw;
}

/// Residual of the Ferone-Kawohl pairing
///   <H(x) grad H(x), H*(y) grad H*(y)> - <x, y>,
/// identically zero for quadratic norms. Evaluated through norm_times_grad,
/// which stays finite on the q-norm singular set.
inline double check_fk_condition(const Norm& h, const Norm& hstar, const Vec& x, const Vec& y) {
  detail::check_dim(h, x.size());
  detail::check_dim(hstar, y.size());
  if (x.norm() == 0.0 || y.norm() == 0.0)
    throw ZeroVector("check_fk_condition needs x != 0 and y != 0");
  return norm_times_grad(h, x).dot(norm_times_grad(hstar, y)) - x.dot(y);
}

inline double check_fk_condition(const Norm& h, const Vec& x, const Vec& y) {
  return check_fk_condition(h, dual_norm(h), x, y);
}

/// Tests whether H is quadratic by probing constancy of the Hessian of H^2
/// across the samples; on success returns M = (first Hessian)/2. Samples must
/// be nonzero and pairwise non-parallel.
inline std::optional<SpdMatrix> recover_quadratic(const Norm& h, const std::vector<Vec>& samples) {
  if (samples.size() < 2) throw TooFewSamples("recover_quadratic needs at least 2 samples");
  for (const Vec& s : samples)
    if (s.norm() == 0.0) throw ZeroVector("recover_quadratic sample at the origin");
  const Mat c1 = hessian_normsq(h, samples[0]);
  const double scale = c1.cwiseAbs().maxCoeff();
  double dev = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    dev = std::max(dev, (hessian_normsq(h, samples[i]) - c1).cwiseAbs().maxCoeff());
    if (dev > 1e-8 * scale) return std::nullopt;
  }
  try {
    return SpdMatrix::validate(0.5 * c1);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace finsler
