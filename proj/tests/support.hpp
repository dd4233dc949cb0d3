#pragma once

#include <cmath>
#include <vector>

#include "finsler/field.hpp"
#include "finsler/norm.hpp"
#include "finsler/rng.hpp"
#include "finsler/spd.hpp"
#include "finsler/types.hpp"

namespace testsupport {

using finsler::Mat;
using finsler::Polynomial;
using finsler::Rng;
using finsler::Vec;

/// Random SPD matrix Q diag(ev) Q^T with condition number at most cond_max
/// (log-uniform) and a log-uniform overall scale.
inline Mat random_spd(Rng& rng, int n, double cond_max) {
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
  const double cond = std::exp(rng.uniform(0.0, std::log(cond_max)));
  Vec ev(n);
  ev[0] = 1.0;
  ev[n - 1] = 1.0 / cond;
  for (int i = 1; i < n - 1; ++i) ev[i] = std::exp(rng.uniform(-std::log(cond), 0.0));
  const double scale = std::exp(rng.uniform(-2.0, 2.0));
  Mat m = q * (scale * ev).asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

inline double max_rel_diff(const Mat& a, const Mat& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// <A y, y> as a polynomial field (A symmetric).
inline Polynomial quadratic_form_poly(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  Polynomial p(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<int> mi(n, 0);
      mi[i] += 1;
      mi[j] += 1;
      p.add_term(mi, i == j ? a(i, i) : 2.0 * a(i, j));
    }
  }
  return p;
}

/// |y|^4 = (sum y_i^2)^2 as a polynomial.
inline Polynomial norm4_poly(int n) {
  Polynomial p(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<int> mi(n, 0);
      mi[i] += 2;
      mi[j] += 2;
      p.add_term(mi, 1.0);
    }
  }
  return p;
}

inline Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

inline Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

}  // namespace testsupport
