#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "finsler/errors.hpp"
#include "finsler/types.hpp"

namespace finsler {

/// Dense symmetric positive definite matrix at small dimension (n >= 2) with
/// the unique SPD square root B (B*B = M) and the inverse cached from a single
/// symmetric eigendecomposition. Immutable after construction, so instances
/// can be shared freely between workers.
class SpdMatrix {
 public:
  /// Validates `raw`: must be square with finite entries; entries are
  /// symmetrized as (raw + raw^T)/2 and the spectrum must satisfy
  /// lambda_min > 1e-12 * lambda_max. Numerically semidefinite input is
  /// rejected, not regularized.
  static SpdMatrix validate(const Mat& raw) {
    if (raw.rows() != raw.cols())
      throw NotSquare("matrix is " + std::to_string(raw.rows()) + "x" +
                      std::to_string(raw.cols()));
    if (raw.rows() < 2)
      throw DimensionMismatch("SpdMatrix needs dimension >= 2, got " +
                              std::to_string(raw.rows()));
    if (!raw.allFinite()) throw NonFinite("matrix has non-finite entries");

    Mat m = 0.5 * (raw + raw.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    if (es.info() != Eigen::Success)
      throw Error("symmetric eigendecomposition did not converge");
    Vec evals = es.eigenvalues();  // ascending
    const double lmax = evals[evals.size() - 1];
    const double lmin = evals[0];
    if (!(lmax > 0.0) || !(lmin > 1e-12 * lmax))
      throw NotPositiveDefinite("matrix not positive definite: smallest eigenvalue " +
                                std::to_string(lmin));
    const Mat& v = es.eigenvectors();
    Mat sqrt = v * evals.array().sqrt().matrix().asDiagonal() * v.transpose();
    Mat inv = v * evals.cwiseInverse().asDiagonal() * v.transpose();
    // Symmetrize away last-bit asymmetry so entries are symmetric as stored.
    sqrt = 0.5 * (sqrt + sqrt.transpose()).eval();
    inv = 0.5 * (inv + inv.transpose()).eval();
    return SpdMatrix(std::move(m), std::move(sqrt), std::move(inv), std::move(evals));
  }

  /// Identity without the eigendecomposition detour.
  static SpdMatrix identity(int n) {
    if (n < 2) throw DimensionMismatch("SpdMatrix needs dimension >= 2");
    Mat id = Mat::Identity(n, n);
    return SpdMatrix(id, id, id, Vec::Ones(n));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  /// The unique SPD matrix B with B*B = matrix().
  const Mat& sqrt() const { return sqrt_; }
  const Mat& inverse() const { return inv_; }
  /// Eigenvalues in ascending order.
  const Vec& eigenvalues() const { return evals_; }

  /// det(B) = prod_i sqrt(lambda_i).
  double det_sqrt() const { return evals_.array().sqrt().prod(); }

  double condition_number() const { return evals_[evals_.size() - 1] / evals_[0]; }

 private:
  SpdMatrix(Mat m, Mat sqrt, Mat inv, Vec evals)
      : m_(std::move(m)), sqrt_(std::move(sqrt)), inv_(std::move(inv)), evals_(std::move(evals)) {}

  Mat m_, sqrt_, inv_;
  Vec evals_;
};

inline SpdMatrix validate_spd(const Mat& raw) { return SpdMatrix::validate(raw); }

/// B = sqrt(M) as a full SpdMatrix (with its own cached sqrt and inverse).
inline SpdMatrix sqrt_spd(const SpdMatrix& m) { return SpdMatrix::validate(m.sqrt()); }

inline const Mat& inverse_spd(const SpdMatrix& m) { return m.inverse(); }

}  // namespace finsler
