#pragma once

#include <vector>

#include "finsler/field.hpp"
#include "finsler/norm.hpp"
#include "finsler/operators.hpp"
#include "finsler/report.hpp"
#include "finsler/sampling.hpp"
#include "finsler/types.hpp"

namespace finsler {

/// Knobs shared by every checker. `corrupt` switches on the checker's
/// built-in negative control (a deliberately wrong matrix or exponent); a
/// harness that cannot fail verifies nothing, so tests exercise this too.
struct CheckOptions {
  double tolerance = 0.0;    // 0 -> the checker's default
  bool corrupt = false;      // negative control
  bool keep_points = false;  // retain the full per-point dump (CSV source)
  bool parallel = false;     // evaluate samples concurrently
};

/// Operator equivalence under x -> Bx, B = sqrt(M): at each sample compares
/// Delta_p u~(x) against (Delta_p^H u)(Bx) for u~ = u o B, and additionally
/// verifies the pointwise identities |grad u~|^2(x) = [H(grad u)]^2(Bx) and
/// grad u~ . grad phi~ = [<M grad u, grad phi>](Bx) on a fixed bump phi.
/// Negative control: pulls back by M instead of B.
VerificationReport check_theorem1(const Norm& h, double p, const ScalarField& u,
                                  const SampleSpec& s, const OperatorConfig& cfg,
                                  const CheckOptions& opt = {});

/// Kelvin duality at p = 2, n >= 3: Delta^{H*} u^(x) versus
/// (Delta^H u)(T_H x) / H(x)^{n+2} for the hat transform u^.
/// Negative control: weight exponent n instead of n + 2.
VerificationReport check_kelvin_p2(const Norm& h, const ScalarField& u, const SampleSpec& s,
                                   const OperatorConfig& cfg, const CheckOptions& opt = {});

/// Kelvin duality at p = n: Delta_n^{H*} u*(x) versus
/// (Delta_n^H u)(T_H x) / H(x)^{2n} for the star transform u* = u o T_H.
/// Negative control: weight exponent 2n - 2.
VerificationReport check_kelvin_pn(const Norm& h, const ScalarField& u, const SampleSpec& s,
                                   const OperatorConfig& cfg, const CheckOptions& opt = {});

/// Mean value property over Wulff balls: volume and anisotropic-surface
/// averages of the harmonic pullback of hpoly must equal its center values.
/// Also reports the Euclidean-measure surface average gap.
/// Negative control: averages over Euclidean balls instead of Wulff balls.
VerificationReport check_mvp(const Norm& h, const Polynomial& hpoly,
                             const std::vector<Vec>& centers, const std::vector<double>& radii,
                             int quad_density, const CheckOptions& opt = {});

/// Liouville profile u = -2 ln(1 + H*^2/8) in the plane: pointwise residual
/// of Delta^H u + e^u at samples, plus the total-mass check
/// integral(e^u) = 8 pi det(B) over [-L, L]^2 with an analytic tail bound.
/// Negative control: profile constant 4 instead of 8.
VerificationReport check_liouville(const Norm& h, const SampleSpec& s, double quad_extent,
                                   int quad_density, const CheckOptions& opt = {});

/// Quadratic-norm classifier: probes Hessian constancy of H^2
/// (recover_quadratic); a recovered M must additionally satisfy the
/// Ferone-Kawohl pairing within tolerance across sampled pairs, echoed in the
/// report. Non-quadratic norms report the largest pairing violation found,
/// always probing the canonical pair ((1,...,1), (1,0,...,0)).
VerificationReport classify_norm(const Norm& h, const SampleSpec& s, const CheckOptions& opt = {});

}  // namespace finsler
