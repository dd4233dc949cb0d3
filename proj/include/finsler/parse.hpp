#pragma once

#include <string>

#include "finsler/field.hpp"
#include "finsler/norm.hpp"
#include "finsler/types.hpp"

namespace finsler {

/// "[[4,0],[0,1]]" (JSON rows) or "4,0;0,1" (inline, semicolon rows).
Mat parse_matrix(const std::string& text);

/// "quad:<matrix>" or "q:<exponent>"; q-norms take their dimension from
/// n_hint.
Norm parse_norm(const std::string& spec, int n_hint);

/// Canonical textual form; parse_norm(norm_to_spec(h), h.dim()) reproduces h.
std::string norm_to_spec(const Norm& h);

/// Monomial-sum mini-language over variables y1..yn:
///   "y1^2+y2^2", "2*y1*y2-3*y1", "0.5*y1^3*y2".
Polynomial parse_polynomial(const std::string& text, int n);

/// "poly:<terms>", "harmonic-pullback:<terms>", "liouville", "constant:<c>".
/// The pullback and Liouville fields derive their geometry from `norm`
/// (required quadratic for those kinds; may be null for the others).
ScalarField parse_field(const std::string& spec, int n, const Norm* norm);

/// "1,0.5,-2" -> vector.
Vec parse_vector(const std::string& text);

}  // namespace finsler
