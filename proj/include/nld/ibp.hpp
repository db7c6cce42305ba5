#pragma once

#include <array>

#include "nld/algebra.hpp"
#include "nld/grid.hpp"
#include "nld/weights.hpp"

namespace nld {

/// Real 2-vector field on a 1D grid.
using RealPair = std::array<RealField, 2>;

enum class IbpPart { real_part, imag_part };

/// |LHS - RHS| of the weighted summation-by-parts identity for the real matrix
/// A = alpha_r (real_part) or A = alpha_i (imag_part):
///   int phi f^T A g' = - int phi' f^T A g -/+ int phi g^T A f'
/// with the minus sign for the symmetric part and plus for the antisymmetric part.
double discrete_ibp_defect(const Grid1D& grid, const RealPair& f, const RealPair& g, const WeightSpec& phi,
                           IbpPart part, const AlphaSplit& split);

/// Same with the n = 1 split for imag_part and the split of sigma^1 for real_part.
double discrete_ibp_defect(const Grid1D& grid, const RealPair& f, const RealPair& g, const WeightSpec& phi,
                           IbpPart part);

}  // namespace nld
