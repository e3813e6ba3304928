#pragma once

#include <array>

#include "kmx/types.hpp"

namespace kmx {

Matrix kron(const Matrix& A, const Matrix& B);

/// Swap operator P: x (x) y -> y (x) x, mapping C^{d1} (x) C^{d2} to C^{d2} (x) C^{d1}.
Matrix swap_operator(Index d1, Index d2);

/// Transpose of the first (respectively second) tensor factor of an operator
/// on C^{d1} (x) C^{d2}.
Matrix partial_transpose_first(const Matrix& M, Index d1, Index d2);
Matrix partial_transpose_second(const Matrix& M, Index d1, Index d2);

/// Embeds an operator M acting on legs (a, b) of a three-fold tensor product
/// with dimensions `dims`, identity elsewhere. M is indexed with leg `a` as
/// its first factor and leg `b` as its second; legs are 0-based and distinct.
/// This single utility fixes the embedding convention for every evaluator.
Matrix embed_pair(const Matrix& M, const std::array<Index, 3>& dims, int leg_a, int leg_b);

}  // namespace kmx
