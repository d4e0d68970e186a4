#pragma once

#include <vector>

#include "lueq/types.hpp"

namespace lueq {

// Column-stacking: [a_11,...,a_M1, a_12,...,a_M2, ..., a_1N,...,a_MN].
ComplexVector vec(const ComplexMatrix& a);

// Inverse of vec; vec(unvec(v, r, c)) == v exactly.
ComplexMatrix unvec(const ComplexVector& v, int rows, int cols);

// Realignment of an MN x MN matrix Z viewed as an M x M grid of N x N blocks:
// the row for block (i, j) -- placed at row index j*M + i (column-major over the
// block position) -- is vec(Z_ij)^T. Satisfies realign(A (x) B) = vec(A) vec(B)^T.
ComplexMatrix realign(const ComplexMatrix& z, int m, int n);

// Composite-index permutation that moves subsystem i (1-based) to the front,
// keeping the relative order of the others. Entry p[old] = new row index.
std::vector<int> front_permutation(const MultipartiteDims& dims, int i);

// Conjugates rows and columns of T by front_permutation(dims, i).
ComplexMatrix permute_subsystem_front(const ComplexMatrix& t, const MultipartiteDims& dims, int i);

// Realignment of T across the bipartition i | (everything else), i 1-based.
// Equals realign(permute_subsystem_front(T, dims, i), N_i, total/N_i).
ComplexMatrix realign_bipartition(const ComplexMatrix& t, const MultipartiteDims& dims, int i);

// Kronecker product of the factors in listed order.
ComplexMatrix tensor_product(const std::vector<ComplexMatrix>& factors);

// Transposes the indices of subsystem k only (1-based). Involution.
ComplexMatrix partial_transpose_matrix(const ComplexMatrix& t, const MultipartiteDims& dims, int k);

// Transposes every subsystem in the (1-based) subset in turn.
ComplexMatrix partial_transpose_matrix(const ComplexMatrix& t, const MultipartiteDims& dims,
                                       const std::vector<int>& subsystems);

// State-level partial transpose; the result is mode Hermitian (a partial
// transpose of a density matrix need not stay positive).
MultipartiteState partial_transpose(const MultipartiteState& s, int k);
MultipartiteState partial_transpose(const MultipartiteState& s, const std::vector<int>& subsystems);

// Traces out subsystem k (1-based); result side = total / N_k.
ComplexMatrix partial_trace(const ComplexMatrix& t, const MultipartiteDims& dims, int k);

}  // namespace lueq
