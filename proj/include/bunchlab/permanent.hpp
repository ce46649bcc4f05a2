#pragma once

#include "bunchlab/errors.hpp"
#include "bunchlab/types.hpp"

namespace bunchlab {

enum class PermAlgorithm { Naive, Ryser };

struct PermanentValue {
    Complex value;
    PermAlgorithm algorithm;
    Index n;
};

/// Permanent by direct summation over all n! permutations. Exact up to
/// floating accumulation; capped at n <= 9. The empty matrix has permanent 1.
PermanentValue permanent_naive(const Eigen::Ref<const CMat>& A);

/// Permanent by Ryser's inclusion-exclusion formula with Gray-code subset
/// iteration and compensated (Kahan) accumulation, O(2^n n) arithmetic with
/// a deterministic summation order. Capped at n <= 30.
PermanentValue permanent_ryser(const Eigen::Ref<const CMat>& A);

/// Permanent of A with row i and column j removed (0-based indices).
/// The permanent of the resulting empty matrix, for n = 1, is 1.
Complex permanent_minor(const Eigen::Ref<const CMat>& A, Index i, Index j);

/// Entrywise product of a matrix with its permanental cofactors:
/// F_ij = A_ij * perm(A with row i and column j removed).
/// Every row and column of F sums to perm(A); for Hermitian p.s.d. A the
/// matrix F is Hermitian p.s.d. as well.
struct FMatrix {
    CMat F;
    Complex source_perm;
};

/// F matrix of a Hermitian p.s.d. matrix, capped at n <= 16. Minors are
/// evaluated concurrently; each entry is computed independently so the
/// result is identical to a sequential evaluation.
FMatrix f_matrix(const CMat& A, const Tolerances& tol = {});

/// Permanent of A + B expanded as a sum over pairs of index subsets:
/// sum over r and over row/column subsets alpha, beta of size r of
/// perm(A[alpha, beta]) * perm(B with alpha, beta removed). Capped at n <= 6.
Complex minc_sum_expansion(const Eigen::Ref<const CMat>& A, const Eigen::Ref<const CMat>& B);

}  // namespace bunchlab
