#pragma once

#include <vector>

#include "bunchlab/errors.hpp"
#include "bunchlab/types.hpp"

namespace bunchlab {

/// Elementwise (Hadamard) product. Returns an Eigen expression; evaluate it
/// within the full expression that calls this.
template <typename DerivedA, typename DerivedB>
auto hadamard(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw DimensionError("hadamard: shape mismatch");
    }
    return A.cwiseProduct(B);
}

/// Full spectrum of a Hermitian matrix. Eigenvalues ascending; eigenvector
/// columns are unit norm, aligned with the eigenvalues, and phase-fixed so
/// that each column's largest-magnitude component is real positive.
struct HermitianEig {
    RVec eigenvalues;
    CMat eigenvectors;
};

HermitianEig hermitian_eig(const CMat& A, const Tolerances& tol = {});

/// Rank-revealing pivoted Cholesky factor of a Hermitian p.s.d. matrix S.
/// C is rank x n with C^dag C = S; row k of C is the vector u^k. Pivots are
/// chosen greedily (largest remaining diagonal, ties to the lowest index),
/// which makes the output deterministic.
struct CholeskyGram {
    CMat C;
    std::vector<Index> pivots;
};

CholeskyGram cholesky_gram(const CMat& S, const Tolerances& tol = {});

/// Gram matrix S_ij = <v_i|v_j> of unit vectors, conjugate-linear in the
/// first argument. Overlaps are normalized by the vector norms and the
/// diagonal is set to exactly 1, so the result is a valid Gram matrix even
/// when the inputs carry norm error at the admitted tolerance.
CMat gram_from_vectors(const std::vector<CVec>& vectors, const Tolerances& tol = {});

/// Largest singular value.
double spectral_norm(const CMat& A);

/// Multiply v by the unit phase that makes its largest-magnitude component
/// (ties to the lowest index) real positive. No-op on the zero vector.
void fix_phase(Eigen::Ref<CVec> v);

/// Largest entry magnitude; 0 for empty matrices.
double max_abs(const CMat& A);

// Validation helpers. Each throws (DimensionError or ValidationError) with
// a message prefixed by `who` when the property fails.
void require_square(const CMat& A, const char* who);
void require_hermitian(const CMat& A, double scaled_tol, const char* who);
void require_psd(const CMat& A, const Tolerances& tol, const char* who);
void require_gram(const CMat& S, const Tolerances& tol, const char* who);
void require_unit_vector(const CVec& v, double tol, const char* who);
void require_unitary(const CMat& U, double tol, const char* who);

}  // namespace bunchlab
