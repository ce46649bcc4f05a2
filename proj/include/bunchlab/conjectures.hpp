#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bunchlab/errors.hpp"
#include "bunchlab/types.hpp"

namespace bunchlab {

/// Outcome of testing one permanent inequality on one matrix (pair).
/// ratio > 1 + tolerance counts as a violation; the tolerance separates
/// genuine margins from floating noise and is recorded alongside.
struct ConjectureVerdict {
    std::string conjecture;  ///< "M1" or "M2"
    double ratio = 0.0;
    double margin = 0.0;     ///< ratio - 1
    double tolerance = 1e-8;
    bool violated = false;
    bool degenerate = false;  ///< reference permanent vanished; ratio meaningless
    Index trial = -1;         ///< index within a search run, -1 otherwise
    CMat witness;             ///< the tested matrix (search results only)
    CVec witness_vector;      ///< extremal eigenvector for M2
};

/// Tests perm(A o B) <= perm(A) prod_i B_ii for p.s.d. A, B of order
/// n <= 12. A vanishing right-hand side yields a degenerate verdict.
ConjectureVerdict check_m1(const CMat& A, const CMat& B, const Tolerances& tol = {});

/// Tests lambda_max(F) <= perm(A) where F_ij = A_ij perm(A(i,j)) is the
/// permanental-cofactor matrix, for p.s.d. A of order n <= 14. The verdict
/// carries lambda_max(F)/perm(A) and the top eigenvector as witness.
ConjectureVerdict check_m2(const CMat& A, const Tolerances& tol = {});

/// The rank-2 Gram B(eps) with columns (1, eps v_i) / sqrt(1 + eps^2 |v_i|^2):
///   B_ij = (1 + eps^2 conj(v_i) v_j) / sqrt((1 + eps^2 |v_i|^2)(1 + eps^2 |v_j|^2)),
/// unit diagonal exactly. B(0) is the all-ones matrix.
CMat theorem1_gram(const CVec& v, double epsilon);

struct Theorem1Report {
    std::vector<double> epsilons;
    std::vector<double> measured;   ///< perm(A o B(eps))
    std::vector<double> predicted;  ///< perm(A) + eps^2 (v^dag F v - perm(A))
    std::vector<double> residuals;  ///< measured - predicted, O(eps^4)
    std::vector<double> m1_ratios;  ///< measured / perm(A); > 1 violates M1
    double loglog_slope = 0.0;      ///< fit of log|residual| vs log eps, ~4
    double quadratic_coefficient = 0.0;  ///< v^dag F v - perm(A)
    double perm_a = 0.0;
};

/// Expands perm(A o B(eps)) around eps = 0 and compares against the exact
/// quadratic prediction. Requires a unit direction vector and eps in (0, 1].
Theorem1Report verify_theorem1(const CMat& A, const CVec& v,
                               const std::vector<double>& epsilons,
                               const Tolerances& tol = {});

/// Samples p.s.d. matrices G^dag G with G of shape k x n, k uniform in
/// {2,...,n}, entries standard complex Gaussian, one generator per trial
/// derived from (seed, trial). Runs check_m2 on each and returns verdicts
/// with ratio > 1 - 1e-6, sorted by ratio descending. Matrices in `inject`
/// replace the leading trials. 2 <= n <= 10.
std::vector<ConjectureVerdict> random_violation_search(Index n, Index trials,
                                                       std::uint64_t seed,
                                                       const std::vector<CMat>& inject = {},
                                                       const Tolerances& tol = {});

}  // namespace bunchlab
