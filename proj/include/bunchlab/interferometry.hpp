#pragma once

#include <cstdint>
#include <vector>

#include "bunchlab/errors.hpp"
#include "bunchlab/types.hpp"

namespace bunchlab {

/// An m-mode linear interferometer, held as its m x m unitary matrix in the
/// (output row, input column) convention: U(l, j) weights input mode j in
/// output mode l.
struct Interferometer {
    Index m = 0;
    CMat U;
};

/// A bunching scenario: n photons enter input modes 0..n-1 of the
/// interferometer and are collected on the output subset K. H is the derived
/// n x n Hermitian p.s.d. matrix H(a, b) = sum over l in K of
/// conj(U(l, a)) U(l, b).
struct BunchingSetup {
    Interferometer interferometer;
    Index n = 0;
    std::vector<Index> subset;  ///< sorted distinct output modes, 0-based
    CMat H;
};

/// One two-mode coupler acting on adjacent modes (mode, mode + 1), 0-based,
/// with 2 x 2 core [[e^{i phi} cos theta, -sin theta],
///                  [e^{i phi} sin theta,  cos theta]].
struct MeshElement {
    Index mode = 0;
    double theta = 0.0;  ///< in [0, pi/2]
    double phi = 0.0;    ///< in [0, 2 pi)
};

/// Rectangular coupler mesh plus per-mode output phases; reconstructs to
/// diag(e^{i output_phases}) times the ordered product of the elements.
struct BeamsplitterMesh {
    Index m = 0;
    std::vector<MeshElement> elements;
    RVec output_phases;
};

/// The 2 x 8 complex matrix whose Gram violates the permanental-dominance
/// inequality of the F matrix by about 1.7 percent.
CMat drury_matrix();

/// A = M^dag M for the matrix above: 8 x 8, Hermitian p.s.d., rank 2.
CMat drury_gram();

/// Scale M so its Gram becomes a contraction with spectral norm exactly 1:
/// alpha = 1 / spectral_norm(M^dag M), B = sqrt(alpha) M.
struct Rescaled {
    CMat B;
    double alpha = 0.0;
};

Rescaled rescale_to_contraction(const CMat& M);

/// Complete a k x m contraction block B (rows with Gram at most I) to an
/// m_total x m_total unitary whose top-left k x m block is exactly B. The
/// k rows are extended with the adjoint of the pivoted Cholesky factor of
/// I - B B^dag; the remaining rows come from seeded Gram-Schmidt over random
/// Gaussian vectors, each phase-fixed, so the result is deterministic for a
/// given seed. Requires m_total >= m + k.
Interferometer complete_to_unitary(const CMat& B, Index m_total, std::uint64_t seed = 0,
                                   const Tolerances& tol = {});

/// Build the BunchingSetup for an interferometer, output subset K (0-based,
/// distinct), and photon count n <= m.
BunchingSetup h_matrix(const Interferometer& itf, std::vector<Index> K, Index n,
                       const Tolerances& tol = {});

/// Decompose a unitary into a rectangular mesh of exactly m(m-1)/2 adjacent
/// two-mode couplers plus output phases. Identity couplers come out in the
/// canonical form theta = 0, phi = 0.
BeamsplitterMesh clements_decompose(const Interferometer& itf, const Tolerances& tol = {});

/// Multiply a mesh back into its unitary.
Interferometer clements_reconstruct(const BeamsplitterMesh& mesh);

/// Feed the collected subset of a setup through a second interferometer
/// stage whose remaining inputs carry vacuum, collecting on all outputs of
/// the second stage. The composite H equals the original H exactly, so every
/// bunching probability is preserved. Only n_extra = 0 (vacuum padding) is
/// supported.
BunchingSetup extend_counterexample(const BunchingSetup& setup1, const Interferometer& U2,
                                    Index n_extra = 0, const Tolerances& tol = {});

}  // namespace bunchlab
