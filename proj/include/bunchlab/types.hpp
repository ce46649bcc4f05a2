#pragma once

#include <complex>

#include <Eigen/Dense>

namespace bunchlab {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numerical tolerances used by validation and decision logic. Every
/// operation that takes a Tolerances argument applies these defaults
/// unless the caller overrides them.
struct Tolerances {
    /// Hermitian deviation for general inputs, scaled by max |entry|.
    double hermitian = 1e-8;
    /// Hermitian deviation for Gram matrices, scaled by max |entry|.
    double gram_hermitian = 1e-12;
    /// Eigenvalue floor for p.s.d. checks, scaled by max(1, lambda_max).
    double psd = 1e-10;
    /// Allowed deviation of a Gram diagonal entry from 1.
    double unit_diagonal = 1e-12;
    /// Allowed deviation of a vector 2-norm from 1.
    double unit_norm = 1e-10;
    /// Max |U^dag U - I| entry for matrices the library constructs.
    double unitary = 1e-9;
    /// Max |U^dag U - I| entry accepted on externally supplied unitaries.
    double unitary_input = 1e-8;
    /// Pivoted-Cholesky rank cutoff, scaled by lambda_max.
    double rank = 1e-10;
    /// Allowed imaginary residue of nominally real results,
    /// scaled by 1 + |real part|.
    double imag_residue = 1e-10;
    /// Relative margin above 1 at which a conjecture ratio counts as violated.
    double violation = 1e-8;
    /// Eigenvalue gap under which an extreme eigenvalue is flagged degenerate,
    /// scaled by max(1, |eigenvalue|).
    double degenerate_gap = 1e-10;
};

}  // namespace bunchlab
