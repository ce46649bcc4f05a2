#include "bunchlab/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bunchlab {

namespace {

constexpr Index kMaxEigOrder = 64;

std::string msg(const char* who, const char* what) {
    return std::string(who) + ": " + what;
}

}  // namespace

double max_abs(const CMat& A) {
    return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

void require_square(const CMat& A, const char* who) {
    if (A.rows() != A.cols()) throw DimensionError(msg(who, "matrix must be square"));
}

void require_hermitian(const CMat& A, double scaled_tol, const char* who) {
    require_square(A, who);
    const double scale = std::max(max_abs(A), 1e-300);
    const double dev = max_abs(A - A.adjoint());
    if (dev > scaled_tol * scale) {
        throw ValidationError(msg(who, "matrix is not Hermitian within tolerance"));
    }
}

void require_psd(const CMat& A, const Tolerances& tol, const char* who) {
    require_hermitian(A, tol.hermitian, who);
    if (A.rows() == 0) return;
    Eigen::SelfAdjointEigenSolver<CMat> solver(A, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError(msg(who, "eigenvalue computation failed"));
    }
    const double lam_max = A.rows() == 0 ? 0.0 : solver.eigenvalues().maxCoeff();
    const double lam_min = A.rows() == 0 ? 0.0 : solver.eigenvalues().minCoeff();
    if (lam_min < -tol.psd * std::max(1.0, lam_max)) {
        throw ValidationError(msg(who, "matrix is not positive semidefinite within tolerance"));
    }
}

void require_gram(const CMat& S, const Tolerances& tol, const char* who) {
    require_hermitian(S, tol.gram_hermitian, who);
    if (S.rows() == 0) return;
    for (Index i = 0; i < S.rows(); ++i) {
        if (std::abs(S(i, i) - Complex(1.0)) > tol.unit_diagonal) {
            throw ValidationError(msg(who, "Gram matrix diagonal must be 1"));
        }
    }
    Eigen::SelfAdjointEigenSolver<CMat> solver(S, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError(msg(who, "eigenvalue computation failed"));
    }
    const double lam_max = S.rows() == 0 ? 0.0 : solver.eigenvalues().maxCoeff();
    const double lam_min = S.rows() == 0 ? 0.0 : solver.eigenvalues().minCoeff();
    if (lam_min < -tol.psd * std::max(1.0, lam_max)) {
        throw ValidationError(msg(who, "Gram matrix is not positive semidefinite"));
    }
}

void require_unit_vector(const CVec& v, double tol, const char* who) {
    if (std::abs(v.norm() - 1.0) > tol) {
        throw ValidationError(msg(who, "vector must have unit norm"));
    }
}

void require_unitary(const CMat& U, double tol, const char* who) {
    require_square(U, who);
    const CMat gram = U.adjoint() * U;
    const double dev = max_abs(gram - CMat::Identity(U.rows(), U.cols()));
    if (dev > tol) throw ValidationError(msg(who, "matrix is not unitary within tolerance"));
}

void fix_phase(Eigen::Ref<CVec> v) {
    Index best = 0;
    double best_mag = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    if (best_mag <= 0.0) return;
    const Complex phase = v(best) / best_mag;
    v *= std::conj(phase);
}

HermitianEig hermitian_eig(const CMat& A, const Tolerances& tol) {
    require_hermitian(A, tol.hermitian, "hermitian_eig");
    if (A.rows() > kMaxEigOrder) {
        throw SizeCapError("hermitian_eig: order exceeds cap of 64");
    }
    // Eigen requires an exactly self-adjoint view; symmetrize the admitted
    // deviation away first.
    const CMat H = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> solver(H);
    if (solver.info() != Eigen::Success) {
        throw NumericError("hermitian_eig: eigensolver did not converge");
    }
    HermitianEig out;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    for (Index j = 0; j < out.eigenvectors.cols(); ++j) {
        fix_phase(out.eigenvectors.col(j));
    }
    return out;
}

CholeskyGram cholesky_gram(const CMat& S, const Tolerances& tol) {
    require_hermitian(S, tol.hermitian, "cholesky_gram");
    const Index n = S.rows();
    if (n == 0) return {CMat(0, 0), {}};

    Eigen::SelfAdjointEigenSolver<CMat> solver(0.5 * (S + S.adjoint()), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("cholesky_gram: eigenvalue computation failed");
    }
    const double lam_max = solver.eigenvalues().maxCoeff();
    const double lam_min = solver.eigenvalues().minCoeff();
    if (lam_min < -tol.psd * std::max(1.0, lam_max)) {
        throw ValidationError("cholesky_gram: matrix is indefinite beyond tolerance");
    }
    const double cutoff = tol.rank * std::max(lam_max, 0.0);

    CMat residual = S;
    CMat rows(n, n);
    std::vector<Index> pivots;
    Index rank = 0;
    while (rank < n) {
        Index p = 0;
        double d = residual(0, 0).real();
        for (Index i = 1; i < n; ++i) {
            const double di = residual(i, i).real();
            if (di > d) {
                d = di;
                p = i;
            }
        }
        if (d <= cutoff) break;
        const double root = std::sqrt(d);
        rows.row(rank) = residual.row(p) / root;
        residual.noalias() -= rows.row(rank).adjoint() * rows.row(rank);
        pivots.push_back(p);
        ++rank;
    }
    CholeskyGram out;
    out.C = rows.topRows(rank);
    out.pivots = std::move(pivots);
    const double err = max_abs(out.C.adjoint() * out.C - S);
    if (err > 1e-9 * std::max(1.0, lam_max)) {
        throw NumericError("cholesky_gram: factor does not reproduce the input");
    }
    return out;
}

CMat gram_from_vectors(const std::vector<CVec>& vectors, const Tolerances& tol) {
    const Index n = static_cast<Index>(vectors.size());
    if (n == 0) throw ValidationError("gram_from_vectors: need at least one vector");
    const Index dim = vectors[0].size();
    for (const CVec& v : vectors) {
        if (v.size() != dim) {
            throw DimensionError("gram_from_vectors: vectors must share one dimension");
        }
        require_unit_vector(v, tol.unit_norm, "gram_from_vectors");
    }
    CMat S(n, n);
    for (Index i = 0; i < n; ++i) {
        S(i, i) = Complex(1.0);
        for (Index j = i + 1; j < n; ++j) {
            const Complex overlap = vectors[i].dot(vectors[j]) / (vectors[i].norm() * vectors[j].norm());
            S(i, j) = overlap;
            S(j, i) = std::conj(overlap);
        }
    }
    return S;
}

double spectral_norm(const CMat& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(A);
    return svd.singularValues()(0);
}

}  // namespace bunchlab
