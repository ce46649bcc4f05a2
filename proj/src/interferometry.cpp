#include "bunchlab/interferometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bunchlab/matcore.hpp"

namespace bunchlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double arg_or_zero(Complex z) {
    return z == Complex(0.0) ? 0.0 : std::arg(z);
}

double normalize_phase(double phi) {
    phi = std::fmod(phi, 2.0 * kPi);
    if (phi < 0.0) phi += 2.0 * kPi;
    return phi;
}

// 2 x 2 coupler core.
Eigen::Matrix2cd coupler(double theta, double phi) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Complex e = std::exp(Complex(0.0, phi));
    Eigen::Matrix2cd t;
    t << e * c, -s, e * s, c;
    return t;
}

void apply_left(CMat& V, Index p, double theta, double phi) {
    const Eigen::Matrix2cd t = coupler(theta, phi);
    const CMat rows = V.middleRows(p, 2);
    V.middleRows(p, 2) = t * rows;
}

void apply_right_inverse(CMat& V, Index p, double theta, double phi) {
    const Eigen::Matrix2cd t = coupler(theta, phi).adjoint();
    const CMat cols = V.middleCols(p, 2);
    V.middleCols(p, 2) = cols * t;
}

void apply_right(CMat& V, Index p, double theta, double phi) {
    const Eigen::Matrix2cd t = coupler(theta, phi);
    const CMat cols = V.middleCols(p, 2);
    V.middleCols(p, 2) = cols * t;
}

}  // namespace

CMat drury_matrix() {
    static const double re[2][8] = {{-7, 9, -6, 3, 7, 4, 0, 5}, {4, 1, -8, -7, 1, 1, 8, 1}};
    static const double im[2][8] = {{4, -3, 2, 4, 6, -4, 1, -8}, {-5, 4, -2, 4, -4, -8, -6, -3}};
    CMat M(2, 8);
    for (Index r = 0; r < 2; ++r) {
        for (Index c = 0; c < 8; ++c) {
            M(r, c) = Complex(re[r][c], im[r][c]);
        }
    }
    return M;
}

CMat drury_gram() {
    const CMat M = drury_matrix();
    CMat A = M.adjoint() * M;
    return 0.5 * (A + A.adjoint());
}

Rescaled rescale_to_contraction(const CMat& M) {
    if (M.rows() > M.cols()) {
        throw DimensionError("rescale_to_contraction: need k <= m for a k x m block");
    }
    const double norm = spectral_norm(M.adjoint() * M);
    if (norm <= 0.0) {
        throw DegenerateError("rescale_to_contraction: zero matrix cannot be rescaled");
    }
    Rescaled out;
    out.alpha = 1.0 / norm;
    out.B = std::sqrt(out.alpha) * M;
    return out;
}

Interferometer complete_to_unitary(const CMat& B, Index m_total, std::uint64_t seed,
                                   const Tolerances& tol) {
    const Index k = B.rows();
    const Index m = B.cols();
    if (k == 0 || m == 0) throw DimensionError("complete_to_unitary: empty block");
    if (m_total < m + k) {
        throw DimensionError("complete_to_unitary: need m_total >= m + k");
    }
    CMat gap = CMat::Identity(k, k) - B * B.adjoint();
    gap = 0.5 * (gap + gap.adjoint());
    {
        Eigen::SelfAdjointEigenSolver<CMat> solver(gap, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw NumericError("complete_to_unitary: eigenvalue computation failed");
        }
        if (solver.eigenvalues().minCoeff() < -tol.psd) {
            throw ValidationError("complete_to_unitary: block is not a contraction");
        }
    }
    const CholeskyGram chol = cholesky_gram(gap, tol);
    const Index extra = chol.C.rows();

    CMat U = CMat::Zero(m_total, m_total);
    U.topLeftCorner(k, m) = B;
    U.block(0, m, k, extra) = chol.C.adjoint();

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Index row = k; row < m_total; ++row) {
        CVec w(m_total);
        for (int attempt = 0; attempt < 64; ++attempt) {
            for (Index c = 0; c < m_total; ++c) {
                const double re = gauss(gen);
                const double im = gauss(gen);
                w(c) = Complex(re, im);
            }
            // two Gram-Schmidt passes for numerical orthogonality
            for (int pass = 0; pass < 2; ++pass) {
                for (Index prev = 0; prev < row; ++prev) {
                    const CVec q = U.row(prev).transpose();
                    w -= q.dot(w) * q;
                }
            }
            if (w.norm() > 1e-6) break;
            w.setZero();
        }
        if (w.norm() <= 1e-6) {
            throw NumericError("complete_to_unitary: could not generate an orthogonal row");
        }
        w /= w.norm();
        fix_phase(w);
        U.row(row) = w.transpose();
    }
    require_unitary(U, tol.unitary, "complete_to_unitary");
    const double block_err = max_abs(U.topLeftCorner(k, m) - B);
    if (block_err > 1e-10) {
        throw NumericError("complete_to_unitary: top-left block was perturbed");
    }
    return {m_total, std::move(U)};
}

BunchingSetup h_matrix(const Interferometer& itf, std::vector<Index> K, Index n,
                       const Tolerances& tol) {
    const Index m = itf.U.rows();
    if (itf.m != m) throw ValidationError("h_matrix: interferometer mode count mismatch");
    require_unitary(itf.U, tol.unitary_input, "h_matrix");
    if (n < 1 || n > m) throw ValidationError("h_matrix: need 1 <= n <= m");
    if (K.empty()) throw ValidationError("h_matrix: output subset must be nonempty");
    std::sort(K.begin(), K.end());
    for (std::size_t i = 0; i < K.size(); ++i) {
        if (K[i] < 0 || K[i] >= m) throw ValidationError("h_matrix: subset index out of range");
        if (i > 0 && K[i] == K[i - 1]) {
            throw ValidationError("h_matrix: subset indices must be distinct");
        }
    }
    CMat R(static_cast<Index>(K.size()), n);
    for (std::size_t i = 0; i < K.size(); ++i) {
        R.row(static_cast<Index>(i)) = itf.U.row(K[i]).head(n);
    }
    CMat H = R.adjoint() * R;
    H = 0.5 * (H + H.adjoint());
    BunchingSetup setup;
    setup.interferometer = itf;
    setup.n = n;
    setup.subset = std::move(K);
    setup.H = std::move(H);
    return setup;
}

BeamsplitterMesh clements_decompose(const Interferometer& itf, const Tolerances& tol) {
    const Index m = itf.U.rows();
    if (itf.m != m) throw ValidationError("clements_decompose: mode count mismatch");
    require_unitary(itf.U, tol.unitary_input, "clements_decompose");

    CMat V = itf.U;
    std::vector<MeshElement> left;    // applied as T V, in application order
    std::vector<MeshElement> right;   // applied as V T^{-1}, in application order
    for (Index diag = 1; diag < m; ++diag) {
        if (diag % 2 == 1) {
            for (Index j = 0; j < diag; ++j) {
                const Index r = m - 1 - j;
                const Index c = diag - 1 - j;
                const Complex a = V(r, c);
                const Complex b = V(r, c + 1);
                const double theta = std::atan2(std::abs(a), std::abs(b));
                const double phi = arg_or_zero(a) - arg_or_zero(b);
                apply_right_inverse(V, c, theta, phi);
                right.push_back({c, theta, phi});
            }
        } else {
            for (Index j = 1; j <= diag; ++j) {
                const Index r = m + j - diag - 1;
                const Index c = j - 1;
                const Index p = r - 1;
                const Complex a = V(p, c);
                const Complex b = V(r, c);
                const double theta = std::atan2(std::abs(b), std::abs(a));
                const double phi = arg_or_zero(-b) - arg_or_zero(a);
                apply_left(V, p, theta, phi);
                left.push_back({p, theta, phi});
            }
        }
    }

    CVec D = V.diagonal();
    if (max_abs(V - CMat(D.asDiagonal())) > 1e-9) {
        throw NumericError("clements_decompose: reduction did not reach diagonal form");
    }

    // Move the inverted left couplers to the right of the diagonal:
    // T^{-1}(p, theta, phi) D = D' T(p, theta, phi') with
    //   phi' = arg(-d_p / d_{p+1}),  d_p' = -e^{-i phi} d_{p+1}.
    // Identity couplers (theta = 0) fold their phase into D directly, which
    // keeps trivial meshes canonical.
    std::vector<MeshElement> emitted;
    for (auto it = left.rbegin(); it != left.rend(); ++it) {
        const Index p = it->mode;
        const Complex d1 = D(p);
        const Complex d2 = D(p + 1);
        if (it->theta == 0.0) {
            D(p) = std::exp(Complex(0.0, -it->phi)) * d1;
            emitted.insert(emitted.begin(), {p, 0.0, 0.0});
        } else {
            const double phi2 = arg_or_zero(-d1 / d2);
            D(p) = -std::exp(Complex(0.0, -it->phi)) * d2;
            emitted.insert(emitted.begin(), {p, it->theta, phi2});
        }
    }

    BeamsplitterMesh mesh;
    mesh.m = m;
    mesh.elements = std::move(emitted);
    for (auto it = right.rbegin(); it != right.rend(); ++it) {
        mesh.elements.push_back(*it);
    }
    for (MeshElement& e : mesh.elements) e.phi = normalize_phase(e.phi);
    mesh.output_phases.resize(m);
    for (Index i = 0; i < m; ++i) mesh.output_phases(i) = normalize_phase(arg_or_zero(D(i)));
    return mesh;
}

Interferometer clements_reconstruct(const BeamsplitterMesh& mesh) {
    const Index m = mesh.m;
    if (m < 1) throw ValidationError("clements_reconstruct: need at least one mode");
    if (mesh.output_phases.size() != m) {
        throw ValidationError("clements_reconstruct: output phase count must equal m");
    }
    CMat U = CMat::Zero(m, m);
    for (Index i = 0; i < m; ++i) U(i, i) = std::exp(Complex(0.0, mesh.output_phases(i)));
    for (const MeshElement& e : mesh.elements) {
        if (e.mode < 0 || e.mode + 1 >= m) {
            throw ValidationError("clements_reconstruct: coupler mode pair out of range");
        }
        if (!std::isfinite(e.theta) || !std::isfinite(e.phi)) {
            throw ValidationError("clements_reconstruct: coupler parameters must be finite");
        }
        apply_right(U, e.mode, e.theta, e.phi);
    }
    return {m, std::move(U)};
}

BunchingSetup extend_counterexample(const BunchingSetup& setup1, const Interferometer& U2,
                                    Index n_extra, const Tolerances& tol) {
    if (n_extra != 0) {
        throw ValidationError("extend_counterexample: only vacuum second-stage inputs are supported");
    }
    const Index m1 = setup1.interferometer.U.rows();
    const Index s = static_cast<Index>(setup1.subset.size());
    const Index m2 = U2.U.rows();
    if (U2.m != m2) throw ValidationError("extend_counterexample: mode count mismatch");
    if (m2 < s) {
        throw DimensionError("extend_counterexample: second stage needs at least |K| modes");
    }
    require_unitary(U2.U, tol.unitary_input, "extend_counterexample");
    require_unitary(setup1.interferometer.U, tol.unitary_input, "extend_counterexample");

    const Index total = m1 + (m2 - s);

    // stage 1 on the original modes, identity on the fresh vacuum modes
    CMat V1 = CMat::Identity(total, total);
    V1.topLeftCorner(m1, m1) = setup1.interferometer.U;

    // routing: collected outputs K to 0..s-1, vacuum modes behind them,
    // every remaining output after those, all in ascending order
    std::vector<Index> source(total);
    Index pos = 0;
    for (Index i = 0; i < s; ++i) source[pos++] = setup1.subset[static_cast<std::size_t>(i)];
    for (Index i = 0; i < m2 - s; ++i) source[pos++] = m1 + i;
    std::vector<bool> used(static_cast<std::size_t>(total), false);
    for (Index i = 0; i < pos; ++i) used[static_cast<std::size_t>(source[i])] = true;
    for (Index i = 0; i < total; ++i) {
        if (!used[static_cast<std::size_t>(i)]) source[pos++] = i;
    }
    CMat P = CMat::Zero(total, total);
    for (Index i = 0; i < total; ++i) P(i, source[static_cast<std::size_t>(i)]) = Complex(1.0);

    // stage 2 on the first m2 routed modes
    CMat V2 = CMat::Identity(total, total);
    V2.topLeftCorner(m2, m2) = U2.U;

    Interferometer composite{total, V2 * (P * V1)};

    std::vector<Index> K2(static_cast<std::size_t>(m2));
    for (Index i = 0; i < m2; ++i) K2[static_cast<std::size_t>(i)] = i;
    BunchingSetup out = h_matrix(composite, K2, setup1.n, tol);
    if (max_abs(out.H - setup1.H) > 1e-10) {
        throw NumericError("extend_counterexample: composite H drifted from the original");
    }
    return out;
}

}  // namespace bunchlab
