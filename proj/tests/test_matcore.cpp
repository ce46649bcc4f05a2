#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "bunchlab/matcore.hpp"
#include "test_support.hpp"

using namespace bunchlab;
using testsupport::engine;
using testsupport::haar_unitary;
using testsupport::random_complex;
using testsupport::random_gram;
using testsupport::random_psd;
using testsupport::random_unit_vector;

TEST_CASE("hadamard multiplies elementwise") {
    auto eng = engine(1);
    const CMat A = random_complex(3, 4, eng);
    const CMat ones = CMat::Ones(3, 4);
    CHECK(max_abs(hadamard(A, ones) - A) == 0.0);

    CMat B(2, 2);
    B << 1.0, 2.0, 3.0, 4.0;
    const CMat masked = hadamard(CMat::Identity(2, 2), B);
    CHECK(masked(0, 0) == Complex(1.0));
    CHECK(masked(0, 1) == Complex(0.0));
    CHECK(masked(1, 1) == Complex(4.0));

    CHECK_THROWS_AS(hadamard(CMat::Ones(2, 3), CMat::Ones(3, 2)), DimensionError);
}

TEST_CASE("hermitian_eig on fixed spectra") {
    const HermitianEig id3 = hermitian_eig(CMat::Identity(3, 3));
    for (Index k = 0; k < 3; ++k) CHECK(id3.eigenvalues(k) == doctest::Approx(1.0));

    const HermitianEig ones3 = hermitian_eig(CMat::Ones(3, 3));
    CHECK(ones3.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ones3.eigenvalues(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ones3.eigenvalues(2) == doctest::Approx(3.0));
}

TEST_CASE("hermitian_eig invariants on random Hermitian matrices") {
    auto eng = engine(2);
    for (int rep = 0; rep < 20; ++rep) {
        const Index n = 2 + static_cast<Index>(rep % 7);
        const CMat A = random_psd(n, n, eng);
        const HermitianEig eig = hermitian_eig(A);

        for (Index k = 1; k < n; ++k) CHECK(eig.eigenvalues(k) >= eig.eigenvalues(k - 1));

        const double trace_gap =
            std::abs(eig.eigenvalues.sum() - A.trace().real());
        CHECK(trace_gap <= 1e-9 * std::max(1.0, std::abs(A.trace().real())));

        const CMat rebuilt = eig.eigenvectors * eig.eigenvalues.asDiagonal() *
                             eig.eigenvectors.adjoint();
        CHECK(max_abs(rebuilt - A) <= 1e-9 * std::max(1.0, max_abs(A)));

        const CMat gram = eig.eigenvectors.adjoint() * eig.eigenvectors;
        CHECK(max_abs(gram - CMat::Identity(n, n)) <= 1e-10);

        const double norm2 = eig.eigenvalues.cwiseAbs().maxCoeff();
        for (Index k = 0; k < n; ++k) {
            const double residual =
                (A * eig.eigenvectors.col(k) - eig.eigenvalues(k) * eig.eigenvectors.col(k))
                    .norm();
            CHECK(residual <= 1e-10 * (1.0 + norm2));
        }

        const double mean = A.trace().real() / static_cast<double>(n);
        CHECK(eig.eigenvalues(0) <= mean + 1e-12);
        CHECK(mean <= eig.eigenvalues(n - 1) + 1e-12);
    }
}

TEST_CASE("hermitian_eig fixes eigenvector phases deterministically") {
    auto eng = engine(3);
    const CMat A = random_psd(5, 5, eng);
    const HermitianEig first = hermitian_eig(A);
    const HermitianEig second = hermitian_eig(A);
    CHECK(max_abs(first.eigenvectors - second.eigenvectors) == 0.0);
    for (Index j = 0; j < 5; ++j) {
        Index best = 0;
        for (Index i = 1; i < 5; ++i)
            if (std::abs(first.eigenvectors(i, j)) > std::abs(first.eigenvectors(best, j)))
                best = i;
        CHECK(first.eigenvectors(best, j).imag() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(first.eigenvectors(best, j).real() > 0.0);
    }
}

TEST_CASE("hermitian_eig rejects bad input") {
    CMat skew(2, 2);
    skew << 0.0, 1.0, -1.0, 0.0;
    CHECK_THROWS_AS(hermitian_eig(skew), ValidationError);
    CHECK_THROWS_AS(hermitian_eig(CMat::Identity(65, 65)), SizeCapError);
    CHECK_THROWS_AS(hermitian_eig(CMat::Ones(2, 3)), DimensionError);
}

TEST_CASE("cholesky_gram identity and rank-1 cases") {
    const CholeskyGram id = cholesky_gram(CMat::Identity(4, 4));
    CHECK(id.C.rows() == 4);
    CHECK(max_abs(id.C - CMat::Identity(4, 4)) <= 1e-12);

    const CholeskyGram ones = cholesky_gram(CMat::Ones(5, 5));
    CHECK(ones.C.rows() == 1);
    for (Index j = 0; j < 5; ++j) CHECK(std::abs(ones.C(0, j) - Complex(1.0)) <= 1e-12);
}

TEST_CASE("cholesky_gram round trip and rank detection") {
    auto eng = engine(4);
    for (int rep = 0; rep < 15; ++rep) {
        const Index n = 3 + static_cast<Index>(rep % 5);
        const Index k = 1 + static_cast<Index>(rep % n);
        const CMat S = random_psd(n, k, eng);
        const CholeskyGram cg = cholesky_gram(S);
        CHECK(cg.C.rows() == k);
        CHECK(static_cast<Index>(cg.pivots.size()) == k);
        CHECK(max_abs(CMat(cg.C.adjoint() * cg.C) - S) <= 1e-9 * std::max(1.0, max_abs(S)));
    }
}

TEST_CASE("cholesky_gram rejects indefinite input") {
    CMat A = CMat::Identity(3, 3);
    A(2, 2) = -0.5;
    CHECK_THROWS_AS(cholesky_gram(A), ValidationError);
}

TEST_CASE("gram_from_vectors canonical cases") {
    auto eng = engine(5);
    const CVec v = random_unit_vector(4, eng);
    const CMat same = gram_from_vectors({v, v, v});
    CHECK(max_abs(same - CMat::Ones(3, 3)) <= 1e-12);

    CVec e0(3), e1(3), e2(3);
    e0 << 1, 0, 0;
    e1 << 0, 1, 0;
    e2 << 0, 0, 1;
    const CMat basis = gram_from_vectors({e0, e1, e2});
    CHECK(max_abs(basis - CMat::Identity(3, 3)) == 0.0);
}

TEST_CASE("gram_from_vectors matches pairwise overlaps and validates") {
    auto eng = engine(6);
    std::vector<CVec> vecs;
    for (int i = 0; i < 4; ++i) vecs.push_back(random_unit_vector(5, eng));
    const CMat S = gram_from_vectors(vecs);
    require_gram(S, Tolerances{}, "test");
    for (Index i = 0; i < 4; ++i) {
        CHECK(S(i, i) == Complex(1.0));
        for (Index j = 0; j < 4; ++j) {
            const Complex direct = vecs[static_cast<std::size_t>(i)].dot(
                vecs[static_cast<std::size_t>(j)]);
            CHECK(std::abs(S(i, j) - direct) <= 1e-12);
        }
    }

    CVec stretched = 2.0 * vecs[0];
    CHECK_THROWS_AS(gram_from_vectors({vecs[0], stretched}), ValidationError);
    CVec shorter(3);
    shorter << 1, 0, 0;
    CHECK_THROWS_AS(gram_from_vectors({vecs[0], shorter}), DimensionError);
    CHECK_THROWS_AS(gram_from_vectors({}), ValidationError);
}

TEST_CASE("spectral_norm known values") {
    CHECK(spectral_norm(CMat::Identity(6, 6)) == doctest::Approx(1.0));
    CMat D = CMat::Zero(2, 2);
    D(0, 0) = 3.0;
    D(1, 1) = -4.0;
    CHECK(spectral_norm(D) == doctest::Approx(4.0));

    auto eng = engine(7);
    const CMat A = random_complex(4, 6, eng);
    const HermitianEig eig = hermitian_eig(CMat(A.adjoint() * A));
    CHECK(spectral_norm(A) == doctest::Approx(std::sqrt(eig.eigenvalues(5))).epsilon(1e-10));
}

TEST_CASE("validation helpers") {
    auto eng = engine(8);
    const CMat U = haar_unitary(5, eng);
    require_unitary(U, 1e-9, "test");
    CMat off = U;
    off(0, 0) += 1e-3;
    CHECK_THROWS_AS(require_unitary(off, 1e-9, "test"), ValidationError);

    const CMat S = random_gram(4, 4, eng);
    require_gram(S, Tolerances{}, "test");
    CMat bad_diag = S;
    bad_diag(1, 1) = 1.5;
    CHECK_THROWS_AS(require_gram(bad_diag, Tolerances{}, "test"), ValidationError);

    CMat not_psd = CMat::Identity(3, 3);
    not_psd(0, 0) = -1.0;
    CHECK_THROWS_AS(require_psd(not_psd, Tolerances{}, "test"), ValidationError);

    CHECK(max_abs(CMat::Zero(2, 2)) == 0.0);
    CMat mixed(1, 2);
    mixed << Complex(3.0, 4.0), Complex(0.0, -1.0);
    CHECK(max_abs(mixed) == doctest::Approx(5.0));
}
