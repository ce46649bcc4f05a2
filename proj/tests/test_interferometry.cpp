#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "bunchlab/interferometry.hpp"
#include "bunchlab/matcore.hpp"
#include "test_support.hpp"

using namespace bunchlab;
using testsupport::engine;
using testsupport::haar_unitary;

TEST_CASE("drury matrix and gram") {
    const CMat M = drury_matrix();
    CHECK(M.rows() == 2);
    CHECK(M.cols() == 8);
    for (Index i = 0; i < 2; ++i) {
        for (Index j = 0; j < 8; ++j) {
            CHECK(M(i, j).real() == std::round(M(i, j).real()));
            CHECK(M(i, j).imag() == std::round(M(i, j).imag()));
        }
    }

    const CMat A = drury_gram();
    CHECK(A.rows() == 8);
    CHECK(max_abs(A - CMat(M.adjoint() * M)) <= 1e-12 * max_abs(A));
    require_psd(A, Tolerances{}, "test");
    const HermitianEig eig = hermitian_eig(A);
    for (Index k = 0; k < 6; ++k)
        CHECK(std::abs(eig.eigenvalues(k)) <= 1e-9 * eig.eigenvalues(7));
    CHECK(eig.eigenvalues(6) > 1.0);
}

TEST_CASE("rescale_to_contraction normalizes the gram spectral norm") {
    const Rescaled rs = rescale_to_contraction(drury_matrix());
    CHECK(spectral_norm(CMat(rs.B.adjoint() * rs.B)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rs.alpha == doctest::Approx(0.002143520009603794).epsilon(1e-12));
    CHECK(max_abs(rs.B - std::sqrt(rs.alpha) * drury_matrix()) <= 1e-12);
    CHECK_THROWS_AS(rescale_to_contraction(CMat::Zero(2, 4)), DegenerateError);
}

TEST_CASE("complete_to_unitary embeds the block and is deterministic") {
    const Rescaled rs = rescale_to_contraction(drury_matrix());
    const Interferometer itf = complete_to_unitary(rs.B, 10, 0);
    CHECK(itf.m == 10);
    require_unitary(itf.U, 1e-9, "test");
    CHECK(max_abs(itf.U.topLeftCorner(2, 8) - rs.B) <= 1e-10);

    const Interferometer again = complete_to_unitary(rs.B, 10, 0);
    CHECK(max_abs(again.U - itf.U) == 0.0);

    const Interferometer other = complete_to_unitary(rs.B, 10, 99);
    CHECK(max_abs(other.U - itf.U) > 1e-3);
    CHECK(max_abs(other.U.topLeftCorner(2, 8) - rs.B) <= 1e-10);

    CHECK_THROWS_AS(complete_to_unitary(rs.B, 9, 0), DimensionError);
}

TEST_CASE("h_matrix is seed independent and well formed") {
    const Rescaled rs = rescale_to_contraction(drury_matrix());
    const BunchingSetup a = h_matrix(complete_to_unitary(rs.B, 10, 0), {0, 1}, 8);
    const BunchingSetup b = h_matrix(complete_to_unitary(rs.B, 10, 123), {0, 1}, 8);
    CHECK(max_abs(a.H - b.H) <= 1e-12);
    CHECK(max_abs(a.H - rs.alpha * drury_gram()) <= 1e-12);
    CHECK(a.n == 8);
    CHECK(a.subset == std::vector<Index>{0, 1});
    require_psd(a.H, Tolerances{}, "test");
}

TEST_CASE("h_matrix of a balanced two-mode coupler") {
    Interferometer itf;
    itf.m = 2;
    itf.U.resize(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    itf.U << r, r, r, -r;
    const BunchingSetup setup = h_matrix(itf, {0}, 2);
    CHECK(max_abs(setup.H - 0.5 * CMat::Ones(2, 2)) <= 1e-12);

    CHECK_THROWS_AS(h_matrix(itf, {0, 0}, 2), ValidationError);
    CHECK_THROWS_AS(h_matrix(itf, {2}, 2), ValidationError);
    CHECK_THROWS_AS(h_matrix(itf, {}, 2), ValidationError);
    CHECK_THROWS_AS(h_matrix(itf, {0}, 3), ValidationError);
    Interferometer skewed = itf;
    skewed.U(0, 0) += 0.01;
    CHECK_THROWS_AS(h_matrix(skewed, {0}, 2), ValidationError);
}

TEST_CASE("clements identity mesh is canonical") {
    for (Index m : {1, 2, 5, 10}) {
        Interferometer itf;
        itf.m = m;
        itf.U = CMat::Identity(m, m);
        const BeamsplitterMesh mesh = clements_decompose(itf);
        CHECK(static_cast<Index>(mesh.elements.size()) == m * (m - 1) / 2);
        for (const MeshElement& e : mesh.elements) {
            CHECK(e.theta == 0.0);
            CHECK(e.phi == 0.0);
        }
        for (Index i = 0; i < m; ++i) CHECK(mesh.output_phases(i) == 0.0);
        const Interferometer rebuilt = clements_reconstruct(mesh);
        CHECK(max_abs(rebuilt.U - itf.U) <= 1e-15);
    }
}

TEST_CASE("clements round trip on random unitaries") {
    auto eng = engine(21);
    for (int rep = 0; rep < 20; ++rep) {
        const Index m = 2 + static_cast<Index>(rep % 9);
        Interferometer itf;
        itf.m = m;
        itf.U = haar_unitary(m, eng);
        const BeamsplitterMesh mesh = clements_decompose(itf);
        CHECK(static_cast<Index>(mesh.elements.size()) == m * (m - 1) / 2);
        for (const MeshElement& e : mesh.elements) {
            CHECK(e.mode >= 0);
            CHECK(e.mode < m - 1);
            CHECK(e.phi >= 0.0);
            CHECK(e.phi < 2.0 * 3.14159265358979324);
        }
        const Interferometer rebuilt = clements_reconstruct(mesh);
        CHECK(max_abs(rebuilt.U - itf.U) <= 1e-9);
    }
}

TEST_CASE("clements rejects non-unitary input") {
    Interferometer itf;
    itf.m = 3;
    itf.U = CMat::Ones(3, 3);
    CHECK_THROWS_AS(clements_decompose(itf), ValidationError);
}

TEST_CASE("clements_reconstruct validates mesh contents") {
    BeamsplitterMesh mesh;
    mesh.m = 3;
    mesh.output_phases = RVec::Zero(3);
    mesh.elements.push_back({5, 0.0, 0.0});
    CHECK_THROWS_AS(clements_reconstruct(mesh), ValidationError);
}

TEST_CASE("extension through a second stage preserves H") {
    auto eng = engine(22);
    const Rescaled rs = rescale_to_contraction(drury_matrix());
    const BunchingSetup base = h_matrix(complete_to_unitary(rs.B, 10, 0), {0, 1}, 8);

    for (int rep = 0; rep < 10; ++rep) {
        const Index m2 = 2 + static_cast<Index>(rep % 7);
        Interferometer second;
        second.m = m2;
        second.U = haar_unitary(m2, eng);
        const BunchingSetup extended = extend_counterexample(base, second);
        CHECK(extended.interferometer.m == 10 + (m2 - 2));
        CHECK(static_cast<Index>(extended.subset.size()) == m2);
        CHECK(max_abs(extended.H - base.H) <= 1e-10);
        require_unitary(extended.interferometer.U, 1e-9, "test");
    }

    Interferometer identity2;
    identity2.m = 2;
    identity2.U = CMat::Identity(2, 2);
    const BunchingSetup same = extend_counterexample(base, identity2);
    CHECK(max_abs(same.H - base.H) == 0.0);
    CHECK(same.interferometer.m == 10);

    Interferometer tiny;
    tiny.m = 1;
    tiny.U = CMat::Identity(1, 1);
    CHECK_THROWS_AS(extend_counterexample(base, tiny), DimensionError);
    CHECK_THROWS_AS(extend_counterexample(base, identity2, 1), ValidationError);
}

TEST_CASE("small couplers decompose to a single element") {
    auto eng = engine(23);
    Interferometer itf;
    itf.m = 2;
    itf.U = haar_unitary(2, eng);
    const BeamsplitterMesh mesh = clements_decompose(itf);
    CHECK(mesh.elements.size() == 1);
    const Interferometer rebuilt = clements_reconstruct(mesh);
    CHECK(max_abs(rebuilt.U - itf.U) <= 1e-12);
}
