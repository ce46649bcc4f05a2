#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "bunchlab/distinguishability.hpp"
#include "bunchlab/interferometry.hpp"
#include "bunchlab/matcore.hpp"
#include "bunchlab/permanent.hpp"
#include "test_support.hpp"

using namespace bunchlab;
using testsupport::engine;
using testsupport::random_gram;
using testsupport::random_h_matrix;
using testsupport::random_unit_vector;

namespace {

CMat balanced_coupler_h() {
    Interferometer itf;
    itf.m = 2;
    itf.U.resize(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    itf.U << r, r, r, -r;
    return h_matrix(itf, {0}, 2).H;
}

PerturbationSpec orthogonal_spec(const CVec& v, const CMat& delta, double eps) {
    PerturbationSpec spec;
    spec.epsilon = eps;
    spec.v = v;
    spec.delta = delta;
    spec.orthogonal = true;
    return spec;
}

/// phi0 plus per-photon eta vectors in a common ambient space; etas drawn
/// orthogonal to phi0 when requested.
struct StateInstance {
    CVec phi0;
    std::vector<CVec> etas;
};

StateInstance random_states(Index n, bool orthogonal, std::mt19937_64& eng) {
    StateInstance out;
    const Index dim = n + 2;
    out.phi0 = random_unit_vector(dim, eng);
    for (Index i = 0; i < n; ++i) {
        CVec eta = random_unit_vector(dim, eng);
        if (orthogonal) {
            eta -= out.phi0 * out.phi0.dot(eta);
            eta /= eta.norm();
        }
        out.etas.push_back(eta);
    }
    return out;
}

}  // namespace

TEST_CASE("bunching probability of the balanced coupler") {
    const CMat H = balanced_coupler_h();
    CHECK(bunching_probability(H, CMat::Ones(2, 2)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(bunching_probability(H, CMat::Identity(2, 2)) ==
          doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("bunching probability validates inputs") {
    const CMat H = balanced_coupler_h();
    CHECK_THROWS_AS(bunching_probability(H, CMat::Ones(3, 3)), DimensionError);
    CMat not_gram = CMat::Ones(2, 2);
    not_gram(0, 0) = 2.0;
    CHECK_THROWS_AS(bunching_probability(H, not_gram), ValidationError);
    CMat not_psd = CMat::Identity(2, 2);
    not_psd(0, 1) = not_psd(1, 0) = 2.0;
    CHECK_THROWS_AS(bunching_probability(H, not_psd), ValidationError);
}

TEST_CASE("bunching over the full output set is total") {
    auto eng = engine(31);
    for (int rep = 0; rep < 10; ++rep) {
        const Index n = 2 + static_cast<Index>(rep % 3);
        const Index m = n + 1;
        const CMat U = testsupport::haar_unitary(m, eng);
        Interferometer itf;
        itf.m = m;
        itf.U = U;
        std::vector<Index> all(static_cast<std::size_t>(m));
        for (Index i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;
        const CMat H = h_matrix(itf, all, n).H;
        const CMat S = random_gram(n, n, eng);
        CHECK(bunching_probability(H, S) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("indistinguishability endpoints") {
    CHECK(indistinguishability(CMat::Ones(4, 4)) == 1.0);
    CHECK(indistinguishability(CMat::Identity(3, 3)) == doctest::Approx(1.0 / 6.0));
    CHECK_THROWS_AS(indistinguishability(CMat::Ones(17, 17)), SizeCapError);
}

TEST_CASE("perturbed_states reproduces the closed-form gram") {
    auto eng = engine(32);
    for (int rep = 0; rep < 12; ++rep) {
        const Index n = 2 + static_cast<Index>(rep % 4);
        const StateInstance inst = random_states(n, true, eng);
        PerturbationSpec spec;
        spec.epsilon = 0.1 + 0.2 * static_cast<double>(rep % 5);
        spec.v = random_unit_vector(n, eng);
        spec.etas = inst.etas;
        spec.orthogonal = true;

        const std::vector<CVec> states = perturbed_states(inst.phi0, spec);
        const CMat direct = gram_from_vectors(states);
        const CMat closed = perturbed_gram(spec);
        CHECK(max_abs(direct - closed) <= 1e-12);
    }
}

TEST_CASE("perturbed_states validation") {
    auto eng = engine(33);
    const StateInstance inst = random_states(3, true, eng);
    PerturbationSpec spec;
    spec.epsilon = 0.3;
    spec.v = random_unit_vector(3, eng);
    spec.etas = inst.etas;

    PerturbationSpec negative = spec;
    negative.epsilon = -0.5;
    CHECK_THROWS_AS(perturbed_states(inst.phi0, negative), RangeError);

    PerturbationSpec non_unit = spec;
    non_unit.v *= 2.0;
    CHECK_THROWS_AS(perturbed_states(inst.phi0, non_unit), ValidationError);

    PerturbationSpec skewed = spec;
    skewed.etas[0] = inst.phi0;
    CHECK_THROWS_AS(perturbed_states(inst.phi0, skewed), ValidationError);
    skewed.orthogonal = false;
    CHECK_NOTHROW(perturbed_states(inst.phi0, skewed));
}

TEST_CASE("perturbed_gram diagonal is exactly one and valid") {
    auto eng = engine(34);
    const Index n = 5;
    PerturbationSpec spec;
    spec.epsilon = 1.7;
    spec.v = random_unit_vector(n, eng);
    spec.delta = random_gram(n, 3, eng);
    const CMat S = perturbed_gram(spec);
    for (Index i = 0; i < n; ++i) CHECK(S(i, i) == Complex(1.0));
    require_gram(S, Tolerances{}, "test");

    PerturbationSpec general = spec;
    general.orthogonal = false;
    CHECK_THROWS_AS(perturbed_gram(general), ValidationError);
}

TEST_CASE("interpolation gram endpoints and range") {
    const CMat start = interpolation_gram(4, 0.0);
    CHECK(max_abs(start - CMat::Ones(4, 4)) == 0.0);
    const CMat end = interpolation_gram(4, 2.0);
    CHECK(max_abs(end - CMat::Identity(4, 4)) <= 1e-15);
    CHECK_THROWS_AS(interpolation_gram(4, 2.1), RangeError);
    CHECK_THROWS_AS(interpolation_gram(4, -0.1), RangeError);
    CHECK_THROWS_AS(interpolation_gram(0, 0.0), DimensionError);
}

TEST_CASE("delta_of prefers the stored gram and validates") {
    auto eng = engine(35);
    PerturbationSpec spec;
    spec.v = random_unit_vector(3, eng);
    CHECK_THROWS_AS(delta_of(spec), ValidationError);
    spec.delta = random_gram(3, 2, eng);
    CHECK(max_abs(delta_of(spec) - spec.delta) == 0.0);
    spec.delta = CMat();
    const StateInstance inst = random_states(3, true, eng);
    spec.etas = inst.etas;
    CHECK(max_abs(delta_of(spec) - gram_from_vectors(inst.etas)) == 0.0);
}

TEST_CASE("predicted delta matches finite differences on orthogonal perturbations") {
    auto eng = engine(36);
    int usable = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const Index n = 2 + static_cast<Index>(rep % 5);
        const Index m = n + static_cast<Index>(rep % 3);
        const Index ks = 1 + static_cast<Index>(rep % m);
        const CMat H = random_h_matrix(n, m, ks, eng);
        const double p0 = bunching_probability(H, CMat::Ones(n, n));

        const StateInstance inst = random_states(n, true, eng);
        PerturbationSpec spec;
        spec.v = random_unit_vector(n, eng);
        spec.etas = inst.etas;
        spec.orthogonal = true;

        const double predicted = predicted_delta_p(H, spec);
        if (std::abs(predicted) < 1e-7 * std::max(p0, 1e-6)) continue;

        const double eps = 1e-3;
        spec.epsilon = eps;
        const double p_eps =
            bunching_probability(H, gram_from_vectors(perturbed_states(inst.phi0, spec)));
        const double fd = (p_eps - p0) / (eps * eps);
        CHECK(std::abs(fd - predicted) <= 1e-3 * std::abs(predicted));
        ++usable;
    }
    CHECK(usable >= 10);
}

TEST_CASE("optimal directions bracket every predicted coefficient") {
    auto eng = engine(37);
    const Index n = 5;
    const CMat H = random_h_matrix(n, n + 2, 2, eng);
    const OptimalDirections dirs = optimal_directions(H);
    CHECK(dirs.lambda_min <= dirs.lambda_max);

    const CMat ones = CMat::Ones(n, n);
    const double perm_h = permanent_ryser(H).value.real();
    const double top = predicted_delta_p(H, orthogonal_spec(dirs.v_max, ones, 0.0));
    const double bottom = predicted_delta_p(H, orthogonal_spec(dirs.v_min, ones, 0.0));
    CHECK(top == doctest::Approx(dirs.lambda_max - perm_h).epsilon(1e-10));
    CHECK(bottom == doctest::Approx(dirs.lambda_min - perm_h).epsilon(1e-10));

    for (int rep = 0; rep < 10; ++rep) {
        const CVec v = random_unit_vector(n, eng);
        const double coeff = predicted_delta_p(H, orthogonal_spec(v, ones, 0.0));
        CHECK(coeff <= top + 1e-10);
        CHECK(coeff >= bottom - 1e-10);
    }
}

TEST_CASE("epsilon scan on the counterexample setup") {
    const Rescaled rs = rescale_to_contraction(drury_matrix());
    const CMat H = h_matrix(complete_to_unitary(rs.B, 10, 0), {0, 1}, 8).H;
    const OptimalDirections dirs = optimal_directions(H);

    std::vector<double> grid;
    for (int k = 0; k <= 50; ++k) grid.push_back(2.5 * k / 50.0);
    const ScanResult scan =
        epsilon_scan(H, dirs.v_max, CMat::Ones(8, 8), grid);

    CHECK(scan.rows.size() == 51);
    CHECK(scan.rows[0].epsilon == 0.0);
    CHECK(scan.rows[0].ratio == 1.0);
    CHECK(scan.rows[0].indistinguishability == 1.0);
    CHECK(scan.rows[0].p_bunch == doctest::Approx(0.0013268955926621362).epsilon(1e-10));

    CHECK(scan.argmax_epsilon == doctest::Approx(1.2).epsilon(1e-12));
    double peak = 0.0;
    for (const ScanRow& row : scan.rows) peak = std::max(peak, row.ratio);
    CHECK(peak == doctest::Approx(1.0195950859401541).epsilon(1e-9));

    for (std::size_t k = 1; k < scan.rows.size(); ++k)
        CHECK(scan.rows[k].indistinguishability < scan.rows[k - 1].indistinguishability);
}

TEST_CASE("epsilon scan validates the grid and the setup") {
    auto eng = engine(38);
    const CMat H = random_h_matrix(3, 4, 2, eng);
    const CVec v = random_unit_vector(3, eng);
    const CMat delta = CMat::Ones(3, 3);
    CHECK_THROWS_AS(epsilon_scan(H, v, delta, {}), ValidationError);
    CHECK_THROWS_AS(epsilon_scan(H, v, delta, {0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(epsilon_scan(H, v, delta, {0.2, 0.1}), ValidationError);
    CHECK_THROWS_AS(epsilon_scan(H, v, delta, {-0.1, 0.1}), RangeError);

    CMat zero_perm = CMat::Zero(2, 2);
    zero_perm(0, 0) = 1.0;
    CVec v2 = random_unit_vector(2, eng);
    CHECK_THROWS_AS(epsilon_scan(zero_perm, v2, CMat::Ones(2, 2), {0.0, 0.1}),
                    DegenerateError);
}

TEST_CASE("single point scan carries the baseline row") {
    auto eng = engine(39);
    const CMat H = random_h_matrix(3, 5, 3, eng);
    const CVec v = random_unit_vector(3, eng);
    const ScanResult scan = epsilon_scan(H, v, CMat::Ones(3, 3), {0.0});
    CHECK(scan.rows.size() == 1);
    CHECK(scan.rows[0].ratio == 1.0);
    CHECK(scan.rows[0].indistinguishability == 1.0);
    CHECK(scan.argmax_epsilon == 0.0);
}
