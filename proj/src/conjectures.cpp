#include "bunchlab/conjectures.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <random>

#include "bunchlab/matcore.hpp"
#include "bunchlab/parallel.hpp"
#include "bunchlab/permanent.hpp"

namespace bunchlab {

namespace {

constexpr double kDegenerateFloor = 1e-300;
constexpr double kSearchKeepThreshold = 1.0 - 1e-6;

double real_permanent(const CMat& A, const Tolerances& tol, const char* who) {
    const Complex p = permanent_ryser(A).value;
    if (std::abs(p.imag()) > tol.imag_residue * (1.0 + std::abs(p.real())))
        throw NumericError(std::string(who) + ": imaginary permanent residue " +
                           std::to_string(p.imag()));
    return p.real();
}

double fit_loglog_slope(const std::vector<double>& epsilons,
                        const std::vector<double>& residuals) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        const double r = std::abs(residuals[k]);
        if (r > 0.0 && std::isfinite(r)) {
            xs.push_back(std::log(epsilons[k]));
            ys.push_back(std::log(r));
        }
    }
    if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    return sxy / sxx;
}

CMat sample_gram_factor(Index n, std::uint64_t seed, Index trial) {
    std::seed_seq seq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(trial)};
    std::mt19937_64 eng(seq);
    std::uniform_int_distribution<Index> rank_dist(2, n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Index k = rank_dist(eng);
    CMat G(k, n);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < n; ++j) G(i, j) = Complex(gauss(eng), gauss(eng));
    CMat A = G.adjoint() * G;
    return 0.5 * (A + CMat(A.adjoint()));
}

}  // namespace

ConjectureVerdict check_m1(const CMat& A, const CMat& B, const Tolerances& tol) {
    require_square(A, "check_m1(A)");
    if (B.rows() != A.rows() || B.cols() != A.cols())
        throw DimensionError("check_m1: A is " + std::to_string(A.rows()) + "x" +
                             std::to_string(A.cols()) + " but B is " +
                             std::to_string(B.rows()) + "x" + std::to_string(B.cols()));
    const Index n = A.rows();
    if (n > 12)
        throw SizeCapError("check_m1: n=" + std::to_string(n) + " exceeds cap 12");
    require_psd(A, tol, "check_m1(A)");
    require_psd(B, tol, "check_m1(B)");

    ConjectureVerdict verdict;
    verdict.conjecture = "M1";
    const double lhs = real_permanent(A.cwiseProduct(B), tol, "check_m1");
    double rhs = real_permanent(A, tol, "check_m1");
    for (Index i = 0; i < n; ++i) rhs *= B(i, i).real();
    if (std::abs(rhs) < kDegenerateFloor) {
        verdict.degenerate = true;
        return verdict;
    }
    verdict.ratio = lhs / rhs;
    verdict.margin = verdict.ratio - 1.0;
    verdict.violated = verdict.margin > verdict.tolerance;
    return verdict;
}

ConjectureVerdict check_m2(const CMat& A, const Tolerances& tol) {
    require_square(A, "check_m2");
    const Index n = A.rows();
    if (n > 14)
        throw SizeCapError("check_m2: n=" + std::to_string(n) + " exceeds cap 14");
    const FMatrix fm = f_matrix(A, tol);
    const double pa = fm.source_perm.real();
    if (std::abs(fm.source_perm.imag()) > tol.imag_residue * (1.0 + std::abs(pa)))
        throw NumericError("check_m2: imaginary permanent residue " +
                           std::to_string(fm.source_perm.imag()));
    if (std::abs(pa) < kDegenerateFloor)
        throw DegenerateError("check_m2: perm(A) vanishes, ratio is undefined");
    const HermitianEig eig = hermitian_eig(fm.F, tol);

    ConjectureVerdict verdict;
    verdict.conjecture = "M2";
    verdict.ratio = eig.eigenvalues(n - 1) / pa;
    verdict.margin = verdict.ratio - 1.0;
    verdict.violated = verdict.margin > verdict.tolerance;
    verdict.witness_vector = eig.eigenvectors.col(n - 1);
    return verdict;
}

CMat theorem1_gram(const CVec& v, double epsilon) {
    const Index n = v.size();
    if (n == 0) throw DimensionError("theorem1_gram: empty direction vector");
    if (epsilon < 0.0)
        throw RangeError("theorem1_gram: epsilon " + std::to_string(epsilon) +
                         " is negative");
    const double e2 = epsilon * epsilon;
    CMat B(n, n);
    for (Index i = 0; i < n; ++i) {
        B(i, i) = 1.0;
        const double di = std::sqrt(1.0 + e2 * std::norm(v(i)));
        for (Index j = i + 1; j < n; ++j) {
            const double dj = std::sqrt(1.0 + e2 * std::norm(v(j)));
            B(i, j) = (1.0 + e2 * std::conj(v(i)) * v(j)) / (di * dj);
            B(j, i) = std::conj(B(i, j));
        }
    }
    return B;
}

Theorem1Report verify_theorem1(const CMat& A, const CVec& v,
                               const std::vector<double>& epsilons,
                               const Tolerances& tol) {
    require_square(A, "verify_theorem1");
    if (v.size() != A.rows())
        throw DimensionError("verify_theorem1: direction has " + std::to_string(v.size()) +
                             " entries for order " + std::to_string(A.rows()));
    require_unit_vector(v, tol.unit_norm, "verify_theorem1");
    if (epsilons.empty())
        throw ValidationError("verify_theorem1: empty epsilon list");
    for (double e : epsilons)
        if (!(e > 0.0) || e > 1.0)
            throw RangeError("verify_theorem1: epsilon " + std::to_string(e) +
                             " outside (0, 1]");

    const FMatrix fm = f_matrix(A, tol);
    const double pa = fm.source_perm.real();
    if (std::abs(pa) < kDegenerateFloor)
        throw DegenerateError("verify_theorem1: perm(A) vanishes");
    const Complex vfv = v.dot(fm.F * v);
    if (std::abs(vfv.imag()) > tol.imag_residue * (1.0 + std::abs(vfv.real())))
        throw NumericError("verify_theorem1: non-real quadratic form " +
                           std::to_string(vfv.imag()));

    Theorem1Report report;
    report.epsilons = epsilons;
    report.perm_a = pa;
    report.quadratic_coefficient = vfv.real() - pa;
    report.measured.resize(epsilons.size());
    report.predicted.resize(epsilons.size());
    report.residuals.resize(epsilons.size());
    report.m1_ratios.resize(epsilons.size());
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        const double e = epsilons[k];
        const CMat B = theorem1_gram(v, e);
        const double measured = real_permanent(A.cwiseProduct(B), tol, "verify_theorem1");
        const double predicted = pa + e * e * report.quadratic_coefficient;
        report.measured[k] = measured;
        report.predicted[k] = predicted;
        report.residuals[k] = measured - predicted;
        report.m1_ratios[k] = measured / pa;
    }
    report.loglog_slope = fit_loglog_slope(report.epsilons, report.residuals);
    return report;
}

std::vector<ConjectureVerdict> random_violation_search(Index n, Index trials,
                                                       std::uint64_t seed,
                                                       const std::vector<CMat>& inject,
                                                       const Tolerances& tol) {
    if (n < 2 || n > 10)
        throw RangeError("random_violation_search: n=" + std::to_string(n) +
                         " outside [2, 10]");
    if (trials < 0)
        throw RangeError("random_violation_search: negative trial count");
    for (const CMat& A : inject)
        if (A.rows() != n || A.cols() != n)
            throw DimensionError("random_violation_search: injected matrix of order " +
                                 std::to_string(A.rows()) + ", expected " +
                                 std::to_string(n));

    std::vector<std::optional<ConjectureVerdict>> slots(static_cast<std::size_t>(trials));
    parallel_for(trials, [&](Index t) {
        CMat A = t < static_cast<Index>(inject.size())
                     ? inject[static_cast<std::size_t>(t)]
                     : sample_gram_factor(n, seed, t);
        ConjectureVerdict verdict;
        try {
            verdict = check_m2(A, tol);
        } catch (const DegenerateError&) {
            return;
        }
        if (verdict.ratio > kSearchKeepThreshold) {
            verdict.trial = t;
            verdict.witness = std::move(A);
            slots[static_cast<std::size_t>(t)] = std::move(verdict);
        }
    });

    std::vector<ConjectureVerdict> hits;
    for (auto& slot : slots)
        if (slot) hits.push_back(std::move(*slot));
    std::sort(hits.begin(), hits.end(), [](const ConjectureVerdict& a, const ConjectureVerdict& b) {
        if (a.ratio != b.ratio) return a.ratio > b.ratio;
        return a.trial < b.trial;
    });
    return hits;
}

}  // namespace bunchlab
