#include "bunchlab/distinguishability.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "bunchlab/matcore.hpp"
#include "bunchlab/parallel.hpp"
#include "bunchlab/permanent.hpp"

namespace bunchlab {

namespace {

double factorial(Index n) {
    double f = 1.0;
    for (Index k = 2; k <= n; ++k) f *= static_cast<double>(k);
    return f;
}

void require_unit_weights(const CVec& v, const char* who) {
    if (v.size() == 0) throw DimensionError(std::string(who) + ": empty weight vector");
    require_unit_vector(v, Tolerances{}.unit_norm, who);
}

}  // namespace

CMat delta_of(const PerturbationSpec& spec, const Tolerances& tol) {
    const Index n = spec.v.size();
    if (spec.delta.size() != 0) {
        if (spec.delta.rows() != n || spec.delta.cols() != n)
            throw DimensionError("delta_of: delta is " + std::to_string(spec.delta.rows()) +
                                 "x" + std::to_string(spec.delta.cols()) + ", weights have n=" +
                                 std::to_string(n));
        require_gram(spec.delta, tol, "delta_of");
        return spec.delta;
    }
    if (!spec.etas.empty()) {
        if (static_cast<Index>(spec.etas.size()) != n)
            throw DimensionError("delta_of: " + std::to_string(spec.etas.size()) +
                                 " eta vectors for n=" + std::to_string(n) + " weights");
        return gram_from_vectors(spec.etas, tol);
    }
    throw ValidationError("delta_of: spec carries neither delta nor eta vectors");
}

double bunching_probability(const CMat& H, const CMat& S, const Tolerances& tol) {
    require_square(H, "bunching_probability");
    if (S.rows() != H.rows() || S.cols() != H.cols())
        throw DimensionError("bunching_probability: H is " + std::to_string(H.rows()) +
                             "x" + std::to_string(H.cols()) + " but S is " +
                             std::to_string(S.rows()) + "x" + std::to_string(S.cols()));
    require_psd(H, tol, "bunching_probability(H)");
    require_gram(S, tol, "bunching_probability(S)");
    const CMat prod = H.cwiseProduct(S.transpose());
    const Complex p = permanent_ryser(prod).value;
    if (std::abs(p.imag()) > tol.imag_residue * (1.0 + std::abs(p.real())))
        throw NumericError("bunching_probability: imaginary residue " +
                           std::to_string(p.imag()));
    const double re = p.real();
    if (re < -tol.imag_residue || re > 1.0 + tol.imag_residue)
        throw NumericError("bunching_probability: value " + std::to_string(re) +
                           " outside [0, 1]");
    return std::clamp(re, 0.0, 1.0);
}

double indistinguishability(const CMat& S, const Tolerances& tol) {
    require_gram(S, tol, "indistinguishability");
    const Index n = S.rows();
    if (n > 16)
        throw SizeCapError("indistinguishability: n=" + std::to_string(n) + " exceeds cap 16");
    if (n == 0) throw DimensionError("indistinguishability: empty Gram");
    const Complex p = permanent_ryser(S).value;
    if (std::abs(p.imag()) > tol.imag_residue * (1.0 + std::abs(p.real())))
        throw NumericError("indistinguishability: imaginary residue " +
                           std::to_string(p.imag()));
    const double d = p.real() / factorial(n);
    if (d < -tol.imag_residue || d > 1.0 + tol.imag_residue)
        throw NumericError("indistinguishability: value " + std::to_string(d) +
                           " outside [0, 1]");
    return std::clamp(d, 0.0, 1.0);
}

std::vector<CVec> perturbed_states(const CVec& phi0, const PerturbationSpec& spec,
                                   const Tolerances& tol) {
    require_unit_vector(phi0, tol.unit_norm, "perturbed_states(phi0)");
    require_unit_weights(spec.v, "perturbed_states");
    if (spec.epsilon < 0.0)
        throw RangeError("perturbed_states: epsilon " + std::to_string(spec.epsilon) +
                         " is negative");
    const Index n = spec.v.size();
    if (static_cast<Index>(spec.etas.size()) != n)
        throw DimensionError("perturbed_states: " + std::to_string(spec.etas.size()) +
                             " eta vectors for n=" + std::to_string(n) + " weights");
    std::vector<CVec> states;
    states.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const CVec& eta = spec.etas[static_cast<std::size_t>(i)];
        if (eta.size() != phi0.size())
            throw DimensionError("perturbed_states: eta " + std::to_string(i) +
                                 " has dimension " + std::to_string(eta.size()) +
                                 ", phi0 has " + std::to_string(phi0.size()));
        require_unit_vector(eta, tol.unit_norm, "perturbed_states(eta)");
        if (spec.orthogonal && std::abs(eta.dot(phi0)) > tol.unit_norm)
            throw ValidationError("perturbed_states: eta " + std::to_string(i) +
                                  " is not orthogonal to phi0");
        CVec s = phi0 + spec.epsilon * spec.v(i) * eta;
        const double norm = s.norm();
        if (norm < 1e-12)
            throw NumericError("perturbed_states: state " + std::to_string(i) +
                               " collapsed to zero");
        states.push_back(s / norm);
    }
    return states;
}

CMat perturbed_gram(const PerturbationSpec& spec, const Tolerances& tol) {
    require_unit_weights(spec.v, "perturbed_gram");
    if (spec.epsilon < 0.0)
        throw RangeError("perturbed_gram: epsilon " + std::to_string(spec.epsilon) +
                         " is negative");
    if (!spec.orthogonal)
        throw ValidationError("perturbed_gram: closed form requires orthogonal etas");
    const CMat delta = delta_of(spec, tol);
    const Index n = spec.v.size();
    const double e2 = spec.epsilon * spec.epsilon;
    CMat S(n, n);
    for (Index i = 0; i < n; ++i) {
        S(i, i) = 1.0;
        const double di = std::sqrt(1.0 + e2 * std::norm(spec.v(i)));
        for (Index j = i + 1; j < n; ++j) {
            const double dj = std::sqrt(1.0 + e2 * std::norm(spec.v(j)));
            const Complex num = 1.0 + e2 * std::conj(spec.v(i)) * spec.v(j) * delta(i, j);
            S(i, j) = num / (di * dj);
            S(j, i) = std::conj(S(i, j));
        }
    }
    return S;
}

CMat interpolation_gram(Index n, double epsilon) {
    if (n < 1) throw DimensionError("interpolation_gram: n must be positive");
    const double cap = std::sqrt(static_cast<double>(n));
    if (epsilon < 0.0 || epsilon > cap)
        throw RangeError("interpolation_gram: epsilon " + std::to_string(epsilon) +
                         " outside [0, sqrt(n)]");
    const double off = 1.0 - epsilon * epsilon / static_cast<double>(n);
    CMat S = CMat::Constant(n, n, Complex(off, 0.0));
    S.diagonal().setOnes();
    return S;
}

double predicted_delta_p(const CMat& H, const PerturbationSpec& spec, const Tolerances& tol) {
    require_unit_weights(spec.v, "predicted_delta_p");
    const CMat delta = delta_of(spec, tol);
    const Index n = spec.v.size();
    if (H.rows() != n || H.cols() != n)
        throw DimensionError("predicted_delta_p: H is " + std::to_string(H.rows()) + "x" +
                             std::to_string(H.cols()) + ", weights have n=" +
                             std::to_string(n));
    const FMatrix fm = f_matrix(H, tol);
    Complex acc(0.0, 0.0);
    for (Index i = 0; i < n; ++i) {
        const double wi = std::norm(spec.v(i));
        for (Index j = 0; j < n; ++j) {
            const double wj = std::norm(spec.v(j));
            const Complex coeff =
                std::conj(spec.v(j)) * spec.v(i) * delta(j, i) - 0.5 * (wi + wj);
            acc += coeff * fm.F(i, j);
        }
    }
    if (std::abs(acc.imag()) > tol.imag_residue * (1.0 + std::abs(acc.real())))
        throw NumericError("predicted_delta_p: imaginary residue " +
                           std::to_string(acc.imag()));
    return acc.real();
}

OptimalDirections optimal_directions(const CMat& H, const Tolerances& tol) {
    const FMatrix fm = f_matrix(H, tol);
    const HermitianEig eig = hermitian_eig(fm.F, tol);
    const Index n = fm.F.rows();
    OptimalDirections out;
    out.lambda_max = eig.eigenvalues(n - 1);
    out.lambda_min = eig.eigenvalues(0);
    out.v_max = eig.eigenvectors.col(n - 1).conjugate();
    out.v_min = eig.eigenvectors.col(0).conjugate();
    if (n >= 2) {
        const double scale_max = std::max(1.0, std::abs(out.lambda_max));
        const double scale_min = std::max(1.0, std::abs(out.lambda_min));
        out.degenerate_max =
            (eig.eigenvalues(n - 1) - eig.eigenvalues(n - 2)) < tol.degenerate_gap * scale_max;
        out.degenerate_min =
            (eig.eigenvalues(1) - eig.eigenvalues(0)) < tol.degenerate_gap * scale_min;
    }
    return out;
}

ScanResult epsilon_scan(const CMat& H, const CVec& v, const CMat& delta,
                        const std::vector<double>& grid, const Tolerances& tol) {
    require_square(H, "epsilon_scan");
    require_psd(H, tol, "epsilon_scan(H)");
    require_unit_weights(v, "epsilon_scan");
    if (H.rows() != v.size())
        throw DimensionError("epsilon_scan: H is " + std::to_string(H.rows()) +
                             "x" + std::to_string(H.cols()) + ", weights have n=" +
                             std::to_string(v.size()));
    if (grid.empty()) throw ValidationError("epsilon_scan: empty grid");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid[k] < 0.0)
            throw RangeError("epsilon_scan: grid point " + std::to_string(grid[k]) +
                             " is negative");
        if (k > 0 && grid[k] <= grid[k - 1])
            throw ValidationError("epsilon_scan: grid is not strictly ascending");
    }
    const Complex p0c = permanent_ryser(H).value;
    const double p0 = p0c.real();
    if (std::abs(p0) < 1e-300)
        throw DegenerateError("epsilon_scan: perm(H) vanishes, ratios are undefined");

    PerturbationSpec base;
    base.v = v;
    base.delta = delta;
    base.orthogonal = true;
    delta_of(base, tol);

    ScanResult out;
    out.rows.resize(grid.size());
    parallel_for(static_cast<Index>(grid.size()), [&](Index k) {
        PerturbationSpec spec = base;
        spec.epsilon = grid[static_cast<std::size_t>(k)];
        const CMat S = perturbed_gram(spec, tol);
        ScanRow row;
        row.epsilon = spec.epsilon;
        row.p_bunch = bunching_probability(H, S, tol);
        row.ratio = row.p_bunch / p0;
        row.indistinguishability = indistinguishability(S, tol);
        out.rows[static_cast<std::size_t>(k)] = row;
    });

    std::size_t best = 0;
    for (std::size_t k = 1; k < out.rows.size(); ++k)
        if (out.rows[k].p_bunch > out.rows[best].p_bunch) best = k;
    out.argmax_epsilon = out.rows[best].epsilon;
    out.description = "exact perturbed-Gram sweep, n=" + std::to_string(v.size()) +
                      ", " + std::to_string(grid.size()) + " points";
    return out;
}

}  // namespace bunchlab
