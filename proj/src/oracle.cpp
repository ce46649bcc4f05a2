#include "bunchlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>

#include "bunchlab/matcore.hpp"

namespace bunchlab {

namespace {

constexpr Index kMaxPhotons = 4;
constexpr Index kMaxModes = 6;

/// Monomial coefficients of the output state keyed by composite occupation,
/// occupation[l * d + k] counting photons in spatial mode l, internal mode k.
using AmplitudeMap = std::map<std::vector<int>, Complex>;

struct Expansion {
    AmplitudeMap amplitudes;  ///< normalized Fock amplitudes per occupation
    Index m = 0;
    Index d = 0;
};

Expansion expand_output_state(const Interferometer& itf, const std::vector<CVec>& states,
                              const Tolerances& tol) {
    const Index m = itf.U.rows();
    if (itf.m != m)
        throw ValidationError("fock oracle: interferometer mode count mismatch");
    require_unitary(itf.U, tol.unitary_input, "fock oracle");
    const Index n = static_cast<Index>(states.size());
    if (n < 1) throw ValidationError("fock oracle: no input photons");
    if (n > kMaxPhotons)
        throw SizeCapError("fock oracle: n=" + std::to_string(n) + " exceeds cap " +
                           std::to_string(kMaxPhotons));
    if (m > kMaxModes)
        throw SizeCapError("fock oracle: m=" + std::to_string(m) + " exceeds cap " +
                           std::to_string(kMaxModes));
    if (n > m)
        throw DimensionError("fock oracle: " + std::to_string(n) + " photons need " +
                             std::to_string(n) + " input modes, interferometer has " +
                             std::to_string(m));

    const CMat S = gram_from_vectors(states, tol);
    const CholeskyGram basis = cholesky_gram(S, tol);
    const Index d = basis.C.rows();

    AmplitudeMap monomials;
    monomials.emplace(std::vector<int>(static_cast<std::size_t>(m * d), 0), Complex(1.0, 0.0));
    for (Index j = 0; j < n; ++j) {
        AmplitudeMap next;
        for (const auto& [occ, amp] : monomials) {
            for (Index l = 0; l < m; ++l) {
                const Complex propagated = std::conj(itf.U(l, j));
                for (Index k = 0; k < d; ++k) {
                    const Complex coeff = amp * basis.C(k, j) * propagated;
                    if (coeff == Complex(0.0, 0.0)) continue;
                    std::vector<int> raised = occ;
                    raised[static_cast<std::size_t>(l * d + k)] += 1;
                    next[std::move(raised)] += coeff;
                }
            }
        }
        monomials = std::move(next);
    }

    Expansion out;
    out.m = m;
    out.d = d;
    double total = 0.0;
    for (const auto& [occ, coeff] : monomials) {
        double norm_factor = 1.0;
        for (int c : occ)
            for (int k = 2; k <= c; ++k) norm_factor *= static_cast<double>(k);
        const Complex amp = coeff * std::sqrt(norm_factor);
        out.amplitudes.emplace(occ, amp);
        total += std::norm(amp);
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw NumericError("fock oracle: output norm " + std::to_string(total) +
                           " deviates from 1");
    return out;
}

}  // namespace

double fock_bunching_oracle(const Interferometer& itf, const std::vector<Index>& K,
                            const std::vector<CVec>& states, const Tolerances& tol) {
    const Index m = itf.U.rows();
    if (K.empty()) throw ValidationError("fock oracle: output subset must be nonempty");
    std::vector<Index> subset = K;
    std::sort(subset.begin(), subset.end());
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (subset[i] < 0 || subset[i] >= m)
            throw ValidationError("fock oracle: subset index out of range");
        if (i > 0 && subset[i] == subset[i - 1])
            throw ValidationError("fock oracle: subset indices must be distinct");
    }
    std::vector<bool> in_subset(static_cast<std::size_t>(m), false);
    for (Index l : subset) in_subset[static_cast<std::size_t>(l)] = true;

    const Expansion state = expand_output_state(itf, states, tol);
    double bunched = 0.0;
    for (const auto& [occ, amp] : state.amplitudes) {
        bool inside = true;
        for (Index l = 0; l < state.m && inside; ++l) {
            if (in_subset[static_cast<std::size_t>(l)]) continue;
            for (Index k = 0; k < state.d; ++k) {
                if (occ[static_cast<std::size_t>(l * state.d + k)] > 0) {
                    inside = false;
                    break;
                }
            }
        }
        if (inside) bunched += std::norm(amp);
    }
    return std::min(bunched, 1.0);
}

std::vector<OutputProbability> output_distribution(const Interferometer& itf,
                                                   const std::vector<CVec>& states,
                                                   const Tolerances& tol) {
    const Expansion state = expand_output_state(itf, states, tol);
    const Index m = state.m;
    const Index n = static_cast<Index>(states.size());

    std::map<std::vector<int>, double> marginal;
    for (const auto& [occ, amp] : state.amplitudes) {
        std::vector<int> spatial(static_cast<std::size_t>(m), 0);
        for (Index l = 0; l < m; ++l)
            for (Index k = 0; k < state.d; ++k)
                spatial[static_cast<std::size_t>(l)] +=
                    occ[static_cast<std::size_t>(l * state.d + k)];
        marginal[std::move(spatial)] += std::norm(amp);
    }

    std::vector<OutputProbability> rows;
    std::vector<int> pattern(static_cast<std::size_t>(m), 0);
    double total = 0.0;
    const auto emit = [&](const auto& self, Index mode, int remaining) -> void {
        if (mode == m - 1) {
            pattern[static_cast<std::size_t>(mode)] = remaining;
            OutputProbability row;
            row.occupation = pattern;
            const auto it = marginal.find(pattern);
            row.probability = it == marginal.end() ? 0.0 : it->second;
            total += row.probability;
            rows.push_back(std::move(row));
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            pattern[static_cast<std::size_t>(mode)] = c;
            self(self, mode + 1, remaining - c);
        }
    };
    emit(emit, 0, static_cast<int>(n));
    if (std::abs(total - 1.0) > 1e-10)
        throw NumericError("output_distribution: probabilities sum to " +
                           std::to_string(total));
    return rows;
}

}  // namespace bunchlab
