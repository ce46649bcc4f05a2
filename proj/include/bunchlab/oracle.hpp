#pragma once

#include <vector>

#include "bunchlab/errors.hpp"
#include "bunchlab/interferometry.hpp"
#include "bunchlab/types.hpp"

namespace bunchlab {

/// Probability of one spatial photon-count pattern at the interferometer
/// output, internal degrees of freedom traced out.
struct OutputProbability {
    std::vector<int> occupation;  ///< photon count per spatial mode
    double probability = 0.0;
};

/// Brute-force Fock-space evaluation of the probability that all photons
/// leave through the output subset K. Photon j enters spatial mode j in the
/// internal state states[j]; the creation operators are propagated through
/// U literally and the output state is expanded over composite
/// (spatial, internal) occupations. Capped at n <= 4 photons and m <= 6
/// modes. Agrees with the permanent formula without ever forming one of the
/// Hadamard-product permanents it validates.
double fock_bunching_oracle(const Interferometer& itf, const std::vector<Index>& K,
                            const std::vector<CVec>& states, const Tolerances& tol = {});

/// Full output distribution over spatial occupations, in ascending
/// lexicographic order and including zero-probability patterns. Same caps
/// and input conventions as the oracle; probabilities sum to 1.
std::vector<OutputProbability> output_distribution(const Interferometer& itf,
                                                   const std::vector<CVec>& states,
                                                   const Tolerances& tol = {});

}  // namespace bunchlab
