#pragma once

#include <string>
#include <vector>

#include "bunchlab/errors.hpp"
#include "bunchlab/types.hpp"

namespace bunchlab {

/// A family of photon internal states is a list of unit-norm complex vectors
/// sharing one dimension, one per photon.

/// Perturbation of n photons that all start in one internal state phi0:
/// photon i is steered toward a unit vector eta_i with weight epsilon * v_i.
struct PerturbationSpec {
    double epsilon = 0.0;
    CVec v;                  ///< direction weights, unit 2-norm
    CMat delta;              ///< Gram of the eta vectors; may be empty when etas given
    std::vector<CVec> etas;  ///< explicit eta vectors; may be empty when delta given
    bool orthogonal = true;  ///< asserts <eta_i|phi0> = 0 for all i
};

/// The perturbation Gram of a PerturbationSpec: delta when stored,
/// otherwise the Gram of the explicit eta vectors.
CMat delta_of(const PerturbationSpec& spec, const Tolerances& tol = {});

/// Probability that all n photons with internal Gram S land inside the
/// output subset encoded by H: the permanent of H with the transposed S
/// entering elementwise. Real in [0, 1] after an imaginary-residue check.
double bunching_probability(const CMat& H, const CMat& S, const Tolerances& tol = {});

/// perm(S) / n!, the weight of the permutation-symmetric component of the
/// joint internal state: 1 for identical photons, 1/n! for orthogonal ones.
/// Capped at n <= 16.
double indistinguishability(const CMat& S, const Tolerances& tol = {});

/// The normalized perturbed states (phi0 + epsilon v_i eta_i) / norm.
/// Requires explicit eta vectors.
std::vector<CVec> perturbed_states(const CVec& phi0, const PerturbationSpec& spec,
                                   const Tolerances& tol = {});

/// Exact closed-form Gram of the perturbed states for orthogonal
/// perturbations:
///   S_ij = (1 + eps^2 conj(v_i) v_j Delta_ij)
///          / sqrt((1 + eps^2 |v_i|^2)(1 + eps^2 |v_j|^2)).
CMat perturbed_gram(const PerturbationSpec& spec, const Tolerances& tol = {});

/// Uniform-overlap model: off-diagonal entries 1 - eps^2 / n, diagonal 1.
/// At eps = sqrt(n) this reaches the identity (fully distinguishable).
CMat interpolation_gram(Index n, double epsilon);

/// Leading coefficient of the bunching-probability change under a
/// perturbation, i.e. the second-order variation per epsilon^2:
///   sum_ij (conj(v_j) v_i Delta_ji - |v_i|^2 / 2 - |v_j|^2 / 2) F_ij
/// with F the permanental-cofactor matrix of H. For Delta all ones this is
/// conj(v)^dag F conj(v) - perm(H); for Delta = I and uniform v it is
/// trace(F)/n - perm(H).
double predicted_delta_p(const CMat& H, const PerturbationSpec& spec,
                         const Tolerances& tol = {});

/// Extremal perturbation weights for a setup H. The second-order coefficient
/// for weights v with Delta all ones equals w^dag F w with w = conj(v), so
/// the extremal weights are the entrywise conjugates of the phase-fixed
/// extreme eigenvectors of F; they saturate the bounds
///   lambda_min - perm(H) <= delta P / eps^2 <= lambda_max - perm(H).
struct OptimalDirections {
    CVec v_max;
    CVec v_min;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    bool degenerate_max = false;  ///< top eigenvalue within gap tolerance of the next
    bool degenerate_min = false;  ///< bottom eigenvalue within gap tolerance of the next
};

OptimalDirections optimal_directions(const CMat& H, const Tolerances& tol = {});

struct ScanRow {
    double epsilon = 0.0;
    double p_bunch = 0.0;
    double ratio = 0.0;
    double indistinguishability = 0.0;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    double argmax_epsilon = 0.0;  ///< grid point with the largest p_bunch
    std::string description;
};

/// Sweep the exact perturbed Gram over an ascending epsilon grid and report
/// (epsilon, P, P / perm(H), indistinguishability) per point. Rows are
/// computed concurrently and assembled in grid order.
ScanResult epsilon_scan(const CMat& H, const CVec& v, const CMat& delta,
                        const std::vector<double>& grid, const Tolerances& tol = {});

}  // namespace bunchlab
