#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qpesim/grid_operator.hpp"

namespace qpesim {

/// Complex amplitude vector of unit 2-norm. Any length is allowed here;
/// only the register-based statevector path insists on powers of two.
class StateVector {
public:
    /// Wrap amplitudes that are already unit norm (within 1e-12).
    explicit StateVector(Eigen::VectorXcd amplitudes);

    /// Normalize a raw amplitude vector (throws on the zero vector).
    static StateVector normalized(Eigen::VectorXcd raw);

    /// Normalize a real coordinate vector.
    static StateVector from_real(const Eigen::VectorXd& v);

    Eigen::Index size() const { return amps_.size(); }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }

private:
    Eigen::VectorXcd amps_;
};

/// Coarse-to-fine state preparation: append s qubits in |0>, Hadamard each.
/// The result repeats every coarse coordinate 2^s consecutive times and
/// rescales by 2^{-s/2}; index map f(j) = floor(j / 2^s). Output length is
/// 2^s * len(coarse). s = 0 returns the input unchanged.
StateVector replicate(const StateVector& coarse, int appended_qubits);

/// Success/failure numbers of a prepared state against one target eigenpair.
struct OverlapSummary {
    double success_probability = 0.0; ///< |<U_k|prepared>|^2
    double failure = 0.0;             ///< 1 - success_probability
    double error_norm = 0.0;          ///< || U_k - prepared ||_2
};

/// Full eigenbasis expansion of the prepared state.
struct OverlapReport {
    Eigen::VectorXcd coefficients; ///< d_{k,l} = <U_l|prepared>, length N
    double success_probability = 0.0;
    double error_norm = 0.0;
    double failure = 0.0;
};

/// Expand `prepared` in the complete fine-grid eigenbasis and report the
/// success probability |d_{k,k}|^2, the failure 1 - |d_{k,k}|^2 and the
/// error norm against eigenvector k.
///
/// The basis must be complete (N vectors of length N) and orthonormal;
/// pairwise overlaps are checked (|<U_l|U_m>| <= 1e-10) and a violation
/// throws std::invalid_argument naming the offending pair. For N > 1024
/// the pairwise check samples consecutive pairs, every pair involving k and
/// a seeded random subset instead of the full Gram matrix.
OverlapReport overlap_analysis(std::span<const EigenPair> fine_basis, int k,
                               const StateVector& prepared);

/// Same success/failure/error numbers from the target eigenpair alone.
/// Agrees with overlap_analysis (completeness of the basis makes
/// sum_l |d_{k,l}|^2 = 1); used where solving for the full fine basis
/// would be wasteful.
OverlapSummary overlap_summary(const EigenPair& fine_target, const StateVector& prepared);

/// A unit vector at exact 2-norm distance delta (within 1e-12) from the
/// coarse eigenvector, in a direction drawn deterministically from the
/// seed. Models inexact classical solving of the coarse problem.
/// Requires 0 <= delta < 1.
StateVector perturbed_coarse_input(const EigenPair& coarse, double noise_magnitude,
                                   std::uint64_t rng_seed);

/// Least-squares power-law fit of failure against coarse size.
struct PowerLawFit {
    double slope = 0.0;        ///< d log(failure) / d log(N0)
    double intercept = 0.0;    ///< log-log intercept
    double rms_residual = 0.0; ///< RMS of log-space residuals
    int points_used = 0;
    int points_excluded = 0;   ///< samples dropped for failure <= 0
};

/// Fit log(failure) vs log(N0) by ordinary least squares. Samples with
/// failure <= 0 are excluded (counted in points_excluded); fewer than 3
/// usable points or duplicate N0 values throw std::invalid_argument.
PowerLawFit failure_scaling_fit(std::span<const std::pair<double, double>> samples);

} // namespace qpesim
