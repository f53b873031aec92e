#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace qpesim {

/// Fractional circle distance min_{x in Z} |x + phi1 - phi0|, in [0, 1/2].
/// The natural metric for eigenphases.
double wrap_distance(double phi0, double phi1);

/// Phase-estimation amplitude kernel for a b-bit register:
///
///   g(phi, j) = sin(pi (2^b phi - j)) e^{i pi (phi - j 2^{-b})(2^b - 1)}
///               / (2^b sin(pi (phi - j 2^{-b})))
///
/// and exactly 1 when 2^b phi = j. |g| <= 1 always. Phases within 1e-12 of
/// the bin (|2^b phi - j| < 1e-12) take the exact branch.
std::complex<double> g_kernel(double phi, std::int64_t j, int b);

/// Spectral content of the second register: eigenphases phi_l in [0,1) and
/// the expansion amplitudes d_l of the prepared state, sum |d_l|^2 = 1.
struct SpectralInstance {
    std::vector<double> phases;
    Eigen::VectorXcd amplitudes;

    /// Throws std::invalid_argument if a phase leaves [0,1), the sizes
    /// disagree, or the amplitudes are not normalized within 1e-10.
    void validate() const;
};

/// Measurement probabilities p_j over j = 0..2^b-1 for the first register.
struct OutcomeDistribution {
    int b = 0;
    std::vector<double> probabilities;
};

/// Analytic outcome distribution p_j = sum_u |d_u|^2 |g(phi_u, j)|^2.
OutcomeDistribution outcome_distribution(const SpectralInstance& instance, int b);

/// Pre-measurement joint state built by the literal pipeline: uniform
/// superposition of the b-bit register, phase kicks e^{2 pi i j phi_u}, then
/// the inverse discrete Fourier transform on the first register. Entry
/// (j, u) of the returned 2^b x N matrix is the joint amplitude.
///
/// Desk-scale only: throws ResourceLimit for N > 4096 or b > 10. Serves as
/// the independent cross-check of the analytic path.
Eigen::MatrixXcd statevector_qpe(const SpectralInstance& instance, int b);

/// Marginal probabilities of the first register from a joint state.
std::vector<double> first_register_marginal(const Eigen::MatrixXcd& joint);

/// Post-measurement state of the second register given outcome j:
/// coefficient d_u g(phi_u, j) / sqrt(p_j) on eigenvector u.
struct CollapseResult {
    std::int64_t outcome = 0;
    Eigen::VectorXcd coefficients;
};

/// Collapse onto outcome j. Throws std::invalid_argument when p_j = 0
/// (impossible outcome).
CollapseResult collapse(const SpectralInstance& instance, int b, std::int64_t outcome_j);

/// Bins within wraparound distance window_k / 2^b of the target phase,
/// sorted ascending. window_k >= 1.
std::vector<std::int64_t> good_set(double phi_target, int b, int window_k);

/// Lower bound on the probability of measuring inside the good set:
/// (8/pi^2) |d|^2 for window_k = 1, |d|^2 (1 - 1/(2(window_k - 1))) beyond.
double good_set_probability_bound(double d_target_sq, int window_k);

/// Measured good-set probability: sum of p_j over the good set.
double good_set_probability(const OutcomeDistribution& dist, double phi_target, int window_k);

/// Smallest ancilla count giving accuracy 2^{-n} with probability at least
/// |d|^2 (1 - epsilon): b = n + ceil(log2(1 + 1/(2 epsilon))).
int choose_b(int n, double epsilon);

/// Multinomial shot counts per bin, deterministic for a given seed.
std::vector<std::int64_t> sample_outcomes(const OutcomeDistribution& dist, std::int64_t shots,
                                          std::uint64_t rng_seed);

/// Eigenvalue-to-phase map for the evolution operator e^{-iHt}:
/// phi = (lambda t / 2 pi) mod 1. `aliased` flags lambda t / 2 pi >= 1,
/// where the mod makes the phase ambiguous.
struct PhaseMapping {
    double phase = 0.0;
    bool aliased = false;
};

PhaseMapping map_eigenvalue_to_phase(double lambda, double t);

/// Inverse map, exact whenever the phase was not aliased.
double phase_to_eigenvalue(double phase, double t);

/// Evolution time that lands every eigenvalue of a spectrum bounded by
/// lambda_upper strictly inside [0, 1): t = 2 pi (1 - 2^{-b}) / lambda_upper.
double evolution_time_for(double lambda_upper, int b);

/// Register sizing and phase mapping parameters for one QPE run.
struct PhaseConfig {
    int b = 0;                    ///< ancilla qubit count
    double evolution_time = 0.0;  ///< t in e^{-iHt}
    int target_accuracy_bits = 0; ///< n
    double epsilon = 0.0;         ///< failure budget
};

} // namespace qpesim
