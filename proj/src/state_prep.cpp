#include "qpesim/state_prep.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qpesim/rng.hpp"

namespace qpesim {

StateVector::StateVector(Eigen::VectorXcd amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw std::invalid_argument("StateVector: empty amplitude vector");
    const double n = amps_.norm();
    if (std::abs(n - 1.0) > 1e-12) {
        throw std::invalid_argument("StateVector: amplitudes must be unit norm, got " +
                                    std::to_string(n));
    }
}

StateVector StateVector::normalized(Eigen::VectorXcd raw) {
    const double n = raw.norm();
    if (n == 0.0) throw std::invalid_argument("StateVector::normalized: zero vector");
    raw /= n;
    return StateVector(std::move(raw));
}

StateVector StateVector::from_real(const Eigen::VectorXd& v) {
    return normalized(v.cast<std::complex<double>>());
}

StateVector replicate(const StateVector& coarse, int appended_qubits) {
    if (appended_qubits < 0 || appended_qubits > 30) {
        throw std::invalid_argument("replicate: appended_qubits must be in [0, 30]");
    }
    if (appended_qubits == 0) return coarse;

    const auto copies = std::int64_t{1} << appended_qubits;
    const Eigen::Index n0 = coarse.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(copies));

    Eigen::VectorXcd out(n0 * copies);
    for (Eigen::Index i = 0; i < n0; ++i) {
        const std::complex<double> a = coarse.amplitudes()(i) * scale;
        for (std::int64_t m = 0; m < copies; ++m) {
            out(i * copies + m) = a;
        }
    }
    return StateVector(std::move(out));
}

namespace {

void check_pair_orthonormal(std::span<const EigenPair> basis, std::size_t l, std::size_t m) {
    const double overlap = std::abs(basis[l].vector.dot(basis[m].vector));
    if (overlap > 1e-10) {
        std::ostringstream msg;
        msg << "overlap_analysis: basis not orthonormal, |<U_" << l << "|U_" << m
            << ">| = " << overlap;
        throw std::invalid_argument(msg.str());
    }
}

void check_orthonormal(std::span<const EigenPair> basis, int k) {
    const std::size_t n = basis.size();
    for (std::size_t l = 0; l < n; ++l) {
        if (std::abs(basis[l].vector.norm() - 1.0) > 1e-10) {
            throw std::invalid_argument("overlap_analysis: basis vector " + std::to_string(l) +
                                        " is not unit norm");
        }
    }
    if (n <= 1024) {
        for (std::size_t l = 0; l < n; ++l) {
            for (std::size_t m = l + 1; m < n; ++m) {
                check_pair_orthonormal(basis, l, m);
            }
        }
        return;
    }
    // Large bases: consecutive pairs, every pair involving k, and a seeded
    // random sample. Full Gram at this size would dominate the run time.
    for (std::size_t l = 0; l + 1 < n; ++l) check_pair_orthonormal(basis, l, l + 1);
    for (std::size_t l = 0; l < n; ++l) {
        if (l != static_cast<std::size_t>(k)) check_pair_orthonormal(basis, l, static_cast<std::size_t>(k));
    }
    Rng rng(0x5eedu);
    for (int trial = 0; trial < 512; ++trial) {
        const auto a = static_cast<std::size_t>(rng.next_u64() % n);
        const auto b = static_cast<std::size_t>(rng.next_u64() % n);
        if (a != b) check_pair_orthonormal(basis, a, b);
    }
}

} // namespace

OverlapReport overlap_analysis(std::span<const EigenPair> fine_basis, int k,
                               const StateVector& prepared) {
    const auto n = static_cast<Eigen::Index>(fine_basis.size());
    if (n == 0 || prepared.size() != n) {
        throw std::invalid_argument(
            "overlap_analysis: basis must be complete (one eigenpair per dimension)");
    }
    if (k < 0 || k >= n) throw std::invalid_argument("overlap_analysis: k out of range");
    for (const EigenPair& p : fine_basis) {
        if (p.vector.size() != n) {
            throw std::invalid_argument("overlap_analysis: basis vector length mismatch");
        }
    }
    check_orthonormal(fine_basis, k);

    OverlapReport report;
    report.coefficients.resize(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        // d_{k,l} = <U_l | prepared>; basis vectors are real
        report.coefficients(l) =
            fine_basis[static_cast<std::size_t>(l)].vector.cast<std::complex<double>>().dot(
                prepared.amplitudes());
    }
    report.success_probability = std::norm(report.coefficients(k));
    report.failure = 1.0 - report.success_probability;
    report.error_norm =
        (prepared.amplitudes() -
         fine_basis[static_cast<std::size_t>(k)].vector.cast<std::complex<double>>())
            .norm();
    return report;
}

OverlapSummary overlap_summary(const EigenPair& fine_target, const StateVector& prepared) {
    if (fine_target.vector.size() != prepared.size()) {
        throw std::invalid_argument("overlap_summary: dimension mismatch");
    }
    const Eigen::VectorXcd target = fine_target.vector.cast<std::complex<double>>();
    OverlapSummary s;
    s.success_probability = std::norm(target.dot(prepared.amplitudes()));
    s.failure = 1.0 - s.success_probability;
    s.error_norm = (prepared.amplitudes() - target).norm();
    return s;
}

StateVector perturbed_coarse_input(const EigenPair& coarse, double noise_magnitude,
                                   std::uint64_t rng_seed) {
    const double delta = noise_magnitude;
    if (!(delta >= 0.0) || delta >= 1.0) {
        throw std::invalid_argument("perturbed_coarse_input: require 0 <= delta < 1");
    }
    if (delta == 0.0) return StateVector::from_real(coarse.vector);

    const Eigen::Index n = coarse.vector.size();
    Rng rng(rng_seed);

    // Random direction orthogonal to the eigenvector.
    Eigen::VectorXd w(n);
    double w_norm = 0.0;
    do {
        for (Eigen::Index i = 0; i < n; ++i) w(i) = rng.gaussian();
        w -= coarse.vector.dot(w) * coarse.vector;
        w_norm = w.norm();
    } while (w_norm < 1e-12);
    w /= w_norm;

    // cos(theta) u + sin(theta) w with 2 - 2 cos(theta) = delta^2 keeps the
    // result unit norm at exact distance delta from u.
    const double c = 1.0 - 0.5 * delta * delta;
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const Eigen::VectorXd out = c * coarse.vector + s * w;
    return StateVector(out.cast<std::complex<double>>());
}

PowerLawFit failure_scaling_fit(std::span<const std::pair<double, double>> samples) {
    std::vector<double> lx, ly;
    PowerLawFit fit;
    std::set<double> seen;
    for (const auto& [n0, failure] : samples) {
        if (!(failure > 0.0)) {
            ++fit.points_excluded;
            continue;
        }
        if (!(n0 > 0.0)) throw std::invalid_argument("failure_scaling_fit: N0 must be positive");
        if (!seen.insert(n0).second) {
            throw std::invalid_argument("failure_scaling_fit: duplicate N0 value " +
                                        std::to_string(n0));
        }
        lx.push_back(std::log(n0));
        ly.push_back(std::log(failure));
    }
    const auto m = static_cast<int>(lx.size());
    if (m < 3) {
        throw std::invalid_argument("failure_scaling_fit: need at least 3 usable samples, have " +
                                    std::to_string(m));
    }

    double mean_x = 0.0, mean_y = 0.0;
    for (int i = 0; i < m; ++i) {
        mean_x += lx[static_cast<std::size_t>(i)];
        mean_y += ly[static_cast<std::size_t>(i)];
    }
    mean_x /= m;
    mean_y /= m;

    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < m; ++i) {
        const double dx = lx[static_cast<std::size_t>(i)] - mean_x;
        sxx += dx * dx;
        sxy += dx * (ly[static_cast<std::size_t>(i)] - mean_y);
    }
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    double ss = 0.0;
    for (int i = 0; i < m; ++i) {
        const double r = ly[static_cast<std::size_t>(i)] -
                         (fit.intercept + fit.slope * lx[static_cast<std::size_t>(i)]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / m);
    fit.points_used = m;
    return fit;
}

} // namespace qpesim
