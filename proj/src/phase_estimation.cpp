#include "qpesim/phase_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qpesim/errors.hpp"
#include "qpesim/rng.hpp"

namespace qpesim {

namespace {

constexpr double kPi = std::numbers::pi;

void require_register(int b) {
    if (b < 1 || b > 30) {
        throw std::invalid_argument("register size b must be in [1, 30], got " +
                                    std::to_string(b));
    }
}

std::int64_t bins_of(int b) { return std::int64_t{1} << b; }

// sin(pi x) with exact range reduction. Subtracting the nearest even
// integer and folding into [-1/2, 1/2] are exact in floating point, so the
// result keeps full relative accuracy even for x ~ 2^b, where sin(pi * x)
// evaluated directly would lose ~b bits to the rounding of pi * x.
double sin_pi(double x) {
    double r = x - 2.0 * std::round(x * 0.5); // r in [-1, 1], exact
    if (r > 0.5) {
        r = 1.0 - r;
    } else if (r < -0.5) {
        r = -1.0 - r;
    }
    return std::sin(kPi * r);
}

// In-place radix-2 decimation-in-time FFT with kernel e^{-2 pi i jk / M}
// and 1/sqrt(M) normalization, i.e. the inverse quantum Fourier transform
// on a length-M register. M must be a power of two.
void inverse_qft(Eigen::VectorXcd& a) {
    const auto m = static_cast<std::size_t>(a.size());
    // bit reversal permutation
    for (std::size_t i = 1, j = 0; i < m; ++i) {
        std::size_t bit = m >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a(static_cast<Eigen::Index>(i)), a(static_cast<Eigen::Index>(j)));
    }
    for (std::size_t len = 2; len <= m; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < m; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const auto lo = static_cast<Eigen::Index>(i + j);
                const auto hi = static_cast<Eigen::Index>(i + j + len / 2);
                const std::complex<double> u = a(lo);
                const std::complex<double> v = a(hi) * w;
                a(lo) = u + v;
                a(hi) = u - v;
                w *= wl;
            }
        }
    }
    a /= std::sqrt(static_cast<double>(m));
}

} // namespace

double wrap_distance(double phi0, double phi1) {
    if (!std::isfinite(phi0) || !std::isfinite(phi1)) {
        throw std::invalid_argument("wrap_distance: inputs must be finite");
    }
    double r = std::fmod(std::abs(phi1 - phi0), 1.0);
    if (r > 0.5) r = 1.0 - r;
    return r;
}

std::complex<double> g_kernel(double phi, std::int64_t j, int b) {
    require_register(b);
    const std::int64_t m = bins_of(b);
    if (j < 0 || j >= m) {
        throw std::invalid_argument("g_kernel: j must be in [0, 2^b)");
    }
    const double md = static_cast<double>(m);
    const double theta = phi * md - static_cast<double>(j); // 2^b phi - j

    if (std::abs(theta) < 1e-12) return {1.0, 0.0}; // representable phase, right bin

    const double num = sin_pi(theta);
    const double den = md * sin_pi(theta / md);
    const double arg = kPi * theta * (md - 1.0) / md; // pi (phi - j/2^b)(2^b - 1)
    return std::polar(num / den, arg);
}

void SpectralInstance::validate() const {
    if (phases.size() != static_cast<std::size_t>(amplitudes.size()) || phases.empty()) {
        throw std::invalid_argument("SpectralInstance: phases/amplitudes size mismatch");
    }
    for (double phi : phases) {
        if (!(phi >= 0.0) || phi >= 1.0) {
            throw std::invalid_argument("SpectralInstance: phase " + std::to_string(phi) +
                                        " outside [0, 1)");
        }
    }
    const double n = amplitudes.norm();
    if (std::abs(n - 1.0) > 1e-10) {
        throw std::invalid_argument("SpectralInstance: amplitudes not normalized, |d| = " +
                                    std::to_string(n));
    }
}

OutcomeDistribution outcome_distribution(const SpectralInstance& instance, int b) {
    instance.validate();
    require_register(b);
    const std::int64_t m = bins_of(b);

    OutcomeDistribution dist;
    dist.b = b;
    dist.probabilities.assign(static_cast<std::size_t>(m), 0.0);
    for (std::size_t u = 0; u < instance.phases.size(); ++u) {
        const double weight = std::norm(instance.amplitudes(static_cast<Eigen::Index>(u)));
        if (weight == 0.0) continue;
        for (std::int64_t j = 0; j < m; ++j) {
            dist.probabilities[static_cast<std::size_t>(j)] +=
                weight * std::norm(g_kernel(instance.phases[u], j, b));
        }
    }
    return dist;
}

Eigen::MatrixXcd statevector_qpe(const SpectralInstance& instance, int b) {
    instance.validate();
    require_register(b);
    const auto n = static_cast<Eigen::Index>(instance.phases.size());
    if (n > 4096 || b > 10) {
        std::ostringstream msg;
        msg << "statevector_qpe: desk-scale budget is N <= 4096, b <= 10; got N=" << n
            << ", b=" << b;
        throw ResourceLimit(msg.str());
    }
    const std::int64_t m = bins_of(b);

    Eigen::MatrixXcd joint(m, n);
    Eigen::VectorXcd column(m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (Eigen::Index u = 0; u < n; ++u) {
        // equal superposition with phase kicks: d_u e^{2 pi i j phi_u} / sqrt(M)
        const double phi = instance.phases[static_cast<std::size_t>(u)];
        const std::complex<double> d = instance.amplitudes(u);
        for (std::int64_t j = 0; j < m; ++j) {
            column(static_cast<Eigen::Index>(j)) =
                d * scale * std::polar(1.0, 2.0 * kPi * static_cast<double>(j) * phi);
        }
        inverse_qft(column);
        joint.col(u) = column;
    }
    return joint;
}

std::vector<double> first_register_marginal(const Eigen::MatrixXcd& joint) {
    std::vector<double> p(static_cast<std::size_t>(joint.rows()), 0.0);
    for (Eigen::Index j = 0; j < joint.rows(); ++j) {
        p[static_cast<std::size_t>(j)] = joint.row(j).squaredNorm();
    }
    return p;
}

CollapseResult collapse(const SpectralInstance& instance, int b, std::int64_t outcome_j) {
    instance.validate();
    require_register(b);
    if (outcome_j < 0 || outcome_j >= bins_of(b)) {
        throw std::invalid_argument("collapse: outcome outside [0, 2^b)");
    }

    const auto n = static_cast<Eigen::Index>(instance.phases.size());
    Eigen::VectorXcd unnormalized(n);
    for (Eigen::Index u = 0; u < n; ++u) {
        unnormalized(u) = instance.amplitudes(u) *
                          g_kernel(instance.phases[static_cast<std::size_t>(u)], outcome_j, b);
    }
    // p_j from the same kernel evaluations keeps the collapse exactly unit norm
    const double p_j = unnormalized.squaredNorm();
    if (p_j == 0.0) {
        throw std::invalid_argument("collapse: outcome " + std::to_string(outcome_j) +
                                    " has zero probability");
    }
    CollapseResult result;
    result.outcome = outcome_j;
    result.coefficients = unnormalized / std::sqrt(p_j);
    return result;
}

std::vector<std::int64_t> good_set(double phi_target, int b, int window_k) {
    require_register(b);
    if (window_k < 1) throw std::invalid_argument("good_set: window_k must be >= 1");
    const std::int64_t m = bins_of(b);
    const double radius = static_cast<double>(window_k) / static_cast<double>(m);

    std::vector<std::int64_t> bins;
    for (std::int64_t j = 0; j < m; ++j) {
        if (wrap_distance(static_cast<double>(j) / static_cast<double>(m), phi_target) <= radius) {
            bins.push_back(j);
        }
    }
    return bins;
}

double good_set_probability_bound(double d_target_sq, int window_k) {
    if (window_k < 1) {
        throw std::invalid_argument("good_set_probability_bound: window_k must be >= 1");
    }
    if (!(d_target_sq >= 0.0) || d_target_sq > 1.0 + 1e-12) {
        throw std::invalid_argument("good_set_probability_bound: |d|^2 must be in [0, 1]");
    }
    if (window_k == 1) return (8.0 / (kPi * kPi)) * d_target_sq;
    return d_target_sq * (1.0 - 1.0 / (2.0 * (window_k - 1)));
}

double good_set_probability(const OutcomeDistribution& dist, double phi_target, int window_k) {
    double total = 0.0;
    for (std::int64_t j : good_set(phi_target, dist.b, window_k)) {
        total += dist.probabilities[static_cast<std::size_t>(j)];
    }
    return total;
}

int choose_b(int n, double epsilon) {
    if (n < 1) throw std::invalid_argument("choose_b: n must be >= 1");
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw std::invalid_argument("choose_b: epsilon must be in (0, 1)");
    }
    return n + static_cast<int>(std::ceil(std::log2(1.0 + 1.0 / (2.0 * epsilon))));
}

std::vector<std::int64_t> sample_outcomes(const OutcomeDistribution& dist, std::int64_t shots,
                                          std::uint64_t rng_seed) {
    if (shots < 1) throw std::invalid_argument("sample_outcomes: shots must be >= 1");
    Rng rng(rng_seed);
    return multinomial_sample(dist.probabilities, shots, rng);
}

PhaseMapping map_eigenvalue_to_phase(double lambda, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("map_eigenvalue_to_phase: t must be > 0");
    const double turns = lambda * t / (2.0 * kPi);
    PhaseMapping out;
    out.aliased = turns >= 1.0 || turns < 0.0;
    out.phase = turns - std::floor(turns);
    if (out.phase == 1.0) out.phase = 0.0; // fmod edge
    return out;
}

double phase_to_eigenvalue(double phase, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("phase_to_eigenvalue: t must be > 0");
    return 2.0 * kPi * phase / t;
}

double evolution_time_for(double lambda_upper, int b) {
    require_register(b);
    if (!(lambda_upper > 0.0)) {
        throw std::invalid_argument("evolution_time_for: lambda_upper must be > 0");
    }
    const double headroom = 1.0 - std::ldexp(1.0, -b); // 1 - 2^{-b}
    return 2.0 * kPi * headroom / lambda_upper;
}

} // namespace qpesim
