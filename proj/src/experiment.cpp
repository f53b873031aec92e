#include "qpesim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qpesim/errors.hpp"
#include "qpesim/rng.hpp"

namespace qpesim {

namespace {

bool is_power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

std::string point_label(int n0, int s) {
    return "(N0=" + std::to_string(n0) + ", s=" + std::to_string(s) + ")";
}

} // namespace

void ExperimentConfig::validate() const {
    if (coarse_sizes.empty()) {
        throw std::invalid_argument("config: at least one coarse size N0 is required");
    }
    for (int n0 : coarse_sizes) {
        if (n0 < 2) throw std::invalid_argument("config: every N0 must be >= 2");
    }
    if (target_index < 0 ||
        target_index >= *std::min_element(coarse_sizes.begin(), coarse_sizes.end())) {
        throw std::invalid_argument(
            "config: target index k must satisfy 0 <= k < min(N0), got k = " +
            std::to_string(target_index));
    }
    if (doubling_count.has_value() == fine_points.has_value()) {
        throw std::invalid_argument("config: set exactly one of s (doubling count) or fine N");
    }
    if (doubling_count && (*doubling_count < 0 || *doubling_count > 30)) {
        throw std::invalid_argument("config: s must be in [0, 30]");
    }
    if (fine_points) {
        for (int n0 : coarse_sizes) {
            if (*fine_points < n0 || *fine_points % n0 != 0 ||
                !is_power_of_two(*fine_points / n0)) {
                throw std::invalid_argument("config: fine N = " + std::to_string(*fine_points) +
                                            " is not N0 * 2^s for N0 = " + std::to_string(n0));
            }
        }
    }
    if (qpe.accuracy_bits < 1) throw std::invalid_argument("config: accuracy bits n must be >= 1");
    if (!(qpe.epsilon > 0.0) || !(qpe.epsilon < 1.0)) {
        throw std::invalid_argument("config: epsilon must be in (0, 1)");
    }
    if (qpe.explicit_b && *qpe.explicit_b < qpe.accuracy_bits) {
        throw std::invalid_argument("config: explicit b must be >= accuracy bits n");
    }
    if (shots < 0) throw std::invalid_argument("config: shots must be >= 0");
}

int ExperimentConfig::doubling_for(int n0) const {
    if (doubling_count) return *doubling_count;
    int s = 0;
    std::int64_t n = n0;
    while (n < *fine_points) {
        n <<= 1;
        ++s;
    }
    if (n != *fine_points) {
        throw std::invalid_argument("config: fine N is not a power-of-two multiple of N0");
    }
    return s;
}

int ExperimentConfig::resolved_b() const {
    return qpe.explicit_b ? *qpe.explicit_b : choose_b(qpe.accuracy_bits, qpe.epsilon);
}

namespace {

struct FinePoint {
    DiscreteHamiltonian hamiltonian;
    std::vector<EigenPair> basis; // complete
    bool degenerate = false;
};

RunRecord run_point(const ExperimentConfig& config, int n0) {
    const auto start = std::chrono::steady_clock::now();
    const int s = config.doubling_for(n0);
    const int k = config.target_index;
    const std::int64_t n_wide = static_cast<std::int64_t>(n0) << s;
    if (n_wide > 4096) {
        throw ResourceLimit("run_pipeline: fine N = " + std::to_string(n_wide) +
                            " exceeds the full-pipeline budget of 4096 at " + point_label(n0, s) +
                            "; use the sweep path for overlap-only studies");
    }
    const int n = static_cast<int>(n_wide);

    RunRecord rec;
    rec.n0 = n0;
    rec.s = s;
    rec.n = n;
    rec.k = k;

    // coarse problem, solved classically
    const GridSpec coarse_grid = build_grid(n0);
    const DiscreteHamiltonian coarse_h = discretize(config.potential, coarse_grid);
    const std::vector<EigenPair> coarse_pairs = eigensolve(coarse_h, std::min(n0, k + 2));
    const StateVector prepared =
        replicate(StateVector::from_real(coarse_pairs[static_cast<std::size_t>(k)].vector), s);

    // fine problem: the complete eigenbasis is the oracle and the
    // spectral content of the QPE instance
    const GridSpec fine_grid = build_grid(n);
    const DiscreteHamiltonian fine_h = discretize(config.potential, fine_grid);
    const std::vector<EigenPair> fine_basis = eigensolve(fine_h, n);

    const OverlapReport overlap = overlap_analysis(fine_basis, k, prepared);
    rec.success_probability = overlap.success_probability;
    rec.failure = overlap.failure;
    rec.error_norm = overlap.error_norm;
    rec.degenerate_warning =
        has_near_degeneracy(coarse_pairs) || has_near_degeneracy(fine_basis);

    if (rec.failure > rec.error_norm * rec.error_norm + 1e-12) {
        std::ostringstream msg;
        msg << "failure inequality violated at " << point_label(n0, s) << ": 1 - |d_kk|^2 = "
            << rec.failure << " > error_norm^2 = " << rec.error_norm * rec.error_norm;
        throw InvariantViolation(msg.str());
    }

    // register sizing and eigenvalue-to-phase mapping
    rec.b = config.resolved_b();
    rec.evolution_time = evolution_time_for(gershgorin_upper_bound(fine_h), rec.b);

    SpectralInstance instance;
    instance.phases.resize(static_cast<std::size_t>(n));
    instance.amplitudes = overlap.coefficients;
    for (int l = 0; l < n; ++l) {
        const PhaseMapping pm =
            map_eigenvalue_to_phase(fine_basis[static_cast<std::size_t>(l)].value,
                                    rec.evolution_time);
        if (pm.aliased) {
            throw InvariantViolation("eigenphase aliased at " + point_label(n0, s) +
                                     "; evolution time should preclude this");
        }
        instance.phases[static_cast<std::size_t>(l)] = pm.phase;
    }

    const OutcomeDistribution dist = outcome_distribution(instance, rec.b);

    // cross-check the analytic distribution against the literal statevector
    // pipeline whenever the budget allows an exact comparison
    if (config.shots == 0 && rec.b <= 10) {
        const std::vector<double> marginal =
            first_register_marginal(statevector_qpe(instance, rec.b));
        for (std::size_t j = 0; j < marginal.size(); ++j) {
            if (std::abs(marginal[j] - dist.probabilities[j]) > 1e-9) {
                std::ostringstream msg;
                msg << "analytic/statevector mismatch at " << point_label(n0, s) << ", bin " << j
                    << ": " << dist.probabilities[j] << " vs " << marginal[j];
                throw InvariantViolation(msg.str());
            }
        }
    }

    rec.eigenvalue_true = fine_basis[static_cast<std::size_t>(k)].value;
    rec.phase_true = map_eigenvalue_to_phase(rec.eigenvalue_true, rec.evolution_time).phase;
    rec.good_set_probability = good_set_probability(dist, rec.phase_true, 1);
    rec.good_set_bound = good_set_probability_bound(rec.success_probability, 1);
    if (rec.good_set_probability < rec.good_set_bound - 1e-12) {
        std::ostringstream msg;
        msg << "good-set bound violated at " << point_label(n0, s) << ": measured "
            << rec.good_set_probability << " < bound " << rec.good_set_bound;
        throw InvariantViolation(msg.str());
    }

    const auto modal = std::max_element(dist.probabilities.begin(), dist.probabilities.end());
    rec.modal_outcome = modal - dist.probabilities.begin();
    rec.phase_estimate =
        static_cast<double>(rec.modal_outcome) / std::ldexp(1.0, rec.b);
    rec.eigenvalue_estimate = phase_to_eigenvalue(rec.phase_estimate, rec.evolution_time);
    rec.eigenvalue_error = std::abs(rec.eigenvalue_estimate - rec.eigenvalue_true);

    rec.shots = config.shots;
    if (config.shots > 0) {
        rec.record_seed = derive_seed(config.rng_seed, static_cast<std::uint64_t>(n0),
                                      static_cast<std::uint64_t>(s));
        const std::vector<std::int64_t> counts =
            sample_outcomes(dist, config.shots, rec.record_seed);
        for (std::int64_t j : good_set(rec.phase_true, rec.b, 1)) {
            rec.good_hits += counts[static_cast<std::size_t>(j)];
        }
        rec.empirical_rate =
            static_cast<double>(rec.good_hits) / static_cast<double>(config.shots);
    }

    rec.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

} // namespace

RunReport run_pipeline(const ExperimentConfig& config) {
    config.validate();
    RunReport report;
    report.records.reserve(config.coarse_sizes.size());
    for (int n0 : config.coarse_sizes) {
        report.records.push_back(run_point(config, n0));
    }
    return report;
}

SweepResult sweep_and_fit(const ExperimentConfig& config) {
    config.validate();
    if (config.coarse_sizes.size() < 3) {
        throw std::invalid_argument("sweep_and_fit: need at least 3 coarse sizes");
    }

    std::vector<SweepRow> rows;
    rows.reserve(config.coarse_sizes.size());
    const int k = config.target_index;
    for (int n0 : config.coarse_sizes) {
        const int s = config.doubling_for(n0);
        const std::int64_t n = static_cast<std::int64_t>(n0) << s;
        if (n > (std::int64_t{1} << 24)) {
            throw ResourceLimit("sweep_and_fit: fine N = " + std::to_string(n) +
                                " exceeds the eigensolver budget");
        }

        const GridSpec coarse_grid = build_grid(n0);
        const std::vector<EigenPair> coarse_pairs =
            eigensolve(discretize(config.potential, coarse_grid), std::min(n0, k + 2));
        const StateVector prepared = replicate(
            StateVector::from_real(coarse_pairs[static_cast<std::size_t>(k)].vector), s);

        const GridSpec fine_grid = build_grid(static_cast<int>(n));
        const std::vector<EigenPair> fine_pairs =
            eigensolve(discretize(config.potential, fine_grid), k + 1);
        const OverlapSummary summary =
            overlap_summary(fine_pairs[static_cast<std::size_t>(k)], prepared);

        SweepRow row;
        row.n0 = n0;
        row.s = s;
        row.n = static_cast<int>(n);
        row.success_probability = summary.success_probability;
        row.failure = summary.failure;
        row.error_norm = summary.error_norm;
        row.bound_rhs = summary.error_norm * summary.error_norm;
        if (row.failure > row.bound_rhs + 1e-12) {
            std::ostringstream msg;
            msg << "failure inequality violated at " << point_label(n0, s) << ": failure "
                << row.failure << " > error_norm^2 = " << row.bound_rhs;
            throw InvariantViolation(msg.str());
        }
        rows.push_back(row);
    }
    return fit_sweep_rows(std::move(rows));
}

SweepResult fit_sweep_rows(std::vector<SweepRow> rows) {
    std::vector<std::pair<double, double>> samples;
    samples.reserve(rows.size());
    for (const SweepRow& row : rows) {
        samples.emplace_back(static_cast<double>(row.n0), row.failure);
    }

    SweepResult result;
    result.fit = failure_scaling_fit(samples);
    for (const SweepRow& row : rows) {
        if (row.failure < 0.5 && (!result.threshold_n0 || row.n0 < *result.threshold_n0)) {
            result.threshold_n0 = row.n0;
        }
    }
    result.rows = std::move(rows);
    return result;
}

EndToEndResult end_to_end_success_rate(const ExperimentConfig& config) {
    config.validate();
    if (config.shots < 1000) {
        throw std::invalid_argument("end_to_end_success_rate: shots must be >= 1000");
    }
    if (config.coarse_sizes.size() != 1) {
        throw std::invalid_argument("end_to_end_success_rate: exactly one coarse size expected");
    }

    EndToEndResult result;
    result.record = run_point(config, config.coarse_sizes.front());
    result.empirical_rate = result.record.empirical_rate;
    result.rate_bound = result.record.good_set_bound;
    const double p = result.record.good_set_probability;
    result.sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(config.shots));
    result.passed = result.empirical_rate >= result.rate_bound - 3.0 * result.sigma;
    return result;
}

} // namespace qpesim
