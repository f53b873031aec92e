#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpesim/grid_operator.hpp"
#include "qpesim/phase_estimation.hpp"
#include "qpesim/state_prep.hpp"

namespace qpesim {

/// Register sizing inputs: b defaults to choose_b(accuracy_bits, epsilon);
/// an explicit b overrides.
struct QpeSettings {
    int accuracy_bits = 8;
    double epsilon = 0.25;
    std::optional<int> explicit_b;
};

/// Everything one pipeline run needs: problem, target, sizes, register
/// settings, shot budget and seed.
struct ExperimentConfig {
    PotentialSpec potential = PotentialSpec::zero();
    int target_index = 0;               ///< k, 0-based
    std::vector<int> coarse_sizes;      ///< N0 values, each >= 2
    std::optional<int> doubling_count;  ///< s: fine N = 2^s N0
    std::optional<int> fine_points;     ///< fixed N; requires N = 2^s N0 exactly
    QpeSettings qpe;
    std::int64_t shots = 0;             ///< 0 = analytic only
    std::uint64_t rng_seed = 1;

    void validate() const;
    int doubling_for(int n0) const; ///< resolved s for one coarse size
    int resolved_b() const;         ///< explicit_b or choose_b(n, epsilon)
};

/// One (N0, s) point of a full pipeline run.
struct RunRecord {
    int n0 = 0;
    int s = 0;
    int n = 0;
    int k = 0;
    // overlap of prepared state vs fine target eigenvector
    double success_probability = 0.0;
    double failure = 0.0;
    double error_norm = 0.0;
    bool degenerate_warning = false;
    // register setup
    int b = 0;
    double evolution_time = 0.0;
    // distribution-level results
    double phase_true = 0.0;            ///< fine-grid eigenphase of the target
    double good_set_probability = 0.0;  ///< measured Pr(G), window 1
    double good_set_bound = 0.0;        ///< (8/pi^2) |d_kk|^2
    std::int64_t modal_outcome = 0;
    double phase_estimate = 0.0;
    double eigenvalue_true = 0.0;
    double eigenvalue_estimate = 0.0;
    double eigenvalue_error = 0.0;
    // finite-shot view
    std::int64_t shots = 0;
    std::int64_t good_hits = 0;  ///< outcomes within 2^-b of the true phase
    double empirical_rate = 0.0; ///< good_hits / shots, 0 when shots = 0
    std::uint64_t record_seed = 0;
    double duration_seconds = 0.0;
};

struct RunReport {
    std::vector<RunRecord> records;
};

/// Full pipeline for every configured coarse size: coarse eigensolve,
/// replicate, fine eigensolve (complete basis, the oracle), overlap
/// analysis, outcome distribution, optional sampling, phase-to-eigenvalue
/// conversion. Each record is checked against the failure inequality and
/// the good-set bound; a violation raises InvariantViolation with the
/// (N0, s) context. The QPE stage needs the complete fine eigenbasis, so
/// fine sizes are capped at N <= 4096 (ResourceLimit beyond); use
/// sweep_and_fit for larger overlap-only studies.
RunReport run_pipeline(const ExperimentConfig& config);

/// One row of an overlap-scaling sweep.
struct SweepRow {
    int n0 = 0;
    int s = 0;
    int n = 0;
    double success_probability = 0.0;
    double failure = 0.0;
    double error_norm = 0.0;
    double bound_rhs = 0.0; ///< error_norm^2, the failure upper bound
};

struct SweepResult {
    std::vector<SweepRow> rows;
    PowerLawFit fit;
    std::optional<int> threshold_n0; ///< smallest N0 with failure < 1/2
};

/// Overlap-only sweep over the coarse sizes (no QPE stage, so any fine N
/// the eigensolver can handle is fine), plus the log-log failure fit and
/// the smallest coarse size achieving failure < 1/2. Every row is checked
/// against failure <= error_norm^2.
SweepResult sweep_and_fit(const ExperimentConfig& config);

/// Fit + threshold step on existing rows; lets tests inject synthetic data.
SweepResult fit_sweep_rows(std::vector<SweepRow> rows);

/// Finite-shot check of the end-to-end success rate for a single coarse
/// size. Success = sampled outcome within wrap distance 2^-b of the true
/// fine-grid phase; the rate is compared against (8/pi^2) |d_kk|^2 with a
/// 3 sigma multinomial margin. Requires shots >= 1000 and exactly one
/// coarse size.
struct EndToEndResult {
    RunRecord record;
    double empirical_rate = 0.0;
    double rate_bound = 0.0; ///< (8/pi^2) |d_kk|^2
    double sigma = 0.0;      ///< multinomial standard error of the rate
    bool passed = false;     ///< empirical_rate >= rate_bound - 3 sigma
};

EndToEndResult end_to_end_success_rate(const ExperimentConfig& config);

} // namespace qpesim
