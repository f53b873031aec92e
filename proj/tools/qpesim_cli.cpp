// Command line front end: configure a problem from flags or a JSON config
// file, run the coarse-to-fine phase estimation pipeline, and emit the CSV
// or JSON artifacts. Exit code 0 on success; any failed invariant or bad
// input is named on standard error and exits nonzero.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpesim/experiment.hpp"
#include "qpesim/grid_operator.hpp"
#include "qpesim/io.hpp"
#include "qpesim/phase_estimation.hpp"
#include "qpesim/rng.hpp"
#include "qpesim/self_check.hpp"
#include "qpesim/state_prep.hpp"

namespace {

// Flag values collected by CLI11; optionals distinguish "not given" from a
// default so flags can override a config file.
struct CliOptions {
    std::string config_path;
    std::string potential;
    std::optional<int> k;
    std::vector<int> n0;
    std::optional<int> s;
    std::optional<int> fine_n;
    std::optional<int> bits;
    std::optional<double> epsilon;
    std::optional<int> b;
    std::optional<std::int64_t> shots;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
};

void add_common_options(CLI::App& cmd, CliOptions& opt) {
    cmd.add_option("--config", opt.config_path, "JSON config file; flags override its fields")
        ->check(CLI::ExistingFile);
    cmd.add_option("--potential", opt.potential, "zero | quad:<c> | file:<path>");
    cmd.add_option("--k", opt.k, "target eigenvector index (0-based)");
    cmd.add_option("--n0", opt.n0, "coarse grid sizes, comma separated")->delimiter(',');
    cmd.add_option("--s", opt.s, "fine-grid doubling count: N = 2^s N0");
    cmd.add_option("--fine-n", opt.fine_n, "fixed fine size N (must be N0 * 2^s)");
    cmd.add_option("--bits", opt.bits, "target accuracy bits n");
    cmd.add_option("--epsilon", opt.epsilon, "failure budget for register sizing");
    cmd.add_option("--b", opt.b, "explicit register size, overrides bits/epsilon");
    cmd.add_option("--shots", opt.shots, "measurement samples (0 = analytic only)");
    cmd.add_option("--seed", opt.seed, "RNG seed");
    cmd.add_option("--out", opt.out, "output path (default: stdout)");
    cmd.add_option("--format", opt.format, "artifact format")
        ->check(CLI::IsMember({"csv", "json"}));
}

qpesim::ExperimentConfig build_config(const CliOptions& opt) {
    qpesim::ExperimentConfig config;
    if (!opt.config_path.empty()) {
        config = qpesim::config_from_json(
            nlohmann::json::parse(qpesim::read_text_file(opt.config_path)));
    }
    if (!opt.potential.empty()) {
        config.potential = qpesim::parse_potential_token(opt.potential);
    }
    if (opt.k) config.target_index = *opt.k;
    if (!opt.n0.empty()) config.coarse_sizes = opt.n0;
    if (opt.s) {
        config.doubling_count = *opt.s;
        config.fine_points.reset();
    }
    if (opt.fine_n) {
        config.fine_points = *opt.fine_n;
        config.doubling_count.reset();
    }
    if (opt.s && opt.fine_n) {
        throw std::invalid_argument("give --s or --fine-n, not both");
    }
    if (opt.bits) config.qpe.accuracy_bits = *opt.bits;
    if (opt.epsilon) config.qpe.epsilon = *opt.epsilon;
    if (opt.b) config.qpe.explicit_b = *opt.b;
    if (opt.shots) config.shots = *opt.shots;
    if (opt.seed) config.rng_seed = *opt.seed;
    return config;
}

void emit(const std::string& artifact, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << artifact;
    } else {
        qpesim::write_text_file(out_path, artifact);
    }
}

int cmd_solve(const CliOptions& opt, const std::string& overlap_json_path) {
    const qpesim::ExperimentConfig config = build_config(opt);
    const qpesim::RunReport report = qpesim::run_pipeline(config);
    emit(opt.format == "json" ? qpesim::run_report_json(report)
                              : qpesim::run_report_csv(report),
         opt.out);
    if (!overlap_json_path.empty()) {
        std::string overlap;
        for (const qpesim::RunRecord& rec : report.records) {
            overlap += qpesim::overlap_record_json(rec);
        }
        qpesim::write_text_file(overlap_json_path, overlap);
    }
    return 0;
}

int cmd_sweep(const CliOptions& opt) {
    const qpesim::ExperimentConfig config = build_config(opt);
    const qpesim::SweepResult sweep = qpesim::sweep_and_fit(config);
    emit(opt.format == "json" ? qpesim::sweep_json(sweep) : qpesim::sweep_csv(sweep), opt.out);
    if (!opt.out.empty()) {
        std::cout << "fitted slope " << qpesim::format_double(sweep.fit.slope) << " over "
                  << sweep.fit.points_used << " points";
        if (sweep.threshold_n0) {
            std::cout << "; smallest N0 with failure < 1/2: " << *sweep.threshold_n0;
        }
        std::cout << '\n';
    }
    return 0;
}

// Finite-shot sampling of one configuration, composed from the library
// primitives so the distribution and the raw counts can be emitted.
int cmd_sample(const CliOptions& opt, const std::string& distribution_path) {
    qpesim::ExperimentConfig config = build_config(opt);
    if (config.shots < 1) config.shots = 1000;
    config.validate();
    if (config.coarse_sizes.size() != 1) {
        throw std::invalid_argument("sample: exactly one --n0 value expected");
    }

    const int n0 = config.coarse_sizes.front();
    const int s = config.doubling_for(n0);
    const int n = n0 << s;

    const std::vector<qpesim::EigenPair> coarse = qpesim::eigensolve(
        qpesim::discretize(config.potential, qpesim::build_grid(n0)), config.target_index + 1);
    const qpesim::StateVector prepared = qpesim::replicate(
        qpesim::StateVector::from_real(coarse.back().vector), s);

    const qpesim::DiscreteHamiltonian fine_h =
        qpesim::discretize(config.potential, qpesim::build_grid(n));
    const std::vector<qpesim::EigenPair> fine_basis = qpesim::eigensolve(fine_h, n);
    const qpesim::OverlapReport overlap =
        qpesim::overlap_analysis(fine_basis, config.target_index, prepared);

    const int b = config.resolved_b();
    const double t = qpesim::evolution_time_for(qpesim::gershgorin_upper_bound(fine_h), b);
    qpesim::SpectralInstance instance;
    instance.amplitudes = overlap.coefficients;
    instance.phases.reserve(static_cast<std::size_t>(n));
    for (const qpesim::EigenPair& pair : fine_basis) {
        instance.phases.push_back(qpesim::map_eigenvalue_to_phase(pair.value, t).phase);
    }

    const qpesim::OutcomeDistribution dist = qpesim::outcome_distribution(instance, b);
    const std::uint64_t seed = qpesim::derive_seed(
        config.rng_seed, static_cast<std::uint64_t>(n0), static_cast<std::uint64_t>(s));
    const std::vector<std::int64_t> counts =
        qpesim::sample_outcomes(dist, config.shots, seed);

    emit(qpesim::counts_csv(counts), opt.out);
    if (!distribution_path.empty()) {
        qpesim::write_text_file(distribution_path, qpesim::distribution_csv(dist));
    }
    return 0;
}

int cmd_check() {
    const std::vector<qpesim::CheckResult> results = qpesim::run_acceptance_checks();
    bool all_passed = true;
    for (const qpesim::CheckResult& res : results) {
        std::cout << (res.passed ? "PASS" : "FAIL") << "  " << res.name << " — " << res.detail
                  << '\n';
        all_passed = all_passed && res.passed;
    }
    if (!all_passed) {
        std::cerr << "acceptance checks failed\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coarse-to-fine eigenvector preparation and phase estimation simulator"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string overlap_json_path;
    std::string distribution_path;

    CLI::App* solve = app.add_subcommand("solve", "run the full pipeline for each N0");
    add_common_options(*solve, opt);
    solve->add_option("--overlap-json", overlap_json_path,
                      "also write per-record overlap reports as JSON objects");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "overlap scaling over several N0 plus a power-law fit");
    add_common_options(*sweep, opt);

    CLI::App* sample = app.add_subcommand("sample", "finite-shot measurement counts");
    add_common_options(*sample, opt);
    sample->add_option("--distribution-out", distribution_path,
                       "also write the analytic outcome distribution CSV");

    CLI::App* check = app.add_subcommand("check", "run the acceptance suite");
    (void)check;

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(opt, overlap_json_path);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (sample->parsed()) return cmd_sample(opt, distribution_path);
        return cmd_check();
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
}
