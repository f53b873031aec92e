#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <json.hpp>

#include "qpesim/experiment.hpp"
#include "qpesim/grid_operator.hpp"
#include "qpesim/phase_estimation.hpp"

namespace qpesim {

/// Shortest decimal form that parses back to exactly the same double.
/// Every file writer goes through this, which is what makes identical
/// configs produce byte-identical artifacts.
std::string format_double(double v);

/// CSV with header "j,p_j", one row per measurement bin.
std::string distribution_csv(const OutcomeDistribution& dist);

/// CSV with header "j,count", one row per bin.
std::string counts_csv(std::span<const std::int64_t> counts);

/// JSON array of {phase, amplitude_re, amplitude_im}, one entry per
/// eigencomponent, and its inverse. Round trips exactly.
std::string instance_json(const SpectralInstance& instance);
SpectralInstance instance_from_json(const std::string& text);

/// The overlap portion of one run record as a JSON object with exactly the
/// fields {N, N0, s, k, success_probability, failure, error_norm,
/// degenerate_warning}.
std::string overlap_record_json(const RunRecord& rec);

/// Full pipeline report. CSV is the canonical artifact; JSON carries the
/// same fields for structured consumers. Wall-clock durations stay out of
/// both so outputs are reproducible byte for byte.
std::string run_report_csv(const RunReport& report);
std::string run_report_json(const RunReport& report);

/// Sweep artifact: CSV columns N0,s,N,success_probability,failure,
/// error_norm,bound_rhs; JSON adds the fitted power law and the smallest
/// coarse size reaching failure < 1/2 (null when none did).
std::string sweep_csv(const SweepResult& sweep);
std::string sweep_json(const SweepResult& sweep);

/// Config file round trip. The JSON mirrors ExperimentConfig:
///   {"potential": ..., "k": 0, "n0": [8,16], "s": 4 | "fine_n": 256,
///    "qpe": {"bits": 8, "epsilon": 0.25, "b": optional},
///    "shots": 0, "seed": 1}
/// `potential` is written as a tagged object ({"kind": "zero"},
/// {"kind": "quadratic_well", "strength": c}, {"kind": "tabulated",
/// "xs": [...], "values": [...]}); on input the CLI shorthand string
/// ("zero", "quad:c", "file:path") is accepted too. Absent fields keep
/// their defaults and the parsed config is NOT validated here — command
/// line flags may still complete it; the run entry points validate.
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Tabulated potential from a two-column CSV (x, V(x)) with a header row.
/// Malformed rows, a missing header, or fewer than two data rows throw
/// std::invalid_argument naming the line.
PotentialSpec load_potential_csv(const std::string& path);

/// CLI potential grammar: "zero" | "quad:<strength>" | "file:<path>".
PotentialSpec parse_potential_token(const std::string& token);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace qpesim
