// Artifact formats and config round trips. The CSV writers promise
// byte-stable output (shortest round-trip doubles, no wall-clock columns),
// so several tests compare whole strings.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpesim/errors.hpp"
#include "qpesim/io.hpp"

using namespace qpesim;
using nlohmann::json;

namespace {

// unique-ish scratch path under the system temp dir
std::string scratch_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("qpesim_io_test_" + name)).string();
}

RunRecord sample_record() {
    RunRecord rec;
    rec.n0 = 8;
    rec.s = 3;
    rec.n = 64;
    rec.k = 0;
    rec.success_probability = 0.98040164687488907;
    rec.failure = 1.0 - rec.success_probability;
    rec.error_norm = 0.14034004997645355;
    rec.degenerate_warning = false;
    rec.b = 10;
    rec.evolution_time = 3.7e-4;
    rec.phase_true = 0.0023;
    rec.good_set_probability = 0.97;
    rec.good_set_bound = 0.79;
    rec.modal_outcome = 2;
    rec.phase_estimate = 2.0 / 1024.0;
    rec.eigenvalue_true = 9.86;
    rec.eigenvalue_estimate = 33.2;
    rec.eigenvalue_error = 23.34;
    rec.shots = 100;
    rec.good_hits = 97;
    rec.empirical_rate = 0.97;
    rec.record_seed = 123456789;
    rec.duration_seconds = 0.5; // must never reach an artifact
    return rec;
}

} // namespace

TEST_CASE("format_double: shortest forms and exact round trips") {
    CHECK(format_double(0.25) == "0.25");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.5) == "-0.5");
    CHECK(format_double(0.0) == "0");

    for (double v : {0.1, 1.0 / 3.0, 9.86960440108936, 1e300, 5e-324, -2.5e-308,
                     0.98040164687488907}) {
        const std::string text = format_double(v);
        CHECK(std::strtod(text.c_str(), nullptr) == v);
    }
}

TEST_CASE("distribution_csv and counts_csv: exact bytes") {
    OutcomeDistribution dist;
    dist.b = 1;
    dist.probabilities = {0.25, 0.75};
    CHECK(distribution_csv(dist) == "j,p_j\n0,0.25\n1,0.75\n");

    const std::vector<std::int64_t> counts = {3, 0, 7};
    CHECK(counts_csv(counts) == "j,count\n0,3\n1,0\n2,7\n");
}

TEST_CASE("instance_json: round trip and field names") {
    SpectralInstance inst;
    inst.phases = {0.125, 0.6};
    inst.amplitudes.resize(2);
    inst.amplitudes(0) = {0.6, 0.0};
    inst.amplitudes(1) = {0.0, 0.8};

    const std::string text = instance_json(inst);
    const json parsed = json::parse(text);
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].at("phase").get<double>() == 0.125);
    CHECK(parsed[0].at("amplitude_re").get<double>() == 0.6);
    CHECK(parsed[1].at("amplitude_im").get<double>() == 0.8);

    const SpectralInstance back = instance_from_json(text);
    REQUIRE(back.phases.size() == 2);
    CHECK(back.phases[0] == inst.phases[0]);
    CHECK(back.phases[1] == inst.phases[1]);
    CHECK(back.amplitudes(0) == inst.amplitudes(0));
    CHECK(back.amplitudes(1) == inst.amplitudes(1));
}

TEST_CASE("instance_from_json: validation failures") {
    // not an array
    CHECK_THROWS_AS(instance_from_json("{}"), std::invalid_argument);
    // unnormalized amplitudes
    const std::string bad =
        R"([{"phase": 0.5, "amplitude_re": 0.5, "amplitude_im": 0.0}])";
    CHECK_THROWS_AS(instance_from_json(bad), std::invalid_argument);
    // phase out of range
    const std::string out_of_range =
        R"([{"phase": 1.5, "amplitude_re": 1.0, "amplitude_im": 0.0}])";
    CHECK_THROWS_AS(instance_from_json(out_of_range), std::invalid_argument);
}

TEST_CASE("overlap_record_json: exactly the documented fields") {
    const json obj = json::parse(overlap_record_json(sample_record()));
    CHECK(obj.size() == 8);
    CHECK(obj.at("N").get<int>() == 64);
    CHECK(obj.at("N0").get<int>() == 8);
    CHECK(obj.at("s").get<int>() == 3);
    CHECK(obj.at("k").get<int>() == 0);
    CHECK(obj.at("success_probability").get<double>() == 0.98040164687488907);
    CHECK(obj.at("failure").get<double>() == 1.0 - 0.98040164687488907);
    CHECK(obj.at("error_norm").get<double>() == 0.14034004997645355);
    CHECK(obj.at("degenerate_warning").get<bool>() == false);
}

TEST_CASE("run_report_csv: header, column count, and no duration column") {
    RunReport report;
    report.records = {sample_record()};
    const std::string csv = run_report_csv(report);

    const std::string expected_header =
        "N0,s,N,k,success_probability,failure,error_norm,degenerate_warning,b,"
        "evolution_time,phase_true,good_set_probability,good_set_bound,modal_outcome,"
        "phase_estimate,eigenvalue_true,eigenvalue_estimate,eigenvalue_error,shots,"
        "good_hits,empirical_rate,seed";
    const std::size_t newline = csv.find('\n');
    REQUIRE(newline != std::string::npos);
    CHECK(csv.substr(0, newline) == expected_header);

    const std::string row = csv.substr(newline + 1);
    const auto commas = static_cast<int>(std::count(row.begin(), row.end(), ','));
    CHECK(commas == 21); // 22 columns
    CHECK(row.rfind("8,3,64,0,", 0) == 0);
    CHECK(row.find("duration") == std::string::npos);
    CHECK(row.find("123456789\n") != std::string::npos);
}

TEST_CASE("run_report_json: records carry the same fields") {
    RunReport report;
    report.records = {sample_record(), sample_record()};
    const json obj = json::parse(run_report_json(report));
    REQUIRE(obj.at("records").is_array());
    REQUIRE(obj.at("records").size() == 2);
    const json& rec = obj.at("records")[0];
    CHECK(rec.at("N0").get<int>() == 8);
    CHECK(rec.at("seed").get<std::uint64_t>() == 123456789);
    CHECK(rec.at("empirical_rate").get<double>() == 0.97);
    CHECK_FALSE(rec.contains("duration_seconds"));
}

TEST_CASE("sweep artifacts: CSV header and JSON threshold encoding") {
    SweepResult sweep;
    SweepRow row;
    row.n0 = 8;
    row.s = 3;
    row.n = 64;
    row.success_probability = 0.75;
    row.failure = 0.25;
    row.error_norm = 0.5;
    row.bound_rhs = 0.25;
    sweep.rows = {row};
    sweep.fit.slope = -2.0;
    sweep.fit.intercept = 1.5;
    sweep.fit.points_used = 1;

    CHECK(sweep_csv(sweep) ==
          "N0,s,N,success_probability,failure,error_norm,bound_rhs\n"
          "8,3,64,0.75,0.25,0.5,0.25\n");

    json obj = json::parse(sweep_json(sweep));
    CHECK(obj.at("threshold_n0").is_null());
    CHECK(obj.at("fit").at("slope").get<double>() == -2.0);
    CHECK(obj.at("rows")[0].at("bound_rhs").get<double>() == 0.25);

    sweep.threshold_n0 = 16;
    obj = json::parse(sweep_json(sweep));
    CHECK(obj.at("threshold_n0").get<int>() == 16);
}

TEST_CASE("config JSON: full round trip") {
    ExperimentConfig cfg;
    cfg.potential = PotentialSpec::quadratic_well(2.5);
    cfg.target_index = 1;
    cfg.coarse_sizes = {8, 16};
    cfg.doubling_count = 4;
    cfg.qpe.accuracy_bits = 6;
    cfg.qpe.epsilon = 0.1;
    cfg.qpe.explicit_b = 9;
    cfg.shots = 100;
    cfg.rng_seed = 42;

    const json first = config_to_json(cfg);
    const ExperimentConfig back = config_from_json(first);
    CHECK(config_to_json(back).dump() == first.dump());
    CHECK(back.potential.kind() == PotentialSpec::Kind::QuadraticWell);
    CHECK(back.potential.strength() == 2.5);
    CHECK(back.coarse_sizes == std::vector<int>{8, 16});
    REQUIRE(back.doubling_count.has_value());
    CHECK(*back.doubling_count == 4);
    CHECK_FALSE(back.fine_points.has_value());
    REQUIRE(back.qpe.explicit_b.has_value());
    CHECK(*back.qpe.explicit_b == 9);
    CHECK(back.shots == 100);
    CHECK(back.rng_seed == 42);

    // fine-N spelling survives too
    cfg.doubling_count.reset();
    cfg.fine_points = 256;
    const ExperimentConfig fine_back = config_from_json(config_to_json(cfg));
    CHECK_FALSE(fine_back.doubling_count.has_value());
    REQUIRE(fine_back.fine_points.has_value());
    CHECK(*fine_back.fine_points == 256);
}

TEST_CASE("config JSON: defaults, shorthand potential, tabulated round trip") {
    // empty object: every field keeps its default, nothing validated
    const ExperimentConfig defaults = config_from_json(json::object());
    CHECK(defaults.potential.kind() == PotentialSpec::Kind::Zero);
    CHECK(defaults.target_index == 0);
    CHECK(defaults.coarse_sizes.empty());
    CHECK(defaults.shots == 0);
    CHECK(defaults.rng_seed == 1);

    // CLI shorthand string accepted for the potential
    const ExperimentConfig quad = config_from_json(json{{"potential", "quad:3.5"}});
    CHECK(quad.potential.kind() == PotentialSpec::Kind::QuadraticWell);
    CHECK(quad.potential.strength() == 3.5);

    // tabulated potentials keep their data through the round trip
    ExperimentConfig cfg;
    cfg.potential = PotentialSpec::tabulated({0.25, 0.5, 0.75}, {1.0, 0.0, 2.0});
    const ExperimentConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.potential.kind() == PotentialSpec::Kind::Tabulated);
    CHECK(back.potential.table_xs() == std::vector<double>{0.25, 0.5, 0.75});
    CHECK(back.potential.table_values() == std::vector<double>{1.0, 0.0, 2.0});

    CHECK_THROWS_AS(config_from_json(json{{"potential", json{{"kind", "cubic"}}}}),
                    std::invalid_argument);
}

TEST_CASE("parse_potential_token") {
    CHECK(parse_potential_token("zero").kind() == PotentialSpec::Kind::Zero);

    const PotentialSpec quad = parse_potential_token("quad:100");
    CHECK(quad.kind() == PotentialSpec::Kind::QuadraticWell);
    CHECK(quad.strength() == 100.0);

    CHECK_THROWS_AS(parse_potential_token("quad:abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_potential_token("quad:1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_potential_token("quad:"), std::invalid_argument);
    CHECK_THROWS_AS(parse_potential_token("harmonic"), std::invalid_argument);
    CHECK_THROWS_AS(parse_potential_token("file:/no/such/file.csv"), std::invalid_argument);
}

TEST_CASE("load_potential_csv: happy path evaluates on the matching grid") {
    const std::string path = scratch_path("ok.csv");
    write_text_file(path, "x,v\n0.25,1.5\n0.5,0\n0.75,2.25\n");

    const PotentialSpec pot = load_potential_csv(path);
    CHECK(pot.kind() == PotentialSpec::Kind::Tabulated);
    const std::vector<double> values = pot.evaluate_on(build_grid(3));
    REQUIRE(values.size() == 3);
    CHECK(values[0] == 1.5);
    CHECK(values[1] == 0.0);
    CHECK(values[2] == 2.25);
    std::filesystem::remove(path);
}

TEST_CASE("load_potential_csv: malformed inputs name the problem") {
    const std::string headerless = scratch_path("headerless.csv");
    write_text_file(headerless, "0.25,1.5\n0.5,0.5\n");
    CHECK_THROWS_WITH_AS(load_potential_csv(headerless),
                         doctest::Contains("missing header"), std::invalid_argument);
    std::filesystem::remove(headerless);

    const std::string malformed = scratch_path("malformed.csv");
    write_text_file(malformed, "x,v\n0.25,1.5\nbogus\n0.75,2.0\n");
    CHECK_THROWS_WITH_AS(load_potential_csv(malformed), doctest::Contains("line 3"),
                         std::invalid_argument);
    std::filesystem::remove(malformed);

    const std::string thin = scratch_path("thin.csv");
    write_text_file(thin, "x,v\n0.5,1.0\n");
    CHECK_THROWS_WITH_AS(load_potential_csv(thin), doctest::Contains("at least 2"),
                         std::invalid_argument);
    std::filesystem::remove(thin);

    // negative potential values are rejected at construction
    const std::string negative = scratch_path("negative.csv");
    write_text_file(negative, "x,v\n0.25,1.0\n0.5,-1.0\n");
    CHECK_THROWS_AS(load_potential_csv(negative), std::invalid_argument);
    std::filesystem::remove(negative);

    CHECK_THROWS_AS(load_potential_csv("/no/such/dir/pot.csv"), std::invalid_argument);
}

TEST_CASE("text file round trip") {
    const std::string path = scratch_path("roundtrip.txt");
    const std::string content = "line one\nline two\n";
    write_text_file(path, content);
    CHECK(read_text_file(path) == content);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(read_text_file("/no/such/file.txt"), std::invalid_argument);
    CHECK_THROWS_AS(write_text_file("/no/such/dir/out.txt", "x"), std::invalid_argument);
}
