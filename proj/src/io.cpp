#include "qpesim/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

using nlohmann::json;

namespace qpesim {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string distribution_csv(const OutcomeDistribution& dist) {
    std::string out = "j,p_j\n";
    for (std::size_t j = 0; j < dist.probabilities.size(); ++j) {
        out += std::to_string(j);
        out += ',';
        out += format_double(dist.probabilities[j]);
        out += '\n';
    }
    return out;
}

std::string counts_csv(std::span<const std::int64_t> counts) {
    std::string out = "j,count\n";
    for (std::size_t j = 0; j < counts.size(); ++j) {
        out += std::to_string(j);
        out += ',';
        out += std::to_string(counts[j]);
        out += '\n';
    }
    return out;
}

std::string instance_json(const SpectralInstance& instance) {
    json arr = json::array();
    for (std::size_t l = 0; l < instance.phases.size(); ++l) {
        arr.push_back({{"phase", instance.phases[l]},
                       {"amplitude_re", instance.amplitudes(static_cast<Eigen::Index>(l)).real()},
                       {"amplitude_im", instance.amplitudes(static_cast<Eigen::Index>(l)).imag()}});
    }
    return arr.dump(2) + "\n";
}

SpectralInstance instance_from_json(const std::string& text) {
    const json arr = json::parse(text);
    if (!arr.is_array()) {
        throw std::invalid_argument("instance file: expected a JSON array");
    }
    SpectralInstance instance;
    instance.phases.reserve(arr.size());
    instance.amplitudes.resize(static_cast<Eigen::Index>(arr.size()));
    Eigen::Index l = 0;
    for (const json& entry : arr) {
        instance.phases.push_back(entry.at("phase").get<double>());
        instance.amplitudes(l++) = {entry.at("amplitude_re").get<double>(),
                                    entry.at("amplitude_im").get<double>()};
    }
    instance.validate();
    return instance;
}

std::string overlap_record_json(const RunRecord& rec) {
    json obj;
    obj["N"] = rec.n;
    obj["N0"] = rec.n0;
    obj["s"] = rec.s;
    obj["k"] = rec.k;
    obj["success_probability"] = rec.success_probability;
    obj["failure"] = rec.failure;
    obj["error_norm"] = rec.error_norm;
    obj["degenerate_warning"] = rec.degenerate_warning;
    return obj.dump(2) + "\n";
}

namespace {

constexpr const char* kRunHeader =
    "N0,s,N,k,success_probability,failure,error_norm,degenerate_warning,b,evolution_time,"
    "phase_true,good_set_probability,good_set_bound,modal_outcome,phase_estimate,"
    "eigenvalue_true,eigenvalue_estimate,eigenvalue_error,shots,good_hits,empirical_rate,seed";

json record_to_json(const RunRecord& rec) {
    json obj;
    obj["N0"] = rec.n0;
    obj["s"] = rec.s;
    obj["N"] = rec.n;
    obj["k"] = rec.k;
    obj["success_probability"] = rec.success_probability;
    obj["failure"] = rec.failure;
    obj["error_norm"] = rec.error_norm;
    obj["degenerate_warning"] = rec.degenerate_warning;
    obj["b"] = rec.b;
    obj["evolution_time"] = rec.evolution_time;
    obj["phase_true"] = rec.phase_true;
    obj["good_set_probability"] = rec.good_set_probability;
    obj["good_set_bound"] = rec.good_set_bound;
    obj["modal_outcome"] = rec.modal_outcome;
    obj["phase_estimate"] = rec.phase_estimate;
    obj["eigenvalue_true"] = rec.eigenvalue_true;
    obj["eigenvalue_estimate"] = rec.eigenvalue_estimate;
    obj["eigenvalue_error"] = rec.eigenvalue_error;
    obj["shots"] = rec.shots;
    obj["good_hits"] = rec.good_hits;
    obj["empirical_rate"] = rec.empirical_rate;
    obj["seed"] = rec.record_seed;
    return obj;
}

} // namespace

std::string run_report_csv(const RunReport& report) {
    std::string out = kRunHeader;
    out += '\n';
    for (const RunRecord& rec : report.records) {
        out += std::to_string(rec.n0) + ',' + std::to_string(rec.s) + ',' +
               std::to_string(rec.n) + ',' + std::to_string(rec.k) + ',' +
               format_double(rec.success_probability) + ',' + format_double(rec.failure) + ',' +
               format_double(rec.error_norm) + ',' + (rec.degenerate_warning ? "true" : "false") +
               ',' + std::to_string(rec.b) + ',' + format_double(rec.evolution_time) + ',' +
               format_double(rec.phase_true) + ',' + format_double(rec.good_set_probability) +
               ',' + format_double(rec.good_set_bound) + ',' + std::to_string(rec.modal_outcome) +
               ',' + format_double(rec.phase_estimate) + ',' + format_double(rec.eigenvalue_true) +
               ',' + format_double(rec.eigenvalue_estimate) + ',' +
               format_double(rec.eigenvalue_error) + ',' + std::to_string(rec.shots) + ',' +
               std::to_string(rec.good_hits) + ',' + format_double(rec.empirical_rate) + ',' +
               std::to_string(rec.record_seed) + '\n';
    }
    return out;
}

std::string run_report_json(const RunReport& report) {
    json arr = json::array();
    for (const RunRecord& rec : report.records) arr.push_back(record_to_json(rec));
    return json{{"records", arr}}.dump(2) + "\n";
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out = "N0,s,N,success_probability,failure,error_norm,bound_rhs\n";
    for (const SweepRow& row : sweep.rows) {
        out += std::to_string(row.n0) + ',' + std::to_string(row.s) + ',' +
               std::to_string(row.n) + ',' + format_double(row.success_probability) + ',' +
               format_double(row.failure) + ',' + format_double(row.error_norm) + ',' +
               format_double(row.bound_rhs) + '\n';
    }
    return out;
}

std::string sweep_json(const SweepResult& sweep) {
    json rows = json::array();
    for (const SweepRow& row : sweep.rows) {
        rows.push_back({{"N0", row.n0},
                        {"s", row.s},
                        {"N", row.n},
                        {"success_probability", row.success_probability},
                        {"failure", row.failure},
                        {"error_norm", row.error_norm},
                        {"bound_rhs", row.bound_rhs}});
    }
    json fit = {{"slope", sweep.fit.slope},
                {"intercept", sweep.fit.intercept},
                {"rms_residual", sweep.fit.rms_residual},
                {"points_used", sweep.fit.points_used},
                {"points_excluded", sweep.fit.points_excluded}};
    json obj = {{"rows", rows}, {"fit", fit}};
    obj["threshold_n0"] = sweep.threshold_n0 ? json(*sweep.threshold_n0) : json(nullptr);
    return obj.dump(2) + "\n";
}

namespace {

json potential_to_json(const PotentialSpec& potential) {
    switch (potential.kind()) {
    case PotentialSpec::Kind::Zero:
        return {{"kind", "zero"}};
    case PotentialSpec::Kind::QuadraticWell:
        return {{"kind", "quadratic_well"}, {"strength", potential.strength()}};
    case PotentialSpec::Kind::Tabulated:
        return {{"kind", "tabulated"},
                {"xs", potential.table_xs()},
                {"values", potential.table_values()}};
    }
    throw std::logic_error("potential_to_json: unknown kind");
}

PotentialSpec potential_from_json(const json& j) {
    if (j.is_string()) return parse_potential_token(j.get<std::string>());
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return PotentialSpec::zero();
    if (kind == "quadratic_well") {
        return PotentialSpec::quadratic_well(j.at("strength").get<double>());
    }
    if (kind == "tabulated") {
        return PotentialSpec::tabulated(j.at("xs").get<std::vector<double>>(),
                                        j.at("values").get<std::vector<double>>());
    }
    throw std::invalid_argument("config: unknown potential kind '" + kind + "'");
}

} // namespace

nlohmann::json config_to_json(const ExperimentConfig& config) {
    json obj;
    obj["potential"] = potential_to_json(config.potential);
    obj["k"] = config.target_index;
    obj["n0"] = config.coarse_sizes;
    if (config.doubling_count) obj["s"] = *config.doubling_count;
    if (config.fine_points) obj["fine_n"] = *config.fine_points;
    json qpe = {{"bits", config.qpe.accuracy_bits}, {"epsilon", config.qpe.epsilon}};
    if (config.qpe.explicit_b) qpe["b"] = *config.qpe.explicit_b;
    obj["qpe"] = qpe;
    obj["shots"] = config.shots;
    obj["seed"] = config.rng_seed;
    return obj;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig config;
    if (j.contains("potential")) config.potential = potential_from_json(j.at("potential"));
    if (j.contains("k")) config.target_index = j.at("k").get<int>();
    if (j.contains("n0")) config.coarse_sizes = j.at("n0").get<std::vector<int>>();
    if (j.contains("s")) config.doubling_count = j.at("s").get<int>();
    if (j.contains("fine_n")) config.fine_points = j.at("fine_n").get<int>();
    if (j.contains("qpe")) {
        const json& qpe = j.at("qpe");
        if (qpe.contains("bits")) config.qpe.accuracy_bits = qpe.at("bits").get<int>();
        if (qpe.contains("epsilon")) config.qpe.epsilon = qpe.at("epsilon").get<double>();
        if (qpe.contains("b")) config.qpe.explicit_b = qpe.at("b").get<int>();
    }
    if (j.contains("shots")) config.shots = j.at("shots").get<std::int64_t>();
    if (j.contains("seed")) config.rng_seed = j.at("seed").get<std::uint64_t>();
    return config;
}

PotentialSpec load_potential_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("potential file: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("potential file '" + path + "': empty");
    }
    // header row required; reject a file that starts with data
    {
        double probe;
        std::istringstream head(line);
        if (head >> probe) {
            throw std::invalid_argument("potential file '" + path +
                                        "': missing header row (line 1 starts with a number)");
        }
    }

    std::vector<double> xs;
    std::vector<double> values;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        double x = 0.0;
        double v = 0.0;
        char comma = '\0';
        if (!(row >> x >> comma >> v) || comma != ',') {
            throw std::invalid_argument("potential file '" + path + "': malformed line " +
                                        std::to_string(line_no) + ": '" + line + "'");
        }
        xs.push_back(x);
        values.push_back(v);
    }
    if (xs.size() < 2) {
        throw std::invalid_argument("potential file '" + path + "': need at least 2 data rows");
    }
    return PotentialSpec::tabulated(std::move(xs), std::move(values));
}

PotentialSpec parse_potential_token(const std::string& token) {
    if (token == "zero") return PotentialSpec::zero();
    if (token.rfind("quad:", 0) == 0) {
        const std::string arg = token.substr(5);
        double c = 0.0;
        try {
            std::size_t used = 0;
            c = std::stod(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
        } catch (const std::exception&) {
            throw std::invalid_argument("potential: bad quadratic strength '" + arg + "'");
        }
        return PotentialSpec::quadratic_well(c); // negative c fails with its own message
    }
    if (token.rfind("file:", 0) == 0) return load_potential_csv(token.substr(5));
    throw std::invalid_argument("potential: expected zero | quad:<c> | file:<path>, got '" +
                                token + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("short write to '" + path + "'");
}

} // namespace qpesim
