// paritylab command-line front end.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "figures.hpp"
#include "paritylab/paritylab.hpp"

using namespace paritylab;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTruncation = 3;
constexpr int kExitContract = 4;

struct ConfigError : Error {
    using Error::Error;
};

struct RunConfig {
    std::string state;
    json state_json;  // set when the config file holds an object
    std::string sequence = "mzi";
    double noon_phase = 0.0;
    std::string observable = "parity-b";
    double phi_min = -kPi / 2;
    double phi_max = kPi / 2;
    int steps = 101;
    std::string output;
    std::string format = "csv";
    std::uint64_t seed = 0;
    int cutoff = -1;
};

void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known = {"state",   "sequence", "noon_phase", "observable", "phi",
                                                "output",  "format",   "seed",       "cutoff"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
    try {
        if (j.contains("state")) {
            if (j["state"].is_string())
                cfg.state = j["state"].get<std::string>();
            else
                cfg.state_json = j["state"];
        }
        if (j.contains("sequence")) cfg.sequence = j["sequence"].get<std::string>();
        if (j.contains("noon_phase")) cfg.noon_phase = j["noon_phase"].get<double>();
        if (j.contains("observable")) cfg.observable = j["observable"].get<std::string>();
        if (j.contains("phi")) {
            const auto& p = j["phi"];
            for (const auto& [key, value] : p.items())
                if (key != "min" && key != "max" && key != "steps")
                    throw ConfigError("unknown field 'phi." + key + "'");
            if (p.contains("min")) cfg.phi_min = p["min"].get<double>();
            if (p.contains("max")) cfg.phi_max = p["max"].get<double>();
            if (p.contains("steps")) cfg.steps = p["steps"].get<int>();
        }
        if (j.contains("output")) cfg.output = j["output"].get<std::string>();
        if (j.contains("format")) cfg.format = j["format"].get<std::string>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("cutoff")) cfg.cutoff = j["cutoff"].get<int>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
}

AngularState config_state(const RunConfig& cfg) {
    if (!cfg.state_json.is_null()) return scenario::state_from_json(cfg.state_json, cfg.cutoff);
    if (cfg.state.empty()) throw ConfigError("no input state given");
    return scenario::parse_state(cfg.state, cfg.cutoff);
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

std::string state_label(const RunConfig& cfg) { return cfg.state_json.is_null() ? cfg.state : cfg.state_json.dump(); }

int cmd_sweep(const RunConfig& cfg) {
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
    const auto grid = phase_grid(cfg.phi_min, cfg.phi_max, cfg.steps);
    const auto in = config_state(cfg);
    const auto seq = scenario::parse_sequence(cfg.sequence, cfg.noon_phase);
    const auto op = scenario::parse_observable(cfg.observable);
    const auto prepared = prepare(in, seq);
    const auto limits = photon_limits(in);
    const double qcrb = bound_from_information(4.0 * variance(prepared, Observable::of(ObservableKind::Jz)));

    cli::Table t{"sweep",
                 {std::string("paritylab ") + kVersion, "command = sweep", "state = " + state_label(cfg),
                  "sequence = " + cfg.sequence, "noon_phase = " + cli::format_number(cfg.noon_phase),
                  "observable = " + cfg.observable,
                  "truncation = " + (cfg.cutoff < 0 ? std::string("auto, tail < 1e-12") : std::to_string(cfg.cutoff)),
                  "seed = " + std::to_string(cfg.seed)},
                 {"phi", "expectation", "variance", "derivative", "delta_phi", "sql", "hl", "qcrb"},
                 {}};
    t.rows = parallel_map(grid, [&](double phi) {
        const auto p = signal_prepared(prepared, seq, op, phi);
        return std::vector<double>{phi, p.expectation, p.variance, p.derivative, p.delta_phi,
                                   limits.sql(), limits.hl(), qcrb};
    });
    if (cfg.format == "csv") {
        emit(cli::to_csv(t), cfg.output);
    } else {
        json j{{"meta", t.meta}, {"columns", t.columns}, {"rows", json::array()}};
        for (const auto& row : t.rows) {
            json r = json::array();
            for (double x : row) r.push_back(std::isfinite(x) ? json(x) : json(cli::format_number(x)));
            j["rows"].push_back(r);
        }
        emit(j.dump(2) + "\n", cfg.output);
    }
    return 0;
}

int cmd_figure(const std::string& id, const std::string& dir) {
    const cli::FigureEntry* entry = nullptr;
    for (const auto& e : cli::figure_registry())
        if (e.id == id) entry = &e;
    if (!entry) {
        std::string ids;
        for (const auto& e : cli::figure_registry()) ids += " " + e.id;
        throw ConfigError("unknown figure '" + id + "'; known:" + ids);
    }
    auto tables = entry->build();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    bool first = true;
    for (auto& t : tables) {
        t.meta.insert(t.meta.begin(), {std::string("paritylab ") + kVersion, "figure = " + id, "curve = " + t.name});
        if (dir.empty()) {
            if (!first) std::cout << "\n";
            std::cout << cli::to_csv(t);
        } else {
            emit(cli::to_csv(t), (std::filesystem::path(dir) / (id + "-" + t.name + ".csv")).string());
        }
        first = false;
    }
    return 0;
}

int cmd_oracle(const std::string& id, const std::vector<std::string>& extras, int fixed_digits, bool list) {
    if (list) {
        for (const auto& e : closed::registry()) {
            std::cout << e.id << " (";
            for (std::size_t i = 0; i < e.params.size(); ++i) std::cout << (i ? ", " : "") << e.params[i];
            std::cout << "): " << e.description << "\n";
        }
        return 0;
    }
    if (id.empty()) throw ConfigError("oracle needs an id (see --list)");
    const auto& entry = closed::lookup(id);
    closed::Params params;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string key = extras[i];
        std::string value;
        if (key.rfind("--", 0) != 0) throw ConfigError("expected --name value, got '" + key + "'");
        key = key.substr(2);
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else {
            if (i + 1 >= extras.size()) throw ConfigError("missing value for --" + key);
            value = extras[++i];
        }
        std::size_t used = 0;
        try {
            params[key] = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty()) throw ConfigError("bad number for --" + key + ": '" + value + "'");
    }
    const auto values = entry.evaluate(params);
    if (fixed_digits >= 0) {
        for (const auto& [k, v] : values) {
            std::ostringstream s;
            s << std::fixed << std::setprecision(fixed_digits) << v;
            std::cout << k << " = " << s.str() << "\n";
        }
        return 0;
    }
    json j{{"id", id}, {"params", params}, {"values", json::object()}};
    for (const auto& [k, v] : values) j["values"][k] = std::isfinite(v) ? json(v) : json(cli::format_number(v));
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_qfi(const RunConfig& cfg, double phi, long long shots) {
    const auto in = config_state(cfg);
    const auto seq = scenario::parse_sequence(cfg.sequence, cfg.noon_phase);
    const auto op = scenario::parse_observable(cfg.observable);
    const auto r = estimate(in, seq, op, phi, shots);
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(cli::format_number(x)); };
    json j{{"state", state_label(cfg)},
           {"sequence", cfg.sequence},
           {"observable", cfg.observable},
           {"phi", r.phi},
           {"shots", shots},
           {"qfi", num(r.qfi)},
           {"dphi_min", num(bound_from_information(r.qfi))},
           {"qcrb", num(r.qcrb)},
           {"fisher", num(r.fisher)},
           {"crb", num(r.crb)},
           {"saturation_gap", num(r.saturation_gap)},
           {"sql", num(r.sql)},
           {"hl", num(r.hl)},
           {"hoffman", num(r.hoffman)}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct QndOptions {
    std::string ancilla = "field";
    int atoms = 4;
    double alpha = 3.0;
    long long shots = 0;
    std::uint64_t seed = 0;
    std::string target;
    int ancilla_twice_j = 1;
    double tau = -1.0;
    double chi_t = kPi;
};

int cmd_qnd(const QndOptions& o) {
    if (o.atoms < 1) throw ConfigError("--atoms must be positive");
    const auto target = o.target.empty() ? atomic_coherent(Complex(-1.0), Spin(o.atoms)) : scenario::parse_state(o.target);
    if (target.only_sector().first.twice() != o.atoms)
        throw ConfigError("target state does not hold --atoms atoms");
    const double pi = expectation(target, Observable::of(ObservableKind::ParityAtomicExcited));
    json j{{"ancilla", o.ancilla},
           {"atoms", o.atoms},
           {"target", o.target.empty() ? "acs(" + std::to_string(o.atoms) + ",-1)" : o.target},
           {"parity_expectation", pi},
           {"shots", o.shots},
           {"seed", o.seed}};
    json probs = json::object(), freqs = json::object();
    auto fill = [&](const std::vector<ProtocolOutcome>& outcomes, long long clicked) {
        for (const auto& out : outcomes) {
            probs[out.label] = out.probability;
            if (o.shots > 0) freqs[out.label] = clicked > 0 ? double(out.shots_observed) / clicked : 0.0;
        }
    };
    if (o.ancilla == "field") {
        auto r = field_ancilla_protocol(target, o.alpha, o.chi_t);
        if (o.shots > 0) sample(r, o.shots, o.seed);
        fill(r.outcomes, o.shots - r.no_click_shots);
        j["alpha"] = o.alpha;
        j["distinguishability"] = r.distinguishability;
        j["no_click_probability"] = r.no_click_probability;
        if (o.shots > 0) j["no_click_shots"] = r.no_click_shots;
    } else if (o.ancilla == "atom") {
        auto r = atomic_ancilla_protocol(target, Spin(o.ancilla_twice_j), o.tau, o.chi_t);
        if (o.shots > 0) sample(r, o.shots, o.seed);
        fill(r.outcomes, o.shots);
        j["ancilla_j"] = 0.5 * o.ancilla_twice_j;
        j["projective"] = r.projective;
        j["distinguishability"] = r.projective ? 1.0 : 0.0;
    } else {
        throw ConfigError("--ancilla must be atom or field");
    }
    j["branch_probabilities"] = probs;
    j["empirical_frequencies"] = o.shots > 0 ? freqs : json(nullptr);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_qrng(double nbar, long long shots, std::uint64_t seed) {
    const auto f = closed::qrng_forms(nbar);
    json j{{"nbar", nbar}, {"p_even", f.p_even}, {"p_odd", f.p_odd}, {"parity", f.parity},
           {"mixed_parity", f.mixed_parity}};
    if (shots > 0) {
        const auto counts = sample_parity(f.parity, shots, seed);
        j["shots"] = shots;
        j["seed"] = seed;
        j["even_count"] = counts.plus;
        j["even_fraction"] = double(counts.plus) / shots;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

// Fast numerical contracts; a failure means the build cannot be trusted.
int cmd_selftest(double scale) {
    struct Check {
        std::string name;
        double error;
        double tolerance;
    };
    std::vector<Check> checks;
    {
        double worst = 0.0;
        for (int n = 1; n <= 10; ++n)
            for (double phi : {0.1, 0.7, 1.3}) {
                const double sim =
                    signal(twin_fock(n), SequenceSpec::mzi_jy_first(), Observable::of(ObservableKind::ParityB), phi)
                        .expectation;
                worst = std::max(worst, std::abs(sim - closed::twin_fock_forms(n, phi).parity));
            }
        checks.push_back({"twin-fock parity vs Legendre", worst, 1e-8});
    }
    {
        const auto d = wigner_d_block(Spin(100), 0.9).entries;
        const double err = (d.transpose() * d - Eigen::MatrixXd::Identity(d.rows(), d.cols())).cwiseAbs().maxCoeff();
        checks.push_back({"wigner-d orthogonality at j = 50", err, 1e-10});
    }
    {
        const double q = qfi_pure(product(coherent(2.0), fock(8)), SequenceSpec::mzi());
        checks.push_back({"qfi coherent(2) (x) fock(8) = 76", std::abs(q - 76.0), 1e-8});
    }
    {
        double worst = 0.0;
        for (int n : {3, 20})
            for (double phi : {0.2, 0.9})
                worst = std::max(worst, std::abs(signal(dicke(Spin(n), -0.5 * n), SequenceSpec::ramsey(),
                                                        Observable::of(ObservableKind::ParityAtomicGround), phi)
                                                     .expectation -
                                                 closed::acs_parity(n, phi)));
        checks.push_back({"ramsey parity cos^N", worst, 1e-9});
    }
    {
        const auto target = atomic_coherent(Complex(0.4, 0.7), Spin(4));
        const double pi = expectation(target, Observable::of(ObservableKind::ParityAtomicExcited));
        const auto r = field_ancilla_protocol(target, 3.0);
        checks.push_back({"field QND branch probability", std::abs(r.outcomes[0].probability - 0.5 * (1 + pi)), 1e-10});
    }
    checks.push_back({"qrng P_e(9) = 0.5", std::abs(closed::qrng_forms(9.0).p_even - 0.5), 5e-8});

    bool ok = true;
    for (const auto& c : checks) {
        const bool pass = c.error <= c.tolerance * scale;
        ok = ok && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << c.name << " (error " << cli::format_number(c.error)
                  << ", tolerance " << cli::format_number(c.tolerance * scale) << ")\n";
    }
    if (!ok) throw ContractViolation("selftest failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"paritylab: parity-based phase estimation toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    auto add_scenario = [&](CLI::App* sub, bool with_grid) {
        sub->add_option("--state", cfg.state, "input state, e.g. \"coherent(2)*fock(8)\" or \"twin_fock(4)\"");
        sub->add_option("--sequence", cfg.sequence, "mzi, mzi-jy, ramsey, ramsey-prepared, magic-noon");
        sub->add_option("--noon-phase", cfg.noon_phase, "relative phase for magic-noon");
        sub->add_option("--observable", cfg.observable, "parity-b, parity-a, jz, two-jz, zero-a, ground, sigma:N, ...");
        sub->add_option("--cutoff", cfg.cutoff, "explicit Fock cutoff for series states");
        if (with_grid) {
            sub->add_option("--config", config_path, "JSON run configuration");
            sub->add_option("--phi-min", cfg.phi_min);
            sub->add_option("--phi-max", cfg.phi_max);
            sub->add_option("--steps", cfg.steps);
            sub->add_option("-o,--output", cfg.output, "output path (default stdout)");
            sub->add_option("--format", cfg.format, "csv or json");
            sub->add_option("--seed", cfg.seed);
        }
    };

    auto* sweep = app.add_subcommand("sweep", "phase sweep of one observable");
    add_scenario(sweep, true);

    std::string figure_id, figure_dir;
    auto* figure = app.add_subcommand("figure", "figure data as CSV");
    figure->add_option("id", figure_id, "figure id")->required();
    figure->add_option("--output-dir", figure_dir, "write one CSV per curve into this directory");

    std::string oracle_id;
    int fixed_digits = -1;
    bool oracle_list = false;
    auto* oracle = app.add_subcommand("oracle", "evaluate a closed form; parameters as --name value");
    oracle->add_option("id", oracle_id, "closed-form id");
    oracle->add_option("--fixed", fixed_digits, "print values with this many decimals");
    oracle->add_flag("--list", oracle_list, "list closed forms");
    oracle->allow_extras();

    double qfi_phi = 1e-4;
    long long qfi_shots = 1;
    auto* qfi = app.add_subcommand("qfi", "quantum and classical Fisher information of a scenario");
    add_scenario(qfi, false);
    qfi->add_option("--phi", qfi_phi, "phase for the classical information");
    qfi->add_option("--shots", qfi_shots, "repetitions for the bounds");

    QndOptions qnd_opts;
    auto* qnd = app.add_subcommand("qnd", "QND parity readout through an ancilla");
    qnd->add_option("--ancilla", qnd_opts.ancilla, "atom or field");
    qnd->add_option("--atoms", qnd_opts.atoms, "atom number N = 2j of the target");
    qnd->add_option("--alpha", qnd_opts.alpha, "field ancilla amplitude");
    qnd->add_option("--shots", qnd_opts.shots, "sampled repetitions (0: analytic only)");
    qnd->add_option("--seed", qnd_opts.seed);
    qnd->add_option("--target", qnd_opts.target, "target state (default acs(N,-1))");
    qnd->add_option("--ancilla-atoms", qnd_opts.ancilla_twice_j, "atom number 2 j_b of the atomic ancilla");
    qnd->add_option("--tau", qnd_opts.tau, "atomic ancilla coherent-state parameter");
    qnd->add_option("--chi-t", qnd_opts.chi_t, "coupling angle");

    double qrng_nbar = 9.0;
    long long qrng_shots = 0;
    std::uint64_t qrng_seed = 0;
    auto* qrng = app.add_subcommand("qrng", "parity of coherent light as a random source");
    qrng->add_option("--nbar", qrng_nbar, "mean photon number")->required();
    qrng->add_option("--shots", qrng_shots);
    qrng->add_option("--seed", qrng_seed);

    double tolerance_scale = 1.0;
    auto* selftest = app.add_subcommand("selftest", "run numerical contract checks");
    selftest->add_option("--tolerance-scale", tolerance_scale, "multiply every tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sweep) {
            if (!config_path.empty()) {
                // Command-line flags given explicitly still win over the file.
                RunConfig from_file;
                load_config_file(config_path, from_file);
                auto given = [&](const char* name) { return sweep->count(name) > 0; };
                if (!given("--state")) {
                    cfg.state = from_file.state;
                    cfg.state_json = from_file.state_json;
                }
                if (!given("--sequence")) cfg.sequence = from_file.sequence;
                if (!given("--noon-phase")) cfg.noon_phase = from_file.noon_phase;
                if (!given("--observable")) cfg.observable = from_file.observable;
                if (!given("--cutoff")) cfg.cutoff = from_file.cutoff;
                if (!given("--phi-min")) cfg.phi_min = from_file.phi_min;
                if (!given("--phi-max")) cfg.phi_max = from_file.phi_max;
                if (!given("--steps")) cfg.steps = from_file.steps;
                if (!given("--output")) cfg.output = from_file.output;
                if (!given("--format")) cfg.format = from_file.format;
                if (!given("--seed")) cfg.seed = from_file.seed;
            }
            return cmd_sweep(cfg);
        }
        if (*figure) return cmd_figure(figure_id, figure_dir);
        if (*oracle) return cmd_oracle(oracle_id, oracle->remaining(), fixed_digits, oracle_list);
        if (*qfi) return cmd_qfi(cfg, qfi_phi, qfi_shots);
        if (*qnd) return cmd_qnd(qnd_opts);
        if (*qrng) return cmd_qrng(qrng_nbar, qrng_shots, qrng_seed);
        if (*selftest) return cmd_selftest(tolerance_scale);
    } catch (const TruncationOverflow& e) {
        std::cerr << "truncation failure: " << e.what() << "\n";
        return kExitTruncation;
    } catch (const ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return kExitContract;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "unexpected failure: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
