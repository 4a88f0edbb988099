// Command-line front end: simulate traces, run statistical checks, sweep
// experiment grids to CSV, and validate models.
//
// Exit codes: 0 success; 1 an --expect'ed verdict did not hold; 2 usage,
// property, model, or configuration errors; 3 internal errors.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnsmc/config.hpp"
#include "pnsmc/controlsys.hpp"
#include "pnsmc/errors.hpp"
#include "pnsmc/netfile.hpp"
#include "pnsmc/smc.hpp"
#include "pnsmc/trace.hpp"

namespace {

using namespace pnsmc;

/// Time values accept raw time units (1 unit = 30 s) or a calendar suffix:
/// d days (2880), h hours (120), m minutes (2), s seconds (1/30).
double parse_time(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty time value");
    double scale = 1.0;
    std::string number = text;
    switch (text.back()) {
        case 'd': scale = 2880.0; break;
        case 'h': scale = 120.0; break;
        case 'm': scale = 2.0; break;
        case 's': scale = 1.0 / 30.0; break;
        default: scale = 0.0; break;
    }
    if (scale != 0.0) {
        number = text.substr(0, text.size() - 1);
    } else {
        scale = 1.0;
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(number, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse time value '" + text + "'");
    }
    if (used != number.size()) {
        throw std::invalid_argument("cannot parse time value '" + text + "'");
    }
    return value * scale;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(pos, comma - pos);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        if (!item.empty()) grid.push_back(parse_time(item));
        if (comma == text.size()) break;
        pos = comma + 1;
    }
    if (grid.empty()) throw std::invalid_argument("empty time grid");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1])) {
            throw std::invalid_argument("grid values must be strictly increasing");
        }
    }
    if (!(grid.front() > 0.0)) throw std::invalid_argument("grid values must be positive");
    return grid;
}

TemporalResolution parse_resolution(const std::string& text) {
    if (text == "firings") return TemporalResolution::any_firing();
    const double dt = parse_time(text);
    if (!(dt > 0.0)) throw std::invalid_argument("tick period must be > 0");
    return TemporalResolution::every(dt);
}

struct ModelBundle {
    Net net;
    Observer observer;
    PropositionTable propositions;
};

ModelBundle load_model(const std::string& name, const std::string& config_path) {
    Config config;
    if (!config_path.empty()) config = load_config_file(config_path);
    if (name == "controlsys") {
        ControlSystem cs = build_control_system(apply_system_params(config, SystemParams{}));
        return ModelBundle{std::move(cs.net), std::move(cs.observer),
                           std::move(cs.propositions)};
    }
    std::ifstream probe(name);
    if (!probe) {
        throw std::invalid_argument("unknown model '" + name +
                                    "' (not a built-in and not a readable net file)");
    }
    probe.close();
    if (!config.empty()) {
        std::cerr << "warning: --config is only used by the controlsys model\n";
    }
    LoadedModel loaded = load_net_file(name);
    return ModelBundle{std::move(loaded.net), std::move(loaded.observer), {}};
}

/// Output stream selector: --out file or standard output.
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw std::invalid_argument("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

FormulaPtr parse_and_resolve(const std::string& text, const PropositionTable& propositions) {
    ParseResult parsed = parse_property(text);
    for (const std::string& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
    return resolve(parsed.formula, propositions);
}

void write_csv_row(std::ostream& out, double t, const VerificationResult& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%.9g,%s,%.9g,%.9g,%.9g,%lld,%llu\n", t, r.property.c_str(),
                  r.estimate, r.ci_low, r.ci_high, static_cast<long long>(r.traces_used),
                  static_cast<unsigned long long>(r.seed));
    out << buf;
    out.flush();
}

struct GlobalFlags {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::string model = "controlsys";
    std::string config;
    std::string out;
    std::string resolution = "1";
};

int run_simulate(const GlobalFlags& g, const std::string& horizon_text) {
    ModelBundle model = load_model(g.model, g.config);
    const double horizon = parse_time(horizon_text);
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
    const TemporalResolution resolution = parse_resolution(g.resolution);
    RandomStream stream(g.seed);
    ExecutionTrace trace = run_trace(model.net, model.observer, resolution, horizon, stream);
    OutputTarget target(g.out);
    write_csv(trace, target.stream());
    target.stream().flush();
    return 0;
}

struct CheckFlags {
    std::string property;
    std::int64_t runs = 0;
    std::vector<double> chernoff;  // epsilon delta
    double sprt_theta = -1.0;
    double alpha = 0.01;
    double beta = 0.01;
    double half_width = 0.01;
    std::string mean_variable;
    std::string at_text;
    std::string expect;
};

int run_check(const GlobalFlags& g, const CheckFlags& f) {
    ModelBundle model = load_model(g.model, g.config);
    const TemporalResolution resolution = parse_resolution(g.resolution);
    RunOptions options;
    options.seed = g.seed;
    options.jobs = g.jobs;

    const bool has_runs = f.runs > 0;
    const bool has_chernoff = !f.chernoff.empty();
    const bool has_sprt = f.sprt_theta >= 0.0;
    const bool has_mean = !f.mean_variable.empty();
    const int selected = int(has_chernoff) + int(has_sprt) + int(has_mean) +
                         int(has_runs && !has_mean);
    if (selected != 1) {
        throw std::invalid_argument(
            "choose exactly one of --runs, --chernoff, --sprt, or --mean");
    }
    if (!f.expect.empty() && !has_sprt) {
        throw std::invalid_argument("--expect needs a --sprt verdict");
    }

    VerificationResult result;
    if (has_mean) {
        if (f.at_text.empty()) throw std::invalid_argument("--mean needs --at <time>");
        ExpectationQuery query;
        query.variable = f.mean_variable;
        query.at_time = parse_time(f.at_text);
        query.n = f.runs > 0 ? f.runs : 3000;
        result = estimate_expectation(model.net, model.observer, resolution, query, options);
    } else {
        if (f.property.empty()) throw std::invalid_argument("--prop is required");
        FormulaPtr formula = parse_and_resolve(f.property, model.propositions);
        if (has_chernoff) {
            ChernoffBound query;
            query.epsilon = f.chernoff[0];
            query.delta = f.chernoff[1];
            result = estimate_probability(model.net, model.observer, resolution, formula, query,
                                          options);
        } else if (has_sprt) {
            SprtQuery query;
            query.theta = f.sprt_theta;
            query.alpha = f.alpha;
            query.beta = f.beta;
            query.half_width = f.half_width;
            result = sprt(model.net, model.observer, resolution, formula, query, options);
        } else {
            FixedRuns query;
            query.n = f.runs;
            result = estimate_probability(model.net, model.observer, resolution, formula, query,
                                          options);
        }
        result.property = f.property;  // echo the text as the user wrote it
    }

    const std::string json = to_json(result);
    OutputTarget target(g.out);
    target.stream() << json << "\n";
    target.stream().flush();
    if (target.stream().rdbuf() != std::cout.rdbuf()) std::cout << json << "\n";

    if (!f.expect.empty()) {
        const std::string verdict = result.verdict ? std::string(to_string(*result.verdict)) : "";
        if (verdict != f.expect) return 1;
    }
    return 0;
}

struct ExperimentFlags {
    std::string preset;
    std::string grid_text;
    std::int64_t runs = 3000;
};

int run_experiment(const GlobalFlags& g, const ExperimentFlags& f) {
    ModelBundle model = load_model(g.model, g.config);
    const TemporalResolution resolution = parse_resolution(g.resolution);
    RunOptions options;
    options.seed = g.seed;
    options.jobs = g.jobs;
    if (f.runs < 1) throw std::invalid_argument("--runs must be >= 1");

    std::vector<double> grid;
    if (f.grid_text.empty()) {
        grid = {14400.0, 28800.0, 43200.0, 57600.0, 72000.0, 86400.0};  // 5..30 days
    } else {
        grid = parse_grid(f.grid_text);
    }

    OutputTarget target(g.out);
    std::ostream& out = target.stream();
    out << "T,property,estimate,ci_low,ci_high,n,seed\n";
    out.flush();

    auto probability_preset = [&](const std::string& pattern) {
        // One shared-trace pass per grid point; rows flush as each pass ends.
        char bound[64];
        for (double t : grid) {
            std::snprintf(bound, sizeof(bound), "%.9g", t);
            std::vector<FormulaPtr> formulas;
            std::vector<std::string> texts;
            for (int i = 1; i <= 4; ++i) {
                std::string text = pattern;
                const std::string marker = "<T>";
                text.replace(text.find(marker), marker.size(), bound);
                const std::string imarker = "<i>";
                text.replace(text.find(imarker), imarker.size(), std::to_string(i));
                texts.push_back(text);
                formulas.push_back(parse_and_resolve(text, model.propositions));
            }
            FixedRuns query;
            query.n = f.runs;
            auto results = estimate_probabilities(model.net, model.observer, resolution, formulas,
                                                  query, options);
            for (std::size_t j = 0; j < results.size(); ++j) {
                results[j].property = texts[j];  // the text the user would write
                write_csv_row(out, t, results[j]);
            }
        }
    };

    auto expectation_preset = [&](const std::vector<std::string>& variables) {
        // One pass serves every variable at every grid point.
        auto results = estimate_expectations(model.net, model.observer, resolution, variables,
                                             grid, f.runs, options);
        // Results are variable-major; emit rows T-major to match the sweep.
        for (std::size_t gidx = 0; gidx < grid.size(); ++gidx) {
            for (std::size_t v = 0; v < variables.size(); ++v) {
                write_csv_row(out, grid[gidx], results[v * grid.size() + gidx]);
            }
        }
    };

    if (f.preset == "fig4") {
        probability_preset("F<=<T> failure_<i>");
    } else if (f.preset == "fig5") {
        probability_preset("!shutdown U<=<T> failure_<i>");
    } else if (f.preset == "fig6") {
        expectation_preset({"reward_up", "reward_danger", "reward_shutdown"});
    } else if (f.preset == "fig7") {
        expectation_preset({"reboots_input", "reboots_output", "reboots_total"});
    } else if (f.preset == "fig8") {
        expectation_preset({"number_sensors", "number_actuators"});
    } else {
        throw std::invalid_argument("unknown preset '" + f.preset +
                                    "' (expected fig4, fig5, fig6, fig7, or fig8)");
    }
    return 0;
}

int run_validate(const GlobalFlags& g) {
    ModelBundle model = load_model(g.model, g.config);
    auto problems = validate_net(model.net);
    if (!problems.empty()) {
        for (const std::string& p : problems) std::cerr << "problem: " << p << "\n";
        return 2;
    }
    std::cout << "ok: " << model.net.places.size() << " places, " << model.net.rules.size()
              << " rules, " << model.observer.schema()->size() << " observed variables\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    GlobalFlags global;
    CLI::App app{"Statistical model checker for stochastic high-level Petri nets"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", global.seed, "Master seed for trace derivation");
    app.add_option("--jobs", global.jobs, "Worker threads (never affects results)");
    app.add_option("--model", global.model, "Built-in model name or net file path");
    app.add_option("--config", global.config, "key = value parameter overrides");
    app.add_option("--out", global.out, "Write output to this file");
    app.add_option("--resolution", global.resolution,
                   "Sampling: tick period (time value) or 'firings'");

    auto* sim = app.add_subcommand("simulate", "Run one trace and write it as CSV");
    std::string horizon_text;
    sim->add_option("--horizon", horizon_text, "Simulation horizon (time value)")->required();

    auto* check = app.add_subcommand("check", "Run one statistical query, print result JSON");
    CheckFlags check_flags;
    check->add_option("--prop", check_flags.property, "Property text");
    check->add_option("--runs", check_flags.runs, "Fixed number of traces");
    check->add_option("--chernoff", check_flags.chernoff,
                      "epsilon delta: absolute-error bound with confidence 1-delta")
        ->expected(2);
    check->add_option("--sprt", check_flags.sprt_theta, "Sequential test of p >= theta");
    check->add_option("--alpha", check_flags.alpha, "Sequential test false-reject bound");
    check->add_option("--beta", check_flags.beta, "Sequential test false-accept bound");
    check->add_option("--half-width", check_flags.half_width,
                      "Sequential test indifference half-width");
    check->add_option("--mean", check_flags.mean_variable, "Estimate a variable's mean instead");
    check->add_option("--at", check_flags.at_text, "Time at which --mean reads the variable");
    check->add_option("--expect", check_flags.expect,
                      "accept|reject: exit 1 unless the sequential verdict matches")
        ->check(CLI::IsMember({"accept", "reject"}));

    auto* experiment = app.add_subcommand("experiment", "Sweep a preset grid, write CSV");
    ExperimentFlags exp_flags;
    experiment->add_option("--preset", exp_flags.preset, "fig4|fig5|fig6|fig7|fig8")->required();
    experiment->add_option("--grid", exp_flags.grid_text,
                           "Comma-separated horizon sweep (time values)");
    experiment->add_option("--runs", exp_flags.runs, "Traces per grid cell");

    auto* validate = app.add_subcommand("validate", "Check the model for structural problems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return run_simulate(global, horizon_text);
        if (check->parsed()) return run_check(global, check_flags);
        if (experiment->parsed()) return run_experiment(global, exp_flags);
        if (validate->parsed()) return run_validate(global);
        std::cerr << "error: no command selected\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: line " << e.line() << ", column " << e.column() << ": " << e.what()
                  << "\n";
        return 2;
    } catch (const EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
