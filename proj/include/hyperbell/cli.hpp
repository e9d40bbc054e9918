// Copyright 2026 The Hyperbell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Command-line front end. Everything here writes to caller-supplied streams
// so the commands can be driven in-process by tests.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyperbell/bsm_experiments.hpp"
#include "hyperbell/zpf_ledger.hpp"

#ifndef HYPERBELL_VERSION
#define HYPERBELL_VERSION "0.1.0"
#endif

namespace hyperbell::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMismatch = 3;

inline constexpr const char *kSeedEnv = "HYPERBELL_SEED";

struct RunConfig {
    std::string experiment = "pol-bsm";
    std::string state = "Psi+:psi+";
    std::string engine = "analytic";
    std::uint64_t samples = 100000;
    std::optional<std::uint64_t> seed;  // unset: environment, then 0
    double coupling = 0.1;
    double coupling_phase = 0.0;
    std::map<std::string, double> gains;
    std::string format = "json";
    std::string out;  // empty writes to the output stream
    std::optional<std::string> expect;
    bool override_ancilla = false;
    unsigned workers = 1;

    bool operator==(const RunConfig &) const = default;
};

inline nlohmann::json to_json(const RunConfig &c) {
    nlohmann::json j = {{"experiment", c.experiment},
                        {"state", c.state},
                        {"engine", c.engine},
                        {"samples", c.samples},
                        {"seed", nullptr},
                        {"coupling", c.coupling},
                        {"coupling_phase", c.coupling_phase},
                        {"gains", c.gains},
                        {"format", c.format},
                        {"out", c.out},
                        {"expect", nullptr},
                        {"override_ancilla", c.override_ancilla},
                        {"workers", c.workers}};
    if (c.seed) j["seed"] = *c.seed;
    if (c.expect) j["expect"] = *c.expect;
    return j;
}

/// Strict: unknown keys and wrong types are config errors. Missing keys
/// keep their defaults.
inline RunConfig config_from_json(const nlohmann::json &j) {
    static const std::set<std::string> known{"experiment", "state",  "engine", "samples", "seed",
                                             "coupling",   "coupling_phase", "gains", "format",
                                             "out",        "expect", "override_ancilla", "workers"};
    if (!j.is_object()) throw config_error("config must be a JSON object");
    for (const auto &[key, value] : j.items()) {
        if (!known.count(key)) throw config_error("unknown config key '" + key + "'");
    }
    RunConfig c;
    try {
        auto get = [&](const char *key, auto &field) {
            if (j.contains(key)) j.at(key).get_to(field);
        };
        get("experiment", c.experiment);
        get("state", c.state);
        get("engine", c.engine);
        get("samples", c.samples);
        get("coupling", c.coupling);
        get("coupling_phase", c.coupling_phase);
        get("gains", c.gains);
        get("format", c.format);
        get("out", c.out);
        get("override_ancilla", c.override_ancilla);
        get("workers", c.workers);
        if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("expect") && !j.at("expect").is_null()) c.expect = j.at("expect").get<std::string>();
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("bad config value: ") + e.what());
    }
    return c;
}

inline RunConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw config_error("config file " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

/// Explicit seed, else HYPERBELL_SEED, else 0.
inline std::uint64_t resolve_seed(const RunConfig &c) {
    if (c.seed) return *c.seed;
    if (const char *env = std::getenv(kSeedEnv); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception &) {
        }
        throw config_error(std::string(kSeedEnv) + " must be an unsigned integer");
    }
    return 0;
}

inline Setup parse_setup(const std::string &name) {
    auto s = setup_from_name(name);
    if (!s) throw config_error("unknown experiment '" + name + "' (expected pol-bsm or mom-bsm)");
    return *s;
}

inline Engine parse_engine(const std::string &name) {
    for (Engine e : {Engine::analytic, Engine::montecarlo, Engine::oracle}) {
        if (name == engine_name(e)) return e;
    }
    throw config_error("unknown engine '" + name + "' (expected analytic, montecarlo or oracle)");
}

inline void check_format(const std::string &f) {
    if (f != "json" && f != "csv") throw config_error("unknown format '" + f + "' (expected json or csv)");
}

/// The experiment a config describes. Throws config_error or
/// parameter_error on bad input.
inline ExperimentSpec to_spec(const RunConfig &c) {
    ExperimentSpec s;
    s.setup = parse_setup(c.experiment);
    s.state = parse_state(c.state);
    s.engine = parse_engine(c.engine);
    s.samples = c.samples;
    s.seed = resolve_seed(c);
    s.gains.k = c.gains;
    s.coupling.C = std::polar(c.coupling, c.coupling_phase);
    s.override_ancilla = c.override_ancilla;
    s.workers = std::max(1u, c.workers);
    check_format(c.format);
    s.validate();
    return s;
}

namespace detail {

// Writes to the configured path, or to `out` when none is set.
inline void emit(const std::string &path, const std::string &text, std::ostream &out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot write " + path);
    f << text;
}

inline nlohmann::json metadata(const ExperimentSpec &s, const RunConfig &c) {
    nlohmann::json m = {{"version", HYPERBELL_VERSION},
                        {"experiment", setup_name(s.setup)},
                        {"state", s.state.label()},
                        {"engine", engine_name(s.engine)},
                        {"seed", s.seed},
                        {"coupling", {{"abs", c.coupling}, {"phase", c.coupling_phase}}}};
    if (s.engine == Engine::montecarlo) m["samples"] = s.samples;
    if (!c.gains.empty()) m["gains"] = c.gains;
    return m;
}

}  // namespace detail

/// Runs one experiment and writes the table, classification and metadata.
/// Returns 3 when --expect is set and the classification differs.
inline int cmd_simulate(const RunConfig &config, std::ostream &out, std::ostream &err) {
    const ExperimentSpec spec = to_spec(config);
    if (auto w = spec.coupling.warning()) err << "warning: " << *w << '\n';
    if (config.override_ancilla && !ancilla_fixed(spec.setup, spec.state)) {
        err << "warning: ancilla not fixed for " << setup_name(spec.setup) << "; classification is exploratory\n";
    }
    const CoincidenceTable table = run_experiment(spec);
    const std::string label = classify(table, spec.setup);
    nlohmann::json record = {{"label", label}, {"expected_label", measured_label(spec.setup, spec.state)}};
    int code = kExitOk;
    if (config.expect) {
        record["expect"] = *config.expect;
        record["match"] = *config.expect == label;
        if (*config.expect != label) code = kExitMismatch;
    }
    nlohmann::json meta = detail::metadata(spec, config);
    if (config.format == "json") {
        nlohmann::json doc = {{"metadata", meta}, {"classification", record}, {"table", to_json(table)}};
        detail::emit(config.out, doc.dump(2) + "\n", out);
    } else {
        detail::emit(config.out, to_csv(table), out);
        nlohmann::json side = {{"metadata", meta}, {"classification", record}};
        if (config.out.empty()) {
            err << side.dump() << '\n';
        } else {
            detail::emit(config.out + ".meta.json", side.dump(2) + "\n", out);
        }
    }
    if (code == kExitMismatch) {
        err << "classification '" << label << "' does not match expected '" << *config.expect << "'\n";
    }
    return code;
}

inline Network audit_network(const std::string &name) {
    if (name == "n1-demo") return build_single_dof_demo({});
    const Setup s = parse_setup(name);
    return build_network(s, {}, admissible_states(s).front());
}

/// Ledger JSON to the output, human-readable block to `err`.
inline int cmd_audit(const std::string &name, const std::string &out_path, std::ostream &out, std::ostream &err) {
    if (name != "n1-demo" && !setup_from_name(name)) {
        throw config_error("unknown experiment '" + name + "' (expected pol-bsm, mom-bsm or n1-demo)");
    }
    const Network net = audit_network(name);
    const ZpfLedger ledger = audit(net);
    const DependencyReport report = verify_lemma_II(net);
    nlohmann::json doc = to_json(ledger);
    doc["experiment"] = name;
    doc["input_mode_sets"] = report.input_mode_sets;
    doc["output_channels"] = report.output_channels;
    doc["counts_match"] = report.counts_match;
    doc["version"] = HYPERBELL_VERSION;
    err << name << ' ' << audit_text(ledger);
    detail::emit(out_path, doc.dump(2) + "\n", out);
    return kExitOk;
}

struct SweepRow {
    HyperBellParams state;
    bool admissible = false;
    CoincidenceTable table;  // normalized
    std::set<DetectorPair> signature;
    std::string label;
};

struct SweepResult {
    Setup setup = Setup::polarization_bsm;
    std::vector<DetectorPair> pairs;  // column order, 16 cross-side pairs
    std::vector<SweepRow> rows;
    bool admissible_disjoint = false;
    nlohmann::json collisions = nlohmann::json::array();
};

/// Runs every admissible state (all sixteen with the override) through the
/// configured setup and engine.
inline SweepResult sweep(const RunConfig &config) {
    RunConfig base = config;
    base.state = "Psi+:psi+";
    const ExperimentSpec proto = to_spec(base);
    SweepResult r;
    r.setup = proto.setup;
    std::vector<HyperBellParams> states =
        config.override_ancilla ? all_hyperbell_states() : admissible_states(proto.setup);
    for (const auto &params : states) {
        ExperimentSpec s = proto;
        s.state = params;
        s.override_ancilla = true;
        SweepRow row;
        row.state = params;
        row.admissible = ancilla_fixed(proto.setup, params);
        CoincidenceTable t = run_experiment(s);
        row.label = classify(t, proto.setup);
        row.table = t.normalization == Normalization::normalized ? t : normalized(t);
        row.signature = signature(row.table, s.engine == Engine::montecarlo ? 0.05 : 1e-12);
        r.rows.push_back(std::move(row));
    }
    for (const auto &e : r.rows.front().table.joint) r.pairs.push_back({e.first, e.second});

    std::set<DetectorPair> seen;
    r.admissible_disjoint = true;
    for (const auto &row : r.rows) {
        if (!row.admissible) continue;
        for (const auto &p : row.signature) {
            if (!seen.insert(p).second) r.admissible_disjoint = false;
        }
    }
    // A non-admissible state collides when it shares a pair with an
    // admissible state whose measured label differs.
    for (const auto &row : r.rows) {
        if (row.admissible) continue;
        nlohmann::json hits = nlohmann::json::array();
        for (const auto &ref : r.rows) {
            if (!ref.admissible) continue;
            const std::string ref_label = measured_label(proto.setup, ref.state);
            if (ref_label == measured_label(proto.setup, row.state)) continue;
            for (const auto &p : row.signature) {
                if (ref.signature.count(p)) {
                    hits.push_back(ref.state.label());
                    break;
                }
            }
        }
        if (!hits.empty()) {
            r.collisions.push_back({{"state", row.state.label()},
                                    {"measured_label", measured_label(proto.setup, row.state)},
                                    {"classified_as", row.label},
                                    {"collides_with", hits}});
        }
    }
    return r;
}

inline std::string sweep_csv(const SweepResult &r) {
    std::ostringstream os;
    os << "state,admissible,label";
    for (const auto &[a, b] : r.pairs) os << ',' << a << '|' << b;
    os << '\n';
    for (const auto &row : r.rows) {
        os << row.state.label() << ',' << (row.admissible ? 1 : 0) << ',' << row.label;
        for (const auto &[a, b] : r.pairs) os << ',' << hyperbell::detail::fmt12(row.table.p(a, b));
        os << '\n';
    }
    return os.str();
}

inline nlohmann::json sweep_json(const SweepResult &r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : r.rows) {
        nlohmann::json sig = nlohmann::json::array();
        for (const auto &[a, b] : row.signature) sig.push_back(a + "|" + b);
        rows.push_back({{"state", row.state.label()},
                        {"admissible", row.admissible},
                        {"label", row.label},
                        {"signature", sig},
                        {"joint", to_json(row.table)["joint"]}});
    }
    return {{"experiment", setup_name(r.setup)},
            {"admissible_disjoint", r.admissible_disjoint},
            {"rows", rows},
            {"collisions", r.collisions}};
}

inline int cmd_sweep(const RunConfig &config, std::ostream &out, std::ostream &err) {
    const SweepResult r = sweep(config);
    if (config.format == "json") {
        nlohmann::json doc = sweep_json(r);
        doc["version"] = HYPERBELL_VERSION;
        detail::emit(config.out, doc.dump(2) + "\n", out);
    } else {
        detail::emit(config.out, sweep_csv(r), out);
    }
    err << setup_name(r.setup) << ": admissible signatures " << (r.admissible_disjoint ? "disjoint" : "overlap")
        << ", " << r.collisions.size() << " colliding state(s)\n";
    for (const auto &c : r.collisions) err << "  collision " << c.dump() << '\n';
    return kExitOk;
}

namespace detail {

// Options shared by simulate and sweep. Values land in `flags`; which ones
// were given is read back from the App after parsing.
inline void add_run_options(CLI::App *cmd, RunConfig &flags, std::string &config_path,
                            std::vector<std::string> &gain_args) {
    cmd->add_option("--config", config_path, "JSON run config; flags override it");
    cmd->add_option("--experiment", flags.experiment, "pol-bsm or mom-bsm");
    cmd->add_option("--state", flags.state, "hyper-Bell state, e.g. Phi+:psi+");
    cmd->add_option("--engine", flags.engine, "analytic, montecarlo or oracle");
    cmd->add_option("--samples", flags.samples, "Monte-Carlo samples");
    cmd->add_option("--seed", flags.seed, "RNG seed (fallback: $HYPERBELL_SEED, then 0)");
    cmd->add_option("--coupling", flags.coupling, "coupling magnitude |C|");
    cmd->add_option("--coupling-phase", flags.coupling_phase, "coupling phase in radians");
    cmd->add_option("--gain", gain_args, "detector gain, NAME=VALUE (repeatable)");
    cmd->add_option("--format", flags.format, "json or csv");
    cmd->add_option("--out", flags.out, "output path (default stdout)");
    cmd->add_option("--expect", flags.expect, "expected label; mismatch exits 3");
    cmd->add_flag("--override-ancilla", flags.override_ancilla, "allow states outside the fixed ancilla");
    cmd->add_option("--workers", flags.workers, "Monte-Carlo worker threads");
}

inline RunConfig merge(const CLI::App *cmd, const RunConfig &flags, const std::string &config_path,
                       const std::vector<std::string> &gain_args) {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    auto given = [&](const char *name) { return cmd->count(name) > 0; };
    if (given("--experiment")) c.experiment = flags.experiment;
    if (given("--state")) c.state = flags.state;
    if (given("--engine")) c.engine = flags.engine;
    if (given("--samples")) c.samples = flags.samples;
    if (given("--seed")) c.seed = flags.seed;
    if (given("--coupling")) c.coupling = flags.coupling;
    if (given("--coupling-phase")) c.coupling_phase = flags.coupling_phase;
    if (given("--format")) c.format = flags.format;
    if (given("--out")) c.out = flags.out;
    if (given("--expect")) c.expect = flags.expect;
    if (given("--override-ancilla")) c.override_ancilla = flags.override_ancilla;
    if (given("--workers")) c.workers = flags.workers;
    for (const auto &g : gain_args) {
        const auto eq = g.find('=');
        if (eq == std::string::npos || eq == 0) throw config_error("--gain expects NAME=VALUE, got '" + g + "'");
        try {
            c.gains[g.substr(0, eq)] = std::stod(g.substr(eq + 1));
        } catch (const std::exception &) {
            throw config_error("bad gain value in '" + g + "'");
        }
    }
    return c;
}

}  // namespace detail

/// Entry point. `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Hyper-Bell state analyzers in the Wigner representation", "hyperbell"};
    app.require_subcommand(1);
    app.set_version_flag("--version", HYPERBELL_VERSION);

    RunConfig sim_flags, sweep_flags;
    std::string sim_config, sweep_config, audit_name, audit_out;
    std::vector<std::string> sim_gains, sweep_gains;

    auto *sim = app.add_subcommand("simulate", "run one experiment and classify the outcome");
    detail::add_run_options(sim, sim_flags, sim_config, sim_gains);
    auto *aud = app.add_subcommand("audit", "zero-point mode ledger of a network");
    aud->add_option("experiment", audit_name, "pol-bsm, mom-bsm or n1-demo")->required();
    aud->add_option("--out", audit_out, "output path (default stdout)");
    auto *swp = app.add_subcommand("sweep", "run every state through one setup");
    detail::add_run_options(swp, sweep_flags, sweep_config, sweep_gains);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion &) {
        out << HYPERBELL_VERSION << '\n';
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(detail::merge(sim, sim_flags, sim_config, sim_gains), out, err);
        }
        if (aud->parsed()) {
            return cmd_audit(audit_name, audit_out, out, err);
        }
        return cmd_sweep(detail::merge(swp, sweep_flags, sweep_config, sweep_gains), out, err);
    } catch (const std::invalid_argument &e) {  // config_error, parameter_error
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error &e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace hyperbell::cli
