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

// The two complete Bell-state analyzers (polarization with a fixed momentum
// ancilla, momentum with a fixed polarization ancilla), their detector
// signatures, and classification of observed coincidence tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hyperbell/detection.hpp"
#include "hyperbell/hilbert_oracle.hpp"
#include "hyperbell/linear_network.hpp"
#include "hyperbell/pdc_source.hpp"
#include "hyperbell/states.hpp"

namespace hyperbell {

namespace detail {

// Wave plate + PBS with vacuum at the free port. The reflected output
// carries i times the first signal component.
inline void add_analyzer(Apparatus &a, const std::string &port, Side side, bool diagonal, const std::string &reflected,
                         const std::string &transmitted) {
    if (diagonal) {
        a.steps.push_back({make_device(DeviceKind::hwp22_5, {port}, {port}, 0.0, side, "hwp_" + port), false});
    }
    a.steps.push_back(
        {make_device(DeviceKind::pbs, {port, ""}, {transmitted, reflected}, 0.0, side, "pa_pbs_" + port), true});
    a.detectors.push_back({reflected, side});
    a.detectors.push_back({transmitted, side});
}

}  // namespace detail

/// CNOT PBS on each photon (no idle port), then a +-45 degree analyzer on
/// each of a1, b1, a2, b2 with vacuum at every analyzer PBS.
inline Apparatus build_polarization_bsm() {
    Apparatus a;
    a.name = "pol-bsm";
    // Outputs (transmitted, reflected); the reflected H keeps its port name.
    a.steps.push_back({make_device(DeviceKind::cnot_pbs, {"a1", "b1"}, {"b1", "a1"}, 0.0, Side::left, "cnot_1"), false});
    a.steps.push_back({make_device(DeviceKind::cnot_pbs, {"a2", "b2"}, {"b2", "a2"}, 0.0, Side::right, "cnot_2"), false});
    for (const auto &[port, det, side] : std::vector<std::tuple<std::string, std::string, Side>>{
             {"a1", "A1", Side::left}, {"b1", "B1", Side::left}, {"a2", "A2", Side::right}, {"b2", "B2", Side::right}}) {
        detail::add_analyzer(a, port, side, true, det + "+", det + "-");
    }
    return a;
}

/// CNOT half-wave plates, balanced beam splitters and H/V analyzers. The
/// (x, y) dictionary puts M = HWP on whichever photon-1 port is b1.
inline Apparatus build_momentum_bsm(Path x, Path y) {
    const bool ab = x == Path::a1 && y == Path::b1;
    const bool ba = x == Path::b1 && y == Path::a1;
    if (!ab && !ba) {
        throw parameter_error("(x, y) must be (a, b) or (b, a)");
    }
    Apparatus a;
    a.name = "mom-bsm";
    a.steps.push_back({make_device(DeviceKind::hwp45, {"b1"}, {"b1"}, 0.0, Side::left, ab ? "M_y" : "M_x"), false});
    a.steps.push_back({make_device(DeviceKind::hwp45, {"b2"}, {"b2"}, 0.0, Side::right, "hwp_b2"), false});
    a.steps.push_back({make_device(DeviceKind::bs50, {"a1", "b1"}, {"A1", "B1"}, 0.0, Side::left, "bs_1"), false});
    a.steps.push_back({make_device(DeviceKind::bs50, {"a2", "b2"}, {"A2", "B2"}, 0.0, Side::right, "bs_2"), false});
    for (const auto &[port, side] : std::vector<std::pair<std::string, Side>>{
             {"A1", Side::left}, {"B1", Side::left}, {"A2", Side::right}, {"B2", Side::right}}) {
        detail::add_analyzer(a, port, side, false, port + "H", port + "V");
    }
    return a;
}

inline Apparatus build_momentum_bsm(PathOrder xy) {
    return xy == PathOrder::ab ? build_momentum_bsm(Path::a1, Path::b1) : build_momentum_bsm(Path::b1, Path::a1);
}

inline Apparatus build_apparatus(Setup setup, const HyperBellParams &params) {
    return setup == Setup::polarization_bsm ? build_polarization_bsm() : build_momentum_bsm(params.xy);
}

/// Source for `params` closed under the analyzer for `setup`.
inline Network build_network(Setup setup, const CouplingParams &coupling, const HyperBellParams &params) {
    auto src = hyperbell_source(coupling, params);
    return assemble(std::move(src.basis), std::move(src.map), build_apparatus(setup, params));
}

/// Polarization-only pair with one H/V analyzer per side. With `state`, the
/// rotator and retarder for that Bell state sit on a1 ahead of the analyzer.
inline Network build_single_dof_demo(const CouplingParams &coupling, std::optional<PolBell> state = std::nullopt) {
    Apparatus a;
    a.name = "n1-demo";
    if (state) {
        const auto p = HyperBellParams::of(*state, MomBell::psi_plus);
        a.steps.push_back({make_device(DeviceKind::pol_rotator, {"a1"}, {"a1"}, p.beta, Side::left, "rotator"), false});
        a.steps.push_back(
            {make_device(DeviceKind::wave_retarder, {"a1"}, {"a1"}, p.kappa, Side::left, "retarder"), false});
    }
    detail::add_analyzer(a, "a1", Side::left, false, "L_H", "L_V");
    detail::add_analyzer(a, "b2", Side::right, false, "R_H", "R_V");
    auto src = single_dof_source(coupling);
    return assemble(std::move(src.basis), std::move(src.map), a);
}

/// The measured degree of freedom's Bell label for `params` in `setup`.
inline std::string measured_label(Setup setup, const HyperBellParams &params) {
    return setup == Setup::polarization_bsm ? label(params.pol()) : label(params.mom());
}

/// The four states a setup is built to distinguish (ancilla fixed).
inline std::vector<HyperBellParams> admissible_states(Setup setup) {
    std::vector<HyperBellParams> out;
    if (setup == Setup::polarization_bsm) {
        for (auto p : kPolBells) out.push_back(HyperBellParams::of(p, MomBell::psi_plus));
    } else {
        for (auto m : kMomBells) out.push_back(HyperBellParams::of(PolBell::Psi_plus, m));
    }
    return out;
}

inline bool ancilla_fixed(Setup setup, const HyperBellParams &params) {
    return setup == Setup::polarization_bsm ? params.mom() == MomBell::psi_plus : params.pol() == PolBell::Psi_plus;
}

enum class Engine { analytic, montecarlo, oracle };

inline const char *engine_name(Engine e) {
    switch (e) {
        case Engine::analytic: return "analytic";
        case Engine::montecarlo: return "montecarlo";
        case Engine::oracle: return "oracle";
    }
    return "?";
}

struct ExperimentSpec {
    Setup setup = Setup::polarization_bsm;
    HyperBellParams state;
    Engine engine = Engine::analytic;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    DetectorGains gains;
    CouplingParams coupling;
    bool override_ancilla = false;
    unsigned workers = 1;

    void validate() const {
        state.validate();
        coupling.validate();
        gains.validate();
        if (!override_ancilla && !ancilla_fixed(setup, state)) {
            throw config_error(std::string(setup_name(setup)) + " needs the ancilla in " +
                               (setup == Setup::polarization_bsm ? "psi+" : "Psi+") + " (got " + state.label() +
                               "); pass the override flag for exploratory runs");
        }
        if (engine == Engine::montecarlo && samples == 0) {
            throw config_error("Monte-Carlo needs at least one sample");
        }
    }
};

/// Oracle distribution laid out as a normalized table over the network's
/// detectors.
inline CoincidenceTable oracle_table(Setup setup, const HyperBellParams &params) {
    const auto dist = oracle::oracle_coincidences(oracle::make_state(params), setup);
    CoincidenceTable t;
    t.normalization = Normalization::normalized;
    for (const auto &name : oracle::detector_names(setup, 1)) t.detectors.push_back({name, Side::left});
    for (const auto &name : oracle::detector_names(setup, 2)) t.detectors.push_back({name, Side::right});
    for (const auto &c : dist) {
        t.joint.push_back({c.first, c.second, true, c.p, std::nullopt});
    }
    return t;
}

/// Raw table (analytic, Monte-Carlo) or normalized distribution (oracle).
inline CoincidenceTable run_experiment(const ExperimentSpec &spec) {
    spec.validate();
    if (spec.engine == Engine::oracle) {
        return oracle_table(spec.setup, spec.state);
    }
    const Network net = build_network(spec.setup, spec.coupling, spec.state);
    if (spec.engine == Engine::analytic) {
        return analytic_joint(net, spec.gains);
    }
    return mc_joint(net, spec.gains, spec.samples, spec.seed, spec.workers);
}

using DetectorPair = std::pair<std::string, std::string>;
using SignatureTable = std::map<std::string, std::set<DetectorPair>>;

/// Cross-side pairs whose normalized probability exceeds `threshold`.
inline std::set<DetectorPair> signature(const CoincidenceTable &table, double threshold) {
    const CoincidenceTable t = table.normalization == Normalization::normalized ? table : normalized(table);
    std::set<DetectorPair> s;
    for (const auto &e : t.joint) {
        if (e.cross_side && e.p > threshold) s.insert({e.first, e.second});
    }
    return s;
}

/// Signature of each admissible state, from the analytic engine.
inline SignatureTable signature_table(Setup setup, double threshold = 1e-12,
                                      const CouplingParams &coupling = CouplingParams{}) {
    SignatureTable table;
    for (const auto &params : admissible_states(setup)) {
        table[measured_label(setup, params)] = signature(analytic_joint(build_network(setup, coupling, params)), threshold);
    }
    return table;
}

/// True when no detector pair appears in two signatures.
inline bool signatures_disjoint(const SignatureTable &t) {
    std::set<DetectorPair> seen;
    for (const auto &[label, pairs] : t) {
        for (const auto &p : pairs) {
            if (!seen.insert(p).second) return false;
        }
    }
    return true;
}

inline constexpr const char *kAmbiguous = "ambiguous";

/// Label whose signature quartet carries the coincidence mass. Tables
/// without standard errors need >= (1 - epsilon) of the cross-side total in
/// one quartet; Monte-Carlo tables need the winning quartet above 5 sigma
/// and every other quartet within 5 sigma of zero.
inline std::string classify(const CoincidenceTable &observed, Setup setup, double epsilon = 0.01) {
    const SignatureTable sig = signature_table(setup);
    const bool mc = observed.has_stderr();
    struct Mass {
        std::string label;
        double p = 0.0;
        double var = 0.0;
    };
    std::vector<Mass> masses;
    for (const auto &[label, pairs] : sig) {
        Mass m{label};
        for (const auto &[a, b] : pairs) {
            const auto *e = observed.find(a, b);
            if (!e) return kAmbiguous;
            m.p += e->p;
            if (e->stderr_) m.var += *e->stderr_ * *e->stderr_;
        }
        masses.push_back(m);
    }
    auto best = std::max_element(masses.begin(), masses.end(), [](const Mass &x, const Mass &y) { return x.p < y.p; });
    if (mc) {
        if (!(best->p > 5.0 * std::sqrt(best->var))) return kAmbiguous;
        for (const auto &m : masses) {
            if (&m != &*best && m.p > 5.0 * std::sqrt(m.var)) return kAmbiguous;
        }
        return best->label;
    }
    double total = 0.0;
    for (const auto &e : observed.joint) {
        if (e.cross_side) total += std::max(0.0, e.p);
    }
    if (!(total > 0.0) || best->p < (1.0 - epsilon) * total) return kAmbiguous;
    return best->label;
}

}  // namespace hyperbell
