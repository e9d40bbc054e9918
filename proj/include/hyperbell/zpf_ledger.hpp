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

// Static accounting of the vacuum mode sets a network consumes: sets
// amplified at the source, sets injected through analyzer idle ports, and
// the resulting bound on distinguishable Bell-state classes.

#include <bit>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperbell/linear_network.hpp"

namespace hyperbell {

class audit_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ZpfLedger {
    int n_dof = 0;
    int n_zpf_source = 0;
    int n_idle_channels = 0;
    std::map<Side, int> n_zpf_side{{Side::left, 0}, {Side::right, 0}};
    int n_max_class = 0;
};

/// Counts mode sets by provenance. Every basis mode must carry one.
inline ZpfLedger audit(const Network &net) {
    ZpfLedger l;
    std::set<int> injection_points;
    for (std::size_t i = 0; i < net.basis().size(); ++i) {
        const auto &prov = net.basis().provenance(i);
        switch (prov.origin) {
            case Origin::unknown:
                throw audit_error("mode " + net.basis()[i].name() + " has no provenance");
            case Origin::source:
                ++l.n_zpf_source;
                break;
            case Origin::idle:
                if (!prov.side) {
                    throw audit_error("idle mode " + net.basis()[i].name() + " has no side");
                }
                ++l.n_zpf_side[*prov.side];
                injection_points.insert(prov.injection_point);
                break;
        }
    }
    if (l.n_zpf_source < 4 || !std::has_single_bit(static_cast<unsigned>(l.n_zpf_source))) {
        throw audit_error("source mode count " + std::to_string(l.n_zpf_source) + " is not 2^(n+1) for n >= 1");
    }
    l.n_dof = std::countr_zero(static_cast<unsigned>(l.n_zpf_source)) - 1;
    l.n_idle_channels = static_cast<int>(injection_points.size());
    l.n_max_class = l.n_zpf_source - l.n_idle_channels;
    return l;
}

/// Pure counting for n degrees of freedom: 2^(n+1) source sets and 2^n
/// idle entry points (2^n idle sets on each side).
inline ZpfLedger counting_ledger(int n) {
    if (n < 1 || n > 20) {
        throw std::invalid_argument("n must be in [1, 20]");
    }
    ZpfLedger l;
    l.n_dof = n;
    l.n_zpf_source = 1 << (n + 1);
    l.n_idle_channels = 1 << n;
    l.n_zpf_side = {{Side::left, 1 << n}, {Side::right, 1 << n}};
    l.n_max_class = l.n_zpf_source - l.n_idle_channels;
    return l;
}

inline nlohmann::json to_json(const ZpfLedger &l) {
    return {{"n_dof", l.n_dof},
            {"N_zpf_source", l.n_zpf_source},
            {"N_idle_channels", l.n_idle_channels},
            {"N_zpf_side", {{"L", l.n_zpf_side.at(Side::left)}, {"R", l.n_zpf_side.at(Side::right)}}},
            {"N_max_class", l.n_max_class}};
}

inline std::string audit_text(const ZpfLedger &l) {
    std::ostringstream os;
    os << "zeropoint ledger\n"
       << "  degrees of freedom n        " << l.n_dof << '\n'
       << "  source mode sets            " << l.n_zpf_source << '\n'
       << "  idle entry points           " << l.n_idle_channels << '\n'
       << "  idle mode sets (L / R)      " << l.n_zpf_side.at(Side::left) << " / " << l.n_zpf_side.at(Side::right)
       << '\n'
       << "  max distinguishable classes " << l.n_max_class << " = " << l.n_zpf_source << " - " << l.n_idle_channels
       << '\n';
    return os.str();
}

/// Which input mode sets feed each detected output channel.
struct DependencyReport {
    std::size_t input_mode_sets = 0;
    std::size_t output_channels = 0;
    bool counts_match = false;
    std::vector<std::string> rows;  // detector channel names
    std::vector<std::string> cols;  // mode names
    std::vector<std::vector<bool>> depends;
    std::map<std::string, int> source_sets_per_detector;
};

/// Compares detected output channels against input mode sets and records
/// the nonzero pattern of (A, B). Structural zeros are reported, not
/// treated as failures.
inline DependencyReport verify_lemma_II(const Network &net, double tol = 1e-14) {
    DependencyReport r;
    r.input_mode_sets = net.basis().size();
    r.output_channels = net.detected_channel_count();
    r.counts_match = r.input_mode_sets == r.output_channels;
    for (const auto &m : net.basis().modes()) {
        r.cols.push_back(m.name());
    }
    const auto &A = net.map().A;
    const auto &B = net.map().B;
    for (const auto &d : net.detectors()) {
        std::set<Eigen::Index> touched;
        for (auto row : net.detector_rows(d)) {
            r.rows.push_back(net.map().outputs[static_cast<std::size_t>(row)].name());
            std::vector<bool> dep(net.basis().size());
            for (Eigen::Index c = 0; c < A.cols(); ++c) {
                dep[static_cast<std::size_t>(c)] = std::abs(A(row, c)) > tol || std::abs(B(row, c)) > tol;
                if (dep[static_cast<std::size_t>(c)] &&
                    net.basis().provenance(static_cast<std::size_t>(c)).origin == Origin::source) {
                    touched.insert(c);
                }
            }
            r.depends.push_back(std::move(dep));
        }
        r.source_sets_per_detector[d.name] = static_cast<int>(touched.size());
    }
    return r;
}

inline nlohmann::json to_json(const DependencyReport &r) {
    nlohmann::json matrix = nlohmann::json::array();
    for (const auto &row : r.depends) {
        std::string s;
        for (bool b : row) s += b ? '1' : '0';
        matrix.push_back(s);
    }
    return {{"input_mode_sets", r.input_mode_sets},
            {"output_channels", r.output_channels},
            {"counts_match", r.counts_match},
            {"rows", r.rows},
            {"cols", r.cols},
            {"dependency", matrix},
            {"source_sets_per_detector", r.source_sets_per_detector}};
}

/// Source-count and channel-count claims together: 2^(n+1) source sets,
/// and as many detected channels as input mode sets.
inline bool counting_consistent(const ZpfLedger &l, const DependencyReport &r) {
    return r.counts_match && l.n_zpf_source == (1 << (l.n_dof + 1)) &&
           l.n_max_class == l.n_zpf_source - l.n_idle_channels;
}

}  // namespace hyperbell
