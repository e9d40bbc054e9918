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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "hyperbell/bsm_experiments.hpp"
#include "hyperbell/detection.hpp"

using namespace hyperbell;

namespace {

Network bare_source(const CouplingParams &c) {
    const Source s = baseline_source(c);
    Network net(s.basis, s.map);
    net.add_detector("a1", Side::left);
    net.add_detector("b1", Side::left);
    net.add_detector("a2", Side::right);
    net.add_detector("b2", Side::right);
    return net;
}

}  // namespace

TEST(analytic, zero_coupling_gives_zero_rates) {
    const CoincidenceTable t = analytic_joint(build_network(hyperbell::Setup::polarization_bsm, {{0.0, 0.0}}, {}));
    for (const auto &e : t.joint) EXPECT_EQ(e.p, 0.0);
    for (const auto &s : t.singles) EXPECT_EQ(s.p, 0.0);
}

TEST(analytic, bare_source_rates) {
    const CoincidenceTable t = analytic_joint(bare_source({{0.1, 0.0}}));
    // Each beam carries two polarization channels with |C|^2 / 2 each.
    for (const auto &s : t.singles) EXPECT_NEAR(s.p, 0.01, 1e-17);
    // a1 pairs with b2 on both polarizations: 2 |C|^2.
    EXPECT_NEAR(t.p("a1", "b2"), 0.02, 1e-17);
    EXPECT_NEAR(t.p("b1", "a2"), 0.02, 1e-17);
    EXPECT_EQ(t.p("a1", "a2"), 0.0);
    EXPECT_EQ(t.p("a1", "b1"), 0.0);
}

TEST(analytic, frozen_pol_bsm_values) {
    const CoincidenceTable t = analytic_joint(build_network(hyperbell::Setup::polarization_bsm, {{0.1, 0.0}}, {}));
    EXPECT_NEAR(t.p("A1+", "A2+"), 0.01, 1e-15);
    EXPECT_NEAR(t.p("B1-", "B2-"), 0.01, 1e-15);
    EXPECT_LT(t.p("A1+", "A2-"), 1e-30);
    for (const auto &s : t.singles) EXPECT_NEAR(s.p, 0.005, 1e-15);
}

TEST(analytic, gains_scale_rates) {
    const Network net = build_network(hyperbell::Setup::momentum_bsm, {}, parse_state("Psi+:psi+"));
    DetectorGains g;
    g.k = {{"A1H", 0.5}, {"A2H", 0.8}};
    const CoincidenceTable plain = analytic_joint(net);
    const CoincidenceTable scaled = analytic_joint(net, g);
    EXPECT_NEAR(scaled.p("A1H", "A2H"), 0.4 * plain.p("A1H", "A2H"), 1e-16);
    EXPECT_NEAR(scaled.p("A1V", "A2V"), plain.p("A1V", "A2V"), 1e-16);
    EXPECT_NEAR(scaled.singles[0].p, 0.5 * plain.singles[0].p, 1e-16);
    g.k["B1V"] = 0.0;
    EXPECT_THROW(analytic_joint(net, g), config_error);
}

TEST(analytic, normalized_sums_to_one) {
    for (hyperbell::Setup s : {hyperbell::Setup::polarization_bsm, hyperbell::Setup::momentum_bsm}) {
        for (const auto &params : all_hyperbell_states()) {
            const CoincidenceTable n = normalized(analytic_joint(build_network(s, {}, params)));
            EXPECT_NEAR(n.cross_side_total(), 1.0, 1e-12);
            EXPECT_EQ(n.joint.size(), 16u);
        }
    }
    EXPECT_THROW(normalized(analytic_joint(build_network(hyperbell::Setup::polarization_bsm, {{0.0, 0.0}}, {}))),
                 std::domain_error);
}

TEST(analytic, no_first_order_cross_side_interference) {
    for (hyperbell::Setup s : {hyperbell::Setup::polarization_bsm, hyperbell::Setup::momentum_bsm}) {
        for (const auto &params : all_hyperbell_states()) {
            EXPECT_LT(max_cross_side_intensity_moment(build_network(s, {}, params)), 1e-14) << params.label();
        }
    }
}

TEST(analytic, singles_independent_of_settings) {
    for (hyperbell::Setup s : {hyperbell::Setup::polarization_bsm, hyperbell::Setup::momentum_bsm}) {
        const double ref = analytic_singles(build_network(s, {}, {})).front().p;
        for (const auto &params : all_hyperbell_states()) {
            for (const auto &e : analytic_singles(build_network(s, {}, params))) {
                EXPECT_NEAR(e.p, ref, 1e-12);
            }
        }
    }
}

TEST(analytic, requires_detectors) {
    const Source s = baseline_source({});
    const Network net(s.basis, s.map);
    EXPECT_THROW(analytic_joint(net), config_error);
}

TEST(montecarlo, agrees_with_analytic_within_five_sigma) {
    const Network net = build_network(hyperbell::Setup::momentum_bsm, {}, parse_state("Psi+:psi-"));
    const CoincidenceTable mc = mc_joint(net, {}, 40000, 3);
    const CoincidenceTable an = analytic_joint(net);
    const CoincidenceTable exact = gaussian_joint(net);
    for (std::size_t k = 0; k < mc.joint.size(); ++k) {
        const double se = *mc.joint[k].stderr_;
        EXPECT_LT(std::abs(mc.joint[k].p - an.joint[k].p), 5 * se) << mc.joint[k].first << mc.joint[k].second;
        EXPECT_LT(std::abs(mc.joint[k].p - exact.joint[k].p), 5 * se);
    }
    for (std::size_t k = 0; k < mc.singles.size(); ++k) {
        EXPECT_LT(std::abs(mc.singles[k].p - an.singles[k].p), 5 * *mc.singles[k].stderr_);
    }
}

TEST(montecarlo, zero_coupling_is_consistent_with_zero) {
    const Network net = build_network(hyperbell::Setup::polarization_bsm, {{0.0, 0.0}}, {});
    const CoincidenceTable mc = mc_joint(net, {}, 20000, 9);
    for (const auto &e : mc.joint) EXPECT_LT(std::abs(e.p), 5 * *e.stderr_);
}

TEST(montecarlo, gaussian_expectation_differs_only_at_higher_order) {
    const Network net = build_network(hyperbell::Setup::polarization_bsm, {}, {});
    const CoincidenceTable an = analytic_joint(net);
    const CoincidenceTable ex = gaussian_joint(net);
    for (std::size_t k = 0; k < an.joint.size(); ++k) {
        EXPECT_GE(ex.joint[k].p, an.joint[k].p);
        EXPECT_LT(ex.joint[k].p - an.joint[k].p, 1e-3 * 0.01 + 1e-4);
    }
}

TEST(montecarlo, bit_identical_across_workers_and_shards) {
    const Network net = build_network(hyperbell::Setup::polarization_bsm, {}, parse_state("Phi+:psi+"));
    const CoincidenceTable one = mc_joint(net, {}, 3001, 21, 1);
    const CoincidenceTable three = mc_joint(net, {}, 3001, 21, 3);
    McAccumulator manual(net.detectors().size());
    manual.merge(mc_accumulate(net, 21, 2000, 3001));
    manual.merge(mc_accumulate(net, 21, 0, 17));
    manual.merge(mc_accumulate(net, 21, 17, 2000));
    const CoincidenceTable shards = mc_finalize(net, manual);
    for (std::size_t k = 0; k < one.joint.size(); ++k) {
        EXPECT_EQ(one.joint[k].p, three.joint[k].p);
        EXPECT_EQ(one.joint[k].stderr_, three.joint[k].stderr_);
        EXPECT_EQ(one.joint[k].p, shards.joint[k].p);
    }
    EXPECT_EQ(to_csv(one), to_csv(three));
}

TEST(montecarlo, seed_changes_the_draws) {
    const Network net = build_network(hyperbell::Setup::polarization_bsm, {}, {});
    EXPECT_NE(to_csv(mc_joint(net, {}, 500, 1)), to_csv(mc_joint(net, {}, 500, 2)));
}

TEST(montecarlo, rejects_zero_samples) {
    const Network net = build_network(hyperbell::Setup::polarization_bsm, {}, {});
    EXPECT_THROW(mc_joint(net, {}, 0, 1), config_error);
}

TEST(exact_sum, order_independent) {
    ExactSum a, b, c;
    const double xs[] = {1e-3, -7.25, 3.0e2, 1.0 / 3.0, -1e-9};
    for (double x : xs) a.add(x);
    for (int i = 4; i >= 0; --i) b.add(xs[i]);
    c.add(xs[0]);
    ExactSum rest;
    for (int i = 1; i < 5; ++i) rest.add(xs[i]);
    c.merge(rest);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    EXPECT_NEAR(a.value(), 1e-3 - 7.25 + 3.0e2 + 1.0 / 3.0 - 1e-9, 1e-11);
}

TEST(export, csv_and_json_carry_the_same_numbers) {
    const Network net = build_network(hyperbell::Setup::momentum_bsm, {}, parse_state("Psi+:phi+"));
    for (const CoincidenceTable &t : {analytic_joint(net), mc_joint(net, {}, 2000, 4)}) {
        const auto j = to_json(t);
        std::istringstream csv(to_csv(t));
        std::string line;
        std::getline(csv, line);
        EXPECT_EQ(line, "detector_i,detector_j,p,stderr");
        int rows = 0;
        while (std::getline(csv, line)) {
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) f.push_back(cell);
            if (f.size() == 3) f.emplace_back();
            ASSERT_EQ(f.size(), 4u) << line;
            if (f[1].empty()) {
                EXPECT_EQ(std::stod(f[2]), j["singles"][f[0]].get<double>());
            } else {
                EXPECT_EQ(std::stod(f[2]), j["joint"][f[0]][f[1]].get<double>());
                if (t.has_stderr()) EXPECT_EQ(std::stod(f[3]), j["joint_stderr"][f[0]][f[1]].get<double>());
                else EXPECT_TRUE(f[3].empty());
            }
            ++rows;
        }
        EXPECT_EQ(rows, 28 + 8);
    }
}
