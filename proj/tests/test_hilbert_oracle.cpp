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

#include <gtest/gtest.h>

#include "hyperbell/hilbert_oracle.hpp"

using namespace hyperbell;
using namespace hyperbell::oracle;

TEST(make_state, normalized_for_every_label) {
    for (const auto &p : all_hyperbell_states()) {
        EXPECT_NEAR(make_state(p).norm(), 1.0, 1e-15) << p.label();
    }
}

TEST(make_state, psi_plus_psi_plus_amplitudes) {
    const TwoPhotonState s = make_state(parse_state("Psi+:psi+"));
    // (|HV> + |VH>)(|ab> + |ba>) / 2
    EXPECT_NEAR(s.psi[kAH][kBV].real(), 0.5, 1e-15);
    EXPECT_NEAR(s.psi[kAV][kBH].real(), 0.5, 1e-15);
    EXPECT_NEAR(s.psi[kBH][kAV].real(), 0.5, 1e-15);
    EXPECT_NEAR(s.psi[kBV][kAH].real(), 0.5, 1e-15);
    EXPECT_EQ(s.psi[kAH][kAV], amp(0.0));
    EXPECT_EQ(s.psi[kAH][kBH], amp(0.0));
}

TEST(make_state, minus_signs) {
    const TwoPhotonState s = make_state(parse_state("Phi-:phi-"));
    // (|HH> - |VV>)(|aa> - |bb>) / 2
    EXPECT_NEAR(s.psi[kAH][kAH].real(), 0.5, 1e-15);
    EXPECT_NEAR(s.psi[kAV][kAV].real(), -0.5, 1e-15);
    EXPECT_NEAR(s.psi[kBH][kBH].real(), -0.5, 1e-15);
    EXPECT_NEAR(s.psi[kBV][kBV].real(), 0.5, 1e-15);
}

TEST(side_matrix, unitary_in_both_setups) {
    for (hyperbell::Setup setup : {hyperbell::Setup::polarization_bsm, hyperbell::Setup::momentum_bsm}) {
        const auto m = setup_matrix(setup);
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) {
                amp dot = 0.0;
                for (int k = 0; k < 8; ++k) dot += std::conj(m[k][r]) * m[k][c];
                EXPECT_NEAR(std::abs(dot - amp(r == c ? 1.0 : 0.0)), 0.0, 1e-15);
            }
        }
    }
}

TEST(coincidences, normalized_distribution) {
    for (hyperbell::Setup setup : {hyperbell::Setup::polarization_bsm, hyperbell::Setup::momentum_bsm}) {
        for (const auto &p : all_hyperbell_states()) {
            const auto dist = oracle_coincidences(make_state(p), setup);
            ASSERT_EQ(dist.size(), 16u);
            double total = 0.0;
            for (const auto &c : dist) total += c.p;
            EXPECT_NEAR(total, 1.0, 1e-14);
        }
    }
}

TEST(coincidences, psi_plus_quartet) {
    const auto dist = oracle_coincidences(make_state(parse_state("Psi+:psi+")), hyperbell::Setup::polarization_bsm);
    for (const auto &c : dist) {
        const bool in_quartet = (c.first == "A1+" && c.second == "A2+") || (c.first == "A1-" && c.second == "A2-") ||
                                (c.first == "B1+" && c.second == "B2+") || (c.first == "B1-" && c.second == "B2-");
        EXPECT_NEAR(c.p, in_quartet ? 0.25 : 0.0, 1e-15) << c.first << c.second;
    }
}

TEST(detector_names, per_setup) {
    EXPECT_EQ(detector_names(hyperbell::Setup::polarization_bsm, 2)[1], "A2-");
    EXPECT_EQ(detector_names(hyperbell::Setup::momentum_bsm, 1)[3], "B1V");
}
