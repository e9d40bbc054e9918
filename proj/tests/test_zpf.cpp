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

#include "hyperbell/zpf.hpp"

using namespace hyperbell;

// Reference vectors published with the Random123 distribution.
TEST(philox, known_answers) {
    using A4 = std::array<std::uint32_t, 4>;
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(zpf_amplitude, frozen_values) {
    // Regression values; any change here changes every Monte-Carlo artifact.
    const cplx z0 = zpf_amplitude(0, 0, 0);
    const cplx z1 = zpf_amplitude(7, 12345, 3);
    EXPECT_DOUBLE_EQ(z0.real(), -0.81248172043552003);
    EXPECT_DOUBLE_EQ(z0.imag(), -0.63417460127347391);
    EXPECT_DOUBLE_EQ(z1.real(), -0.56701298275859813);
    EXPECT_DOUBLE_EQ(z1.imag(), 0.67481110298669122);
}

TEST(zpf_amplitude, deterministic_in_its_key) {
    EXPECT_EQ(zpf_amplitude(42, 9, 2), zpf_amplitude(42, 9, 2));
    EXPECT_NE(zpf_amplitude(42, 9, 2), zpf_amplitude(43, 9, 2));
    EXPECT_NE(zpf_amplitude(42, 9, 2), zpf_amplitude(42, 10, 2));
    EXPECT_NE(zpf_amplitude(42, 9, 2), zpf_amplitude(42, 9, 3));
    // High words of the 64-bit indices reach the counter.
    EXPECT_NE(zpf_amplitude(42, 1, 0), zpf_amplitude(42, 1 + (std::uint64_t{1} << 32), 0));
    EXPECT_NE(zpf_amplitude(1, 1, 0), zpf_amplitude(1 + (std::uint64_t{1} << 32), 1, 0));
}

TEST(zpf_sampler, vacuum_moments) {
    constexpr int kN = 1000000;
    double intensity = 0.0, re2 = 0.0, im2 = 0.0;
    cplx pair{0.0, 0.0}, cross{0.0, 0.0}, cross_pair{0.0, 0.0};
    for (int k = 0; k < kN; ++k) {
        const cplx a = zpf_amplitude(11, k, 0);
        const cplx b = zpf_amplitude(11, k, 1);
        intensity += std::norm(a);
        re2 += a.real() * a.real();
        im2 += a.imag() * a.imag();
        pair += a * a;
        cross += a * std::conj(b);
        cross_pair += a * b;
    }
    const double root_n = std::sqrt(static_cast<double>(kN));
    // Standard deviations of the single-sample estimators: |a|^2 ~ Exp(1/2)
    // has sd 1/2; a a and a b* have E|.|^2 = 1/2 and 1/4.
    EXPECT_NEAR(intensity / kN, 0.5, 5 * 0.5 / root_n);
    EXPECT_NEAR(re2 / kN, 0.25, 5 * 0.25 * std::sqrt(2.0) / root_n);
    EXPECT_NEAR(im2 / kN, 0.25, 5 * 0.25 * std::sqrt(2.0) / root_n);
    EXPECT_LT(std::abs(pair / static_cast<double>(kN)), 5 * std::sqrt(0.5) / root_n);
    EXPECT_LT(std::abs(cross / static_cast<double>(kN)), 5 * 0.5 / root_n);
    EXPECT_LT(std::abs(cross_pair / static_cast<double>(kN)), 5 * 0.5 / root_n);
}

TEST(zpf_sampler, sample_matches_per_mode_draws) {
    const ModeBasis basis = source_basis();
    for (std::uint64_t idx : {0ull, 1ull, 99999ull}) {
        const ZpfSample s = sample_zpf(basis, 5, idx);
        ASSERT_EQ(s.amplitudes.size(), 8);
        for (std::size_t m = 0; m < basis.size(); ++m) {
            EXPECT_EQ(s.amplitudes[static_cast<Eigen::Index>(m)], zpf_amplitude(5, idx, m));
        }
    }
}

TEST(second_moment, vacuum_examples) {
    const ModeBasis basis = source_basis();
    const ModeId a1h{Path::a1, 0, Pol::H};
    const ModeId b1v{Path::b1, 0, Pol::V};
    EXPECT_EQ(second_moment(basis, a1h, a1h, true), cplx(0.5, 0.0));
    EXPECT_EQ(second_moment(basis, a1h, b1v, true), cplx(0.0, 0.0));
    EXPECT_EQ(second_moment(basis, a1h, a1h, false), cplx(0.0, 0.0));
    EXPECT_THROW(second_moment(basis, a1h, ModeId{Path::idle, 3, Pol::H}, true), basis_error);
}

TEST(mode_basis, source_order_and_provenance) {
    const ModeBasis basis = source_basis();
    const char *names[] = {"a1H", "a1V", "b1H", "b1V", "a2H", "a2V", "b2H", "b2V"};
    ASSERT_EQ(basis.size(), 8u);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(basis[i].name(), names[i]);
        EXPECT_EQ(basis.provenance(i).origin, Origin::source);
    }
    EXPECT_EQ(basis.provenance(0).side, Side::left);
    EXPECT_EQ(basis.provenance(7).side, Side::right);
    EXPECT_EQ(basis.idle_count(), 0);
}

TEST(mode_basis, rejects_duplicates) {
    ModeBasis basis = source_basis();
    EXPECT_THROW(basis.add({Path::a1, 0, Pol::H}), std::invalid_argument);
    basis.add({Path::idle, 0, Pol::H});
    EXPECT_THROW(basis.add({Path::idle, 0, Pol::H}), std::invalid_argument);
    EXPECT_NO_THROW(basis.add({Path::idle, 1, Pol::H}));
    EXPECT_EQ(basis.idle_count(), 2);
}
