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

// Brute-force two-photon calculator in the Fock basis. Each photon occupies
// one of four single-photon modes (path a/b x polarization H/V); the
// analyzers act on mode operators by fixed 4x4 matrices per side. This file
// deliberately uses no field-map or network code.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "hyperbell/states.hpp"

namespace hyperbell::oracle {

using amp = std::complex<double>;
using Mat4 = std::array<std::array<amp, 4>, 4>;

// Single-photon mode index: path * 2 + polarization, path a = 0, b = 1.
inline constexpr int kAH = 0, kAV = 1, kBH = 2, kBV = 3;

/// Amplitudes psi[m1][m2] over |m1>_1 |m2>_2, 16 entries.
struct TwoPhotonState {
    std::array<std::array<amp, 4>, 4> psi{};

    double norm() const {
        double s = 0.0;
        for (const auto &row : psi) {
            for (auto a : row) s += std::norm(a);
        }
        return std::sqrt(s);
    }
};

/// |Pi> (x) |eta> for the Bell states selected by the parameters.
inline TwoPhotonState make_state(const HyperBellParams &params) {
    const double h = 1.0 / std::numbers::sqrt2;
    // pol[l1][l2], l = 0 (H) or 1 (V)
    amp pol[2][2] = {};
    switch (params.pol()) {
        case PolBell::Psi_plus: pol[0][1] = h; pol[1][0] = h; break;
        case PolBell::Psi_minus: pol[0][1] = h; pol[1][0] = -h; break;
        case PolBell::Phi_plus: pol[0][0] = h; pol[1][1] = h; break;
        case PolBell::Phi_minus: pol[0][0] = h; pol[1][1] = -h; break;
    }
    // mom[p1][p2], p = 0 (a) or 1 (b)
    amp mom[2][2] = {};
    switch (params.mom()) {
        case MomBell::psi_plus: mom[0][1] = h; mom[1][0] = h; break;
        case MomBell::psi_minus: mom[0][1] = h; mom[1][0] = -h; break;
        case MomBell::phi_plus: mom[0][0] = h; mom[1][1] = h; break;
        case MomBell::phi_minus: mom[0][0] = h; mom[1][1] = -h; break;
    }
    TwoPhotonState s;
    for (int p1 = 0; p1 < 2; ++p1)
        for (int l1 = 0; l1 < 2; ++l1)
            for (int p2 = 0; p2 < 2; ++p2)
                for (int l2 = 0; l2 < 2; ++l2)
                    s.psi[p1 * 2 + l1][p2 * 2 + l2] = pol[l1][l2] * mom[p1][p2];
    return s;
}

namespace detail {

inline Mat4 mul(const Mat4 &x, const Mat4 &y) {
    Mat4 z{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) z[i][j] += x[i][k] * y[k][j];
    return z;
}

// Annihilation operators transform as a_out[r] = sum_c U[r][c] a_in[c].
// Reflections pick up a factor i.

inline Mat4 cnot_pbs() {
    const amp i{0.0, 1.0};
    Mat4 u{};
    u[kAH][kAH] = i;    // H reflected, stays in its path
    u[kAV][kBV] = 1.0;  // V transmitted, changes path
    u[kBH][kBH] = i;
    u[kBV][kAV] = 1.0;
    return u;
}

// Rows: A+, A-, B+, B-. HWP then PBS projecting on +-45 degrees.
inline Mat4 diagonal_analyzers() {
    const amp i{0.0, 1.0};
    const double h = 1.0 / std::numbers::sqrt2;
    Mat4 u{};
    u[0][kAH] = i * h; u[0][kAV] = i * h;
    u[1][kAH] = h;     u[1][kAV] = -h;
    u[2][kBH] = i * h; u[2][kBV] = i * h;
    u[3][kBH] = h;     u[3][kBV] = -h;
    return u;
}

inline Mat4 hwp_on_b() {
    Mat4 u{};
    u[kAH][kAH] = 1.0;
    u[kAV][kAV] = 1.0;
    u[kBH][kBV] = 1.0;
    u[kBV][kBH] = 1.0;
    return u;
}

// Output A = (i a + b)/sqrt2, B = (a + i b)/sqrt2, per polarization.
inline Mat4 balanced_bs() {
    const amp i{0.0, 1.0};
    const double h = 1.0 / std::numbers::sqrt2;
    Mat4 u{};
    for (int l = 0; l < 2; ++l) {
        u[kAH + l][kAH + l] = i * h;
        u[kAH + l][kBH + l] = h;
        u[kBH + l][kAH + l] = h;
        u[kBH + l][kBH + l] = i * h;
    }
    return u;
}

// Rows: AH, AV, BH, BV. PBS reflects H (factor i) to the H detector.
inline Mat4 hv_analyzers() {
    const amp i{0.0, 1.0};
    Mat4 u{};
    u[0][kAH] = i;
    u[1][kAV] = 1.0;
    u[2][kBH] = i;
    u[3][kBV] = 1.0;
    return u;
}

}  // namespace detail

/// Mode-to-detector matrix for one side of the apparatus (both sides are
/// identical in both setups).
inline Mat4 side_matrix(Setup setup) {
    using namespace detail;
    if (setup == Setup::polarization_bsm) {
        return mul(diagonal_analyzers(), cnot_pbs());
    }
    return mul(hv_analyzers(), mul(balanced_bs(), hwp_on_b()));
}

/// Block-diagonal single-photon matrix over both sides, 8 x 8.
inline std::array<std::array<amp, 8>, 8> setup_matrix(Setup setup) {
    const Mat4 u = side_matrix(setup);
    std::array<std::array<amp, 8>, 8> m{};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            m[r][c] = u[r][c];
            m[4 + r][4 + c] = u[r][c];
        }
    }
    return m;
}

inline std::array<std::string, 4> detector_names(Setup setup, int photon) {
    const std::string n = std::to_string(photon);
    if (setup == Setup::polarization_bsm) {
        return {"A" + n + "+", "A" + n + "-", "B" + n + "+", "B" + n + "-"};
    }
    return {"A" + n + "H", "A" + n + "V", "B" + n + "H", "B" + n + "V"};
}

struct Coincidence {
    std::string first;   // photon-1 detector
    std::string second;  // photon-2 detector
    double p = 0.0;
};

/// Normalized distribution over the 16 cross-side detector pairs:
/// amplitude(X, Y) = sum_{m,n} U[X][m] psi[m][n] U[Y][n].
inline std::vector<Coincidence> oracle_coincidences(const TwoPhotonState &state, Setup setup) {
    const Mat4 u = side_matrix(setup);
    const auto left = detector_names(setup, 1);
    const auto right = detector_names(setup, 2);
    std::vector<Coincidence> out;
    double total = 0.0;
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
            amp a = 0.0;
            for (int m = 0; m < 4; ++m)
                for (int n = 0; n < 4; ++n) a += u[x][m] * state.psi[m][n] * u[y][n];
            out.push_back({left[x], right[y], std::norm(a)});
            total += std::norm(a);
        }
    }
    for (auto &c : out) c.p /= total;
    return out;
}

}  // namespace hyperbell::oracle
