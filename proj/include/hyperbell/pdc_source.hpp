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

// Two-crystal type-I down-conversion source. Each of the four output beams
// is a vacuum amplitude plus C times the conjugate amplitude of its partner
// beam, one representative mode per mode set.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperbell/linear_network.hpp"
#include "hyperbell/states.hpp"
#include "hyperbell/zpf.hpp"

namespace hyperbell {

/// Effective coupling C = (g V / 2) nu(0) in simulation units.
struct CouplingParams {
    cplx C{0.1, 0.0};

    static constexpr double kWeakCouplingLimit = 0.2;

    void validate() const {
        if (!std::isfinite(C.real()) || !std::isfinite(C.imag())) {
            throw parameter_error("coupling must be finite");
        }
    }

    /// Set when |C| leaves the regime where first-order truncation holds.
    std::optional<std::string> warning() const {
        if (std::abs(C) > kWeakCouplingLimit) {
            return "coupling |C| = " + std::to_string(std::abs(C)) + " exceeds the weak-coupling limit " +
                   std::to_string(kWeakCouplingLimit);
        }
        return std::nullopt;
    }
};

/// Basis plus the map from its modes to the source's output beams.
struct Source {
    ModeBasis basis;
    FieldMap map;
};

namespace detail {

// Rows of the eight source amplitudes, indexed in source_basis() order.
struct SourceRows {
    CMatrix A;
    CMatrix B;
};

inline constexpr int kA1H = 0, kA1V = 1, kB1H = 2, kB1V = 3, kA2H = 4, kA2V = 5, kB2H = 6, kB2V = 7;

// F_p, F_s, F_q, F_r, F'_p, F'_s, F'_q, F'_r as rows 0..7.
inline SourceRows pdc_amplitudes(cplx C) {
    SourceRows r{CMatrix::Zero(8, 8), CMatrix::Zero(8, 8)};
    const std::array<std::array<int, 2>, 8> pairs{{
        {kA1H, kB2H},  // F_p
        {kA1V, kB2V},  // F_s
        {kB2H, kA1H},  // F_q
        {kB2V, kA1V},  // F_r
        {kB1H, kA2H},  // F'_p
        {kB1V, kA2V},  // F'_s
        {kA2H, kB1H},  // F'_q
        {kA2V, kB1V},  // F'_r
    }};
    for (int k = 0; k < 8; ++k) {
        r.A(k, pairs[static_cast<std::size_t>(k)][0]) = 1.0;
        r.B(k, pairs[static_cast<std::size_t>(k)][1]) = C;
    }
    return r;
}

inline constexpr int kFp = 0, kFs = 1, kFq = 2, kFr = 3, kFpp = 4, kFsp = 5, kFqp = 6, kFrp = 7;

inline std::vector<Channel> source_inputs(const ModeBasis &basis) {
    std::vector<Channel> in;
    for (const auto &m : basis.modes()) {
        in.push_back({m.port(), m.pol});
    }
    return in;
}

inline std::vector<Channel> beam_channels(std::initializer_list<const char *> ports) {
    std::vector<Channel> out;
    for (const char *p : ports) {
        for (Pol pol : kPols) {
            out.push_back({p, pol});
        }
    }
    return out;
}

}  // namespace detail

/// Output channels of the two-photon source, in order.
inline std::vector<Channel> source_outputs() { return detail::beam_channels({"a1", "b1", "a2", "b2"}); }

/// Unmodified crystal output: beam a1 = (F_p, F_s), b2 = (F_q, F_r),
/// b1 = (F'_p, F'_s), a2 = (F'_q, F'_r).
inline Source baseline_source(const CouplingParams &coupling) {
    coupling.validate();
    using namespace detail;
    const auto f = pdc_amplitudes(coupling.C);
    Source s{source_basis(), {}};
    s.map.inputs = source_inputs(s.basis);
    s.map.outputs = source_outputs();
    // a1, b1, a2, b2 each as (H, V).
    const std::array<int, 8> rows{kFp, kFs, kFpp, kFsp, kFqp, kFrp, kFq, kFr};
    s.map.A.resize(8, 8);
    s.map.B.resize(8, 8);
    for (int k = 0; k < 8; ++k) {
        s.map.A.row(k) = f.A.row(rows[static_cast<std::size_t>(k)]);
        s.map.B.row(k) = f.B.row(rows[static_cast<std::size_t>(k)]);
    }
    return s;
}

/// Photon-1 beams after the local rotator, retarder, phases and path
/// assignment; photon-2 beams unchanged. Built directly from the closed-form
/// amplitudes rather than by composing devices.
inline Source hyperbell_source(const CouplingParams &coupling, const HyperBellParams &params) {
    params.validate();
    coupling.validate();
    using namespace detail;
    const auto f = pdc_amplitudes(coupling.C);
    const double c = std::cos(params.beta);
    const double s = std::sin(params.beta);
    const cplx ek = std::polar(1.0, params.kappa);

    // (H, V) of the beam that originated at a1 (unprimed) or b1 (primed).
    auto photon1 = [&](int p, int sv, double phi, const CMatrix &M) {
        const cplx e = std::polar(1.0, phi);
        CMatrix out(2, 8);
        out.row(0) = e * (c * M.row(sv) - s * M.row(p));
        out.row(1) = e * ek * (s * M.row(sv) + c * M.row(p));
        return out;
    };

    Source src{source_basis(), {}};
    src.map.inputs = source_inputs(src.basis);
    src.map.outputs = source_outputs();
    src.map.A = CMatrix::Zero(8, 8);
    src.map.B = CMatrix::Zero(8, 8);
    const bool swap = params.xy == PathOrder::ba;
    const int x_row = swap ? 2 : 0;  // rows of port x1 within a1,b1
    const int y_row = swap ? 0 : 2;
    src.map.A.middleRows(x_row, 2) = photon1(kFp, kFs, params.phi1, f.A);
    src.map.B.middleRows(x_row, 2) = photon1(kFp, kFs, params.phi1, f.B);
    src.map.A.middleRows(y_row, 2) = photon1(kFpp, kFsp, params.phi2, f.A);
    src.map.B.middleRows(y_row, 2) = photon1(kFpp, kFsp, params.phi2, f.B);
    const std::array<int, 4> photon2{kFqp, kFrp, kFq, kFr};  // a2 H/V, b2 H/V
    for (int k = 0; k < 4; ++k) {
        src.map.A.row(4 + k) = f.A.row(photon2[static_cast<std::size_t>(k)]);
        src.map.B.row(4 + k) = f.B.row(photon2[static_cast<std::size_t>(k)]);
    }
    return src;
}

/// Device chain on photon 1 realizing the parameters: rotator(beta) and
/// retarder(kappa) on both beams, phi1 on the a1 beam, phi2 on the b1 beam,
/// then the (x, y) port assignment.
inline std::vector<Device> local_device_chain(const HyperBellParams &params) {
    std::vector<Device> chain;
    for (const char *port : {"a1", "b1"}) {
        chain.push_back(make_device(DeviceKind::pol_rotator, {port}, {port}, params.beta, Side::left,
                                    std::string("rotator_") + port));
        chain.push_back(make_device(DeviceKind::wave_retarder, {port}, {port}, params.kappa, Side::left,
                                    std::string("retarder_") + port));
    }
    chain.push_back(make_device(DeviceKind::phase_shift, {"a1"}, {"a1"}, params.phi1, Side::left, "phase_a1"));
    chain.push_back(make_device(DeviceKind::phase_shift, {"b1"}, {"b1"}, params.phi2, Side::left, "phase_b1"));
    if (params.xy == PathOrder::ba) {
        chain.push_back(make_device(DeviceKind::relabel, {"a1", "b1"}, {"b1", "a1"}, 0.0, Side::left, "path_swap"));
    }
    return chain;
}

/// Reorders output rows to `order` (which must be a permutation of them).
inline FieldMap with_output_order(const FieldMap &m, const std::vector<Channel> &order) {
    return compose(m, FieldMap::identity(order));
}

/// The local chain as one map over the eight source output channels.
inline FieldMap local_devices(const HyperBellParams &params) {
    Network net(source_basis(), FieldMap::identity(source_outputs()));
    for (const auto &d : local_device_chain(params)) {
        net.apply(d);
    }
    return with_output_order(net.map(), source_outputs());
}

/// Polarization-only pair (n = 1): beams a1 and b2 and their four mode sets.
inline Source single_dof_source(const CouplingParams &coupling) {
    coupling.validate();
    Source s;
    for (Path p : {Path::a1, Path::b2}) {
        for (Pol pol : kPols) {
            s.basis.add({p, 0, pol}, {Origin::source, side_of(p), -1, "source"});
        }
    }
    s.map.inputs = detail::source_inputs(s.basis);
    s.map.outputs = detail::beam_channels({"a1", "b2"});
    s.map.A = CMatrix::Identity(4, 4);
    s.map.B = CMatrix::Zero(4, 4);
    // a1H <-> b2H, a1V <-> b2V
    s.map.B(0, 2) = coupling.C;
    s.map.B(1, 3) = coupling.C;
    s.map.B(2, 0) = coupling.C;
    s.map.B(3, 1) = coupling.C;
    return s;
}

}  // namespace hyperbell
