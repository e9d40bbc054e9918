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

// Linear (Bogoliubov) field maps d = A z + B z*, the optical devices that
// generate them, and a builder that closes a device chain into one map.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hyperbell/zpf.hpp"

namespace hyperbell {

class wiring_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One polarization channel of a named beam (port).
struct Channel {
    std::string port;
    Pol pol = Pol::H;

    std::string name() const { return port + pol_name(pol); }
    friend bool operator==(const Channel &, const Channel &) = default;
};

inline std::vector<Channel> port_channels(const std::string &port) {
    return {{port, Pol::H}, {port, Pol::V}};
}

/// Linear map from input amplitudes z (and z*) to output amplitudes:
/// d = A z + B z*. Rows of A and B follow `outputs`, columns follow `inputs`.
struct FieldMap {
    std::vector<Channel> inputs;
    std::vector<Channel> outputs;
    CMatrix A;
    CMatrix B;

    static FieldMap identity(std::vector<Channel> channels) {
        const auto n = static_cast<Eigen::Index>(channels.size());
        FieldMap m;
        m.inputs = channels;
        m.outputs = std::move(channels);
        m.A = CMatrix::Identity(n, n);
        m.B = CMatrix::Zero(n, n);
        return m;
    }

    Eigen::Index rows() const { return A.rows(); }
    Eigen::Index cols() const { return A.cols(); }

    bool is_passive(double tol = 0.0) const { return B.cwiseAbs().maxCoeff() <= tol; }

    CVector evaluate(const CVector &z) const { return A * z + B * z.conjugate(); }

    std::optional<Eigen::Index> output_index(const Channel &c) const {
        for (std::size_t r = 0; r < outputs.size(); ++r) {
            if (outputs[r] == c) {
                return static_cast<Eigen::Index>(r);
            }
        }
        return std::nullopt;
    }
};

/// Returns second(first(z)). The conjugate channel mixes in through
/// A = A2 A1 + B2 B1*, B = A2 B1 + B2 A1*.
inline FieldMap compose(const FieldMap &first, const FieldMap &second) {
    if (second.inputs.size() != first.outputs.size()) {
        throw wiring_error("compose: " + std::to_string(second.inputs.size()) + " inputs cannot consume " +
                           std::to_string(first.outputs.size()) + " outputs");
    }
    // Route first's outputs into the order second expects.
    CMatrix A1(static_cast<Eigen::Index>(second.inputs.size()), first.cols());
    CMatrix B1(A1.rows(), first.cols());
    std::vector<bool> used(first.outputs.size(), false);
    for (std::size_t k = 0; k < second.inputs.size(); ++k) {
        auto r = first.output_index(second.inputs[k]);
        if (!r || used[static_cast<std::size_t>(*r)]) {
            throw wiring_error("compose: input " + second.inputs[k].name() + " is not wired to an output");
        }
        used[static_cast<std::size_t>(*r)] = true;
        A1.row(static_cast<Eigen::Index>(k)) = first.A.row(*r);
        B1.row(static_cast<Eigen::Index>(k)) = first.B.row(*r);
    }
    FieldMap out;
    out.inputs = first.inputs;
    out.outputs = second.outputs;
    out.A = second.A * A1 + second.B * B1.conjugate();
    out.B = second.A * B1 + second.B * A1.conjugate();
    return out;
}

/// Largest entry of |A^H A - I|; only meaningful for square passive maps.
inline double unitarity_error(const CMatrix &A) {
    const CMatrix g = A.adjoint() * A - CMatrix::Identity(A.cols(), A.cols());
    return g.cwiseAbs().maxCoeff();
}

enum class DeviceKind {
    pbs,            // transmits V, reflects H with factor i
    cnot_pbs,       // pbs whose outputs keep the reflected beam's port name
    hwp45,          // swaps H and V
    hwp22_5,        // H -> (H+V)/sqrt2, V -> (H-V)/sqrt2
    bs50,           // balanced, reflection factor i
    pol_rotator,    // angle = beta
    wave_retarder,  // angle = kappa, acts on V
    phase_shift,    // angle = phi, whole beam
    relabel,        // pure port renaming
};

inline const char *kind_name(DeviceKind k) {
    switch (k) {
        case DeviceKind::pbs: return "pbs";
        case DeviceKind::cnot_pbs: return "cnot_pbs";
        case DeviceKind::hwp45: return "hwp45";
        case DeviceKind::hwp22_5: return "hwp22_5";
        case DeviceKind::bs50: return "bs50";
        case DeviceKind::pol_rotator: return "pol_rotator";
        case DeviceKind::wave_retarder: return "wave_retarder";
        case DeviceKind::phase_shift: return "phase_shift";
        case DeviceKind::relabel: return "relabel";
    }
    return "?";
}

inline DeviceKind kind_from_name(const std::string &s) {
    for (auto k : {DeviceKind::pbs, DeviceKind::cnot_pbs, DeviceKind::hwp45, DeviceKind::hwp22_5, DeviceKind::bs50,
                   DeviceKind::pol_rotator, DeviceKind::wave_retarder, DeviceKind::phase_shift, DeviceKind::relabel}) {
        if (s == kind_name(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown device kind '" + s + "'");
}

inline int port_count(DeviceKind k) {
    switch (k) {
        case DeviceKind::pbs:
        case DeviceKind::cnot_pbs:
        case DeviceKind::bs50:
        case DeviceKind::relabel:
            return 2;
        default:
            return 1;
    }
}

/// A device instance. An empty string in `inputs` is an open port that must
/// receive vacuum through inject_idle() before the device can be applied.
struct Device {
    DeviceKind kind = DeviceKind::hwp45;
    double angle = 0.0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    Side side = Side::left;
    std::string name;
};

inline Device make_device(DeviceKind kind, std::vector<std::string> inputs, std::vector<std::string> outputs,
                          double angle = 0.0, Side side = Side::left, std::string name = {}) {
    return {kind, angle, std::move(inputs), std::move(outputs), side, std::move(name)};
}

/// Single-port devices act on (H, V) of one beam; two-port devices on
/// (in0 H, in0 V, in1 H, in1 V) -> (out0 H, out0 V, out1 H, out1 V).
inline CMatrix device_block(DeviceKind kind, double angle) {
    const double r = 1.0 / std::numbers::sqrt2;
    switch (kind) {
        case DeviceKind::pbs:
        case DeviceKind::cnot_pbs: {
            CMatrix u = CMatrix::Zero(4, 4);
            u(0, 2) = kI;  // out0 H <- in1 H (reflected)
            u(1, 1) = 1.0; // out0 V <- in0 V (transmitted)
            u(2, 0) = kI;  // out1 H <- in0 H (reflected)
            u(3, 3) = 1.0; // out1 V <- in1 V (transmitted)
            return u;
        }
        case DeviceKind::bs50: {
            CMatrix u = CMatrix::Zero(4, 4);
            for (int p = 0; p < 2; ++p) {
                u(p, p) = kI * r;
                u(p, 2 + p) = r;
                u(2 + p, p) = r;
                u(2 + p, 2 + p) = kI * r;
            }
            return u;
        }
        case DeviceKind::relabel:
            return CMatrix::Identity(4, 4);
        case DeviceKind::hwp45: {
            CMatrix u(2, 2);
            u << 0.0, 1.0, 1.0, 0.0;
            return u;
        }
        case DeviceKind::hwp22_5: {
            CMatrix u(2, 2);
            u << r, r, r, -r;
            return u;
        }
        case DeviceKind::pol_rotator: {
            const double c = std::cos(angle);
            const double s = std::sin(angle);
            CMatrix u(2, 2);
            u << -s, c, c, s;
            return u;
        }
        case DeviceKind::wave_retarder: {
            CMatrix u = CMatrix::Identity(2, 2);
            u(1, 1) = std::polar(1.0, angle);
            return u;
        }
        case DeviceKind::phase_shift:
            return std::polar(1.0, angle) * CMatrix::Identity(2, 2);
    }
    throw std::logic_error("unhandled device kind");
}

inline FieldMap device_map(const Device &d) {
    const auto n = static_cast<std::size_t>(port_count(d.kind));
    if (d.inputs.size() != n || d.outputs.size() != n) {
        throw wiring_error(std::string(kind_name(d.kind)) + " '" + d.name + "' needs " + std::to_string(n) +
                           " input and output ports");
    }
    FieldMap m;
    for (std::size_t k = 0; k < n; ++k) {
        if (d.inputs[k].empty()) {
            throw wiring_error(std::string(kind_name(d.kind)) + " '" + d.name + "' has an unwired input port");
        }
        if (d.outputs[k].empty()) {
            throw wiring_error(std::string(kind_name(d.kind)) + " '" + d.name + "' has an unnamed output port");
        }
        for (Pol p : kPols) {
            m.inputs.push_back({d.inputs[k], p});
            m.outputs.push_back({d.outputs[k], p});
        }
    }
    m.A = device_block(d.kind, d.angle);
    m.B = CMatrix::Zero(m.A.rows(), m.A.cols());
    return m;
}

struct Detector {
    std::string name;  // equals the output port it sits on
    Side side = Side::left;
};

struct IdleInjection {
    int index = 0;
    std::string device;
    Side side = Side::left;
    std::vector<ModeId> modes;
};

/// A source map closed under a chain of devices. Every device is composed
/// into a single FieldMap as it is applied; sampling never walks devices.
class Network {
  public:
    Network() = default;

    /// `source` must take exactly the basis modes as inputs.
    Network(ModeBasis basis, FieldMap source) : basis_(std::move(basis)), map_(std::move(source)) {
        if (map_.inputs.size() != basis_.size()) {
            throw wiring_error("source map inputs do not match the mode basis");
        }
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            const Channel expected{basis_[i].port(), basis_[i].pol};
            if (!(map_.inputs[i] == expected)) {
                throw wiring_error("source input " + map_.inputs[i].name() + " out of basis order");
            }
        }
    }

    const ModeBasis &basis() const { return basis_; }
    const FieldMap &map() const { return map_; }
    const std::vector<Detector> &detectors() const { return detectors_; }
    const std::vector<IdleInjection> &injections() const { return injections_; }
    const std::vector<Device> &devices() const { return devices_; }

    /// Appends an (H, V) pair of idle vacuum modes to the basis and wires
    /// them into the device's open input port.
    std::vector<ModeId> inject_idle(Device &device) {
        auto open = std::find(device.inputs.begin(), device.inputs.end(), std::string{});
        if (open == device.inputs.end()) {
            throw wiring_error(std::string(kind_name(device.kind)) + " '" + device.name + "' has no open port");
        }
        const int k = static_cast<int>(injections_.size());
        IdleInjection inj{k, device.name, device.side, {}};
        const auto old_cols = map_.cols();
        const auto old_rows = map_.rows();
        map_.A.conservativeResize(old_rows + 2, old_cols + 2);
        map_.B.conservativeResize(old_rows + 2, old_cols + 2);
        map_.A.rightCols(2).setZero();
        map_.B.rightCols(2).setZero();
        map_.A.bottomRows(2).setZero();
        map_.B.bottomRows(2).setZero();
        for (int p = 0; p < 2; ++p) {
            const ModeId id{Path::idle, k, kPols[static_cast<std::size_t>(p)]};
            basis_.add(id, {Origin::idle, device.side, k, device.name});
            map_.inputs.push_back({id.port(), id.pol});
            map_.outputs.push_back({id.port(), id.pol});
            map_.A(old_rows + p, old_cols + p) = 1.0;
            inj.modes.push_back(id);
        }
        *open = inj.modes.front().port();
        injections_.push_back(inj);
        return inj.modes;
    }

    /// Composes one device onto the current outputs. Untouched channels pass
    /// through in their current order; the device outputs are appended.
    void apply(const Device &device) {
        const FieldMap local = device_map(device);
        FieldMap step;
        for (const auto &c : map_.outputs) {
            const bool consumed = std::find(local.inputs.begin(), local.inputs.end(), c) != local.inputs.end();
            if (!consumed) {
                step.inputs.push_back(c);
                step.outputs.push_back(c);
            }
        }
        for (const auto &c : local.inputs) {
            if (!map_.output_index(c)) {
                throw wiring_error(std::string(kind_name(device.kind)) + " '" + device.name + "': port " + c.port +
                                   " is not wired to any beam");
            }
        }
        for (const auto &c : local.outputs) {
            if (std::find(step.outputs.begin(), step.outputs.end(), c) != step.outputs.end()) {
                throw wiring_error("output port " + c.port + " already carries a beam");
            }
        }
        const auto pass = static_cast<Eigen::Index>(step.inputs.size());
        const auto n = pass + local.A.rows();
        step.inputs.insert(step.inputs.end(), local.inputs.begin(), local.inputs.end());
        step.outputs.insert(step.outputs.end(), local.outputs.begin(), local.outputs.end());
        step.A = CMatrix::Zero(n, n);
        step.B = CMatrix::Zero(n, n);
        step.A.topLeftCorner(pass, pass).setIdentity();
        step.A.bottomRightCorner(local.A.rows(), local.A.cols()) = local.A;
        map_ = compose(map_, step);
        devices_.push_back(device);
    }

    void add_detector(std::string port, Side side) {
        if (std::none_of(map_.outputs.begin(), map_.outputs.end(), [&](const Channel &c) { return c.port == port; })) {
            throw wiring_error("detector on unknown port " + port);
        }
        detectors_.push_back({std::move(port), side});
    }

    std::vector<Eigen::Index> detector_rows(const Detector &d) const {
        std::vector<Eigen::Index> rows;
        for (std::size_t r = 0; r < map_.outputs.size(); ++r) {
            if (map_.outputs[r].port == d.name) {
                rows.push_back(static_cast<Eigen::Index>(r));
            }
        }
        return rows;
    }

    /// Output channels that end on a declared detector.
    std::size_t detected_channel_count() const {
        std::size_t n = 0;
        for (const auto &d : detectors_) {
            n += detector_rows(d).size();
        }
        return n;
    }

  private:
    ModeBasis basis_;
    FieldMap map_;
    std::vector<Detector> detectors_;
    std::vector<IdleInjection> injections_;
    std::vector<Device> devices_;
};

/// Device list plus detector declarations; applied on top of a source.
struct Apparatus {
    struct Step {
        Device device;
        bool inject_idle = false;
    };
    std::string name;
    std::vector<Step> steps;
    std::vector<Detector> detectors;
};

inline Network assemble(ModeBasis basis, FieldMap source, const Apparatus &apparatus) {
    Network net(std::move(basis), std::move(source));
    for (auto step : apparatus.steps) {
        if (step.inject_idle) {
            net.inject_idle(step.device);
        }
        net.apply(step.device);
    }
    for (const auto &d : apparatus.detectors) {
        net.add_detector(d.name, d.side);
    }
    return net;
}

inline nlohmann::json to_json(const Apparatus &a) {
    nlohmann::json devices = nlohmann::json::array();
    for (const auto &s : a.steps) {
        devices.push_back({{"name", s.device.name},
                           {"kind", kind_name(s.device.kind)},
                           {"angle", s.device.angle},
                           {"inputs", s.device.inputs},
                           {"outputs", s.device.outputs},
                           {"side", side_name(s.device.side)},
                           {"inject_idle", s.inject_idle}});
    }
    nlohmann::json detectors = nlohmann::json::array();
    for (const auto &d : a.detectors) {
        detectors.push_back({{"name", d.name}, {"side", side_name(d.side)}});
    }
    return {{"name", a.name}, {"devices", devices}, {"detectors", detectors}};
}

inline Side side_from_name(const std::string &s) {
    if (s == "L") {
        return Side::left;
    }
    if (s == "R") {
        return Side::right;
    }
    throw std::invalid_argument("unknown side '" + s + "'");
}

inline Apparatus apparatus_from_json(const nlohmann::json &j) {
    Apparatus a;
    a.name = j.at("name").get<std::string>();
    for (const auto &d : j.at("devices")) {
        Apparatus::Step s;
        s.device.name = d.at("name").get<std::string>();
        s.device.kind = kind_from_name(d.at("kind").get<std::string>());
        s.device.angle = d.at("angle").get<double>();
        s.device.inputs = d.at("inputs").get<std::vector<std::string>>();
        s.device.outputs = d.at("outputs").get<std::vector<std::string>>();
        s.device.side = side_from_name(d.at("side").get<std::string>());
        s.inject_idle = d.at("inject_idle").get<bool>();
        a.steps.push_back(std::move(s));
    }
    for (const auto &d : j.at("detectors")) {
        a.detectors.push_back({d.at("name").get<std::string>(), side_from_name(d.at("side").get<std::string>())});
    }
    return a;
}

}  // namespace hyperbell
