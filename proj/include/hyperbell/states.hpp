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

// Labels and local parameter settings of the sixteen polarization-momentum
// hyper-Bell states. No field or network machinery lives here.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperbell {

class parameter_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class PolBell { Psi_plus, Psi_minus, Phi_plus, Phi_minus };
enum class MomBell { psi_plus, psi_minus, phi_plus, phi_minus };

inline constexpr std::array<PolBell, 4> kPolBells{PolBell::Psi_plus, PolBell::Psi_minus, PolBell::Phi_plus,
                                                   PolBell::Phi_minus};
inline constexpr std::array<MomBell, 4> kMomBells{MomBell::psi_plus, MomBell::psi_minus, MomBell::phi_plus,
                                                   MomBell::phi_minus};

inline const char *label(PolBell s) {
    switch (s) {
        case PolBell::Psi_plus: return "Psi+";
        case PolBell::Psi_minus: return "Psi-";
        case PolBell::Phi_plus: return "Phi+";
        case PolBell::Phi_minus: return "Phi-";
    }
    return "?";
}

inline const char *label(MomBell s) {
    switch (s) {
        case MomBell::psi_plus: return "psi+";
        case MomBell::psi_minus: return "psi-";
        case MomBell::phi_plus: return "phi+";
        case MomBell::phi_minus: return "phi-";
    }
    return "?";
}

/// Which output port each photon-1 beam leaves through: (x, y) = (a, b)
/// keeps the a1/b1 beams in place, (b, a) exchanges them.
enum class PathOrder { ab, ba };

/// The four dichotomic local settings on photon 1 selecting one of the
/// sixteen hyper-Bell states. Angles are in radians.
struct HyperBellParams {
    double beta = 0.0;
    double kappa = 0.0;
    PathOrder xy = PathOrder::ab;
    double phi1 = 0.0;
    double phi2 = 0.0;

    static HyperBellParams of(PolBell pol, MomBell mom) {
        HyperBellParams p;
        switch (pol) {
            case PolBell::Psi_plus: p.beta = 0.0; p.kappa = 0.0; break;
            case PolBell::Psi_minus: p.beta = 0.0; p.kappa = std::numbers::pi; break;
            case PolBell::Phi_plus: p.beta = -std::numbers::pi / 2; p.kappa = std::numbers::pi; break;
            case PolBell::Phi_minus: p.beta = -std::numbers::pi / 2; p.kappa = 0.0; break;
        }
        switch (mom) {
            case MomBell::psi_plus: p.xy = PathOrder::ab; break;
            case MomBell::psi_minus: p.xy = PathOrder::ab; p.phi2 = std::numbers::pi; break;
            case MomBell::phi_plus: p.xy = PathOrder::ba; break;
            case MomBell::phi_minus: p.xy = PathOrder::ba; p.phi1 = std::numbers::pi; break;
        }
        return p;
    }

    /// Polarization class; throws parameter_error outside the dichotomic set.
    PolBell pol() const {
        const int b = quarter_turns(beta, "beta");
        const int k = quarter_turns(kappa, "kappa");
        if (b == 0 && k == 0) return PolBell::Psi_plus;
        if (b == 0 && k == 2) return PolBell::Psi_minus;
        if (b == -1 && k == 0) return PolBell::Phi_minus;
        if (b == -1 && k == 2) return PolBell::Phi_plus;
        if (b == 1 && k == 2) return PolBell::Phi_plus;  // -|Phi+>, global sign
        throw parameter_error("beta/kappa combination does not select a Bell state");
    }

    MomBell mom() const {
        const int f1 = quarter_turns(phi1, "phi1");
        const int f2 = quarter_turns(phi2, "phi2");
        if (xy == PathOrder::ab) {
            if (f1 == 0 && f2 == 0) return MomBell::psi_plus;
            if (f1 == 0 && f2 == 2) return MomBell::psi_minus;
        } else {
            if (f1 == 0 && f2 == 0) return MomBell::phi_plus;
            if ((f1 == 2 && f2 == 0) || (f1 == 0 && f2 == 2)) return MomBell::phi_minus;
        }
        throw parameter_error("(x, y)/(phi1, phi2) combination does not select a Bell state");
    }

    void validate() const {
        (void)pol();
        (void)mom();
    }

    std::string label() const { return std::string(hyperbell::label(pol())) + ":" + hyperbell::label(mom()); }

  private:
    // Angle as a multiple of pi/2 in (-2, 2]; throws when off the grid.
    static int quarter_turns(double angle, const char *what) {
        const double q = angle / (std::numbers::pi / 2);
        const double r = std::round(q);
        if (std::abs(q - r) > 1e-9) {
            throw parameter_error(std::string(what) + " must be a multiple of pi/2");
        }
        int n = static_cast<int>(r) % 4;
        if (n <= -2) n += 4;
        if (n > 2) n -= 4;
        return n;
    }
};

/// Parses "Phi+:psi+" style selectors. Throws parameter_error on bad input.
inline HyperBellParams parse_state(const std::string &selector) {
    const auto colon = selector.find(':');
    if (colon == std::string::npos) {
        throw parameter_error("state selector '" + selector + "' must look like 'Psi+:psi+'");
    }
    const std::string pol = selector.substr(0, colon);
    const std::string mom = selector.substr(colon + 1);
    std::optional<PolBell> p;
    std::optional<MomBell> m;
    for (auto s : kPolBells) {
        if (pol == label(s)) p = s;
    }
    for (auto s : kMomBells) {
        if (mom == label(s)) m = s;
    }
    if (!p) {
        throw parameter_error("unknown polarization Bell state '" + pol + "' (expected Psi+, Psi-, Phi+, Phi-)");
    }
    if (!m) {
        throw parameter_error("unknown momentum Bell state '" + mom + "' (expected psi+, psi-, phi+, phi-)");
    }
    return HyperBellParams::of(*p, *m);
}

inline std::vector<HyperBellParams> all_hyperbell_states() {
    std::vector<HyperBellParams> out;
    for (auto p : kPolBells) {
        for (auto m : kMomBells) {
            out.push_back(HyperBellParams::of(p, m));
        }
    }
    return out;
}

enum class Setup { polarization_bsm, momentum_bsm };

inline const char *setup_name(Setup s) { return s == Setup::polarization_bsm ? "pol-bsm" : "mom-bsm"; }

inline std::optional<Setup> setup_from_name(const std::string &name) {
    if (name == "pol-bsm") return Setup::polarization_bsm;
    if (name == "mom-bsm") return Setup::momentum_bsm;
    return std::nullopt;
}

}  // namespace hyperbell
