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

// Zeropoint (vacuum) field amplitudes: mode identities, the vacuum Wigner
// distribution and its second moments, and a counter-based Gaussian sampler.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hyperbell {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

enum class Pol { H, V };

inline constexpr std::array<Pol, 2> kPols{Pol::H, Pol::V};

inline const char *pol_name(Pol p) { return p == Pol::H ? "H" : "V"; }

/// Spatial path of a mode set. `idle` marks a vacuum injection at an
/// analyzer's open port; those carry an injection index.
enum class Path { a1, b1, a2, b2, idle };

/// Left (photon 1) or right (photon 2) half of the apparatus.
enum class Side { left, right };

inline const char *side_name(Side s) { return s == Side::left ? "L" : "R"; }

class basis_error : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

struct ModeId {
    Path path = Path::a1;
    int idle_index = 0;  // only meaningful for Path::idle
    Pol pol = Pol::H;

    std::string port() const {
        switch (path) {
            case Path::a1: return "a1";
            case Path::b1: return "b1";
            case Path::a2: return "a2";
            case Path::b2: return "b2";
            case Path::idle: return "idle" + std::to_string(idle_index);
        }
        return "?";
    }
    std::string name() const { return port() + pol_name(pol); }

    friend bool operator==(const ModeId &a, const ModeId &b) {
        if (a.path != b.path || a.pol != b.pol) {
            return false;
        }
        return a.path != Path::idle || a.idle_index == b.idle_index;
    }
};

inline Side side_of(Path p) {
    return (p == Path::a1 || p == Path::b1) ? Side::left : Side::right;
}

enum class Origin { unknown, source, idle };

/// Where a mode set enters the system. Idle modes remember the injection
/// point (device) and the apparatus side they were injected on.
struct Provenance {
    Origin origin = Origin::unknown;
    std::optional<Side> side;
    int injection_point = -1;
    std::string device;
};

/// Ordered list of independent zeropoint mode sets. Order is insertion order
/// and never changes once a mode is appended.
class ModeBasis {
  public:
    ModeBasis() = default;

    std::size_t add(const ModeId &id, Provenance prov = {}) {
        if (contains(id)) {
            throw std::invalid_argument("duplicate mode " + id.name());
        }
        modes_.push_back(id);
        provenance_.push_back(std::move(prov));
        return modes_.size() - 1;
    }

    std::size_t size() const { return modes_.size(); }
    bool empty() const { return modes_.empty(); }
    const ModeId &operator[](std::size_t i) const { return modes_.at(i); }
    const Provenance &provenance(std::size_t i) const { return provenance_.at(i); }
    const std::vector<ModeId> &modes() const { return modes_; }

    std::optional<std::size_t> find(const ModeId &id) const {
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            if (modes_[i] == id) {
                return i;
            }
        }
        return std::nullopt;
    }

    bool contains(const ModeId &id) const { return find(id).has_value(); }

    std::size_t index_of(const ModeId &id) const {
        auto i = find(id);
        if (!i) {
            throw basis_error("mode " + id.name() + " is not in the basis");
        }
        return *i;
    }

    int idle_count() const {
        int n = 0;
        for (const auto &m : modes_) {
            n += m.path == Path::idle;
        }
        return n;
    }

  private:
    std::vector<ModeId> modes_;
    std::vector<Provenance> provenance_;
};

/// The eight source mode sets {a1,b1,a2,b2} x {H,V}, in that order.
inline ModeBasis source_basis() {
    ModeBasis basis;
    for (Path p : {Path::a1, Path::b1, Path::a2, Path::b2}) {
        for (Pol pol : kPols) {
            basis.add({p, 0, pol}, {Origin::source, side_of(p), -1, "source"});
        }
    }
    return basis;
}

/// One realization of the vacuum amplitudes, one complex number per mode.
struct ZpfSample {
    CVector amplitudes;
};

/// Philox4x32-10 counter-based generator.
/// Stateless: the output is a pure function of (counter, key).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

namespace detail {

inline double unit_interval(std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
}

}  // namespace detail

/// Vacuum amplitude of one mode: circular complex Gaussian with
/// <|alpha|^2> = 1/2, i.e. variance 1/4 per quadrature. Keyed by
/// (seed, sample_index, mode_index) so results never depend on sharding.
inline cplx zpf_amplitude(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t mode_index) {
    const auto out = philox4x32(
        {static_cast<std::uint32_t>(sample_index), static_cast<std::uint32_t>(sample_index >> 32),
         static_cast<std::uint32_t>(mode_index), static_cast<std::uint32_t>(mode_index >> 32)},
        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    // Box-Muller; u1 in (0, 1] keeps the log finite.
    const double u1 = 1.0 - detail::unit_interval(out[0], out[1]);
    const double u2 = detail::unit_interval(out[2], out[3]);
    const double radius = 0.5 * std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

inline ZpfSample sample_zpf(const ModeBasis &basis, std::uint64_t seed, std::uint64_t sample_index) {
    ZpfSample s;
    s.amplitudes.resize(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t m = 0; m < basis.size(); ++m) {
        s.amplitudes[static_cast<Eigen::Index>(m)] = zpf_amplitude(seed, sample_index, m);
    }
    return s;
}

/// Exact vacuum second moments: <z_i z_j*> = delta_ij / 2 and <z_i z_j> = 0.
inline cplx second_moment(const ModeBasis &basis, const ModeId &i, const ModeId &j, bool conjugate_second) {
    const std::size_t ii = basis.index_of(i);
    const std::size_t jj = basis.index_of(j);
    if (!conjugate_second) {
        return {0.0, 0.0};
    }
    return ii == jj ? cplx{0.5, 0.0} : cplx{0.0, 0.0};
}

}  // namespace hyperbell
