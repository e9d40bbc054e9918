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

// Single and joint detection probabilities with zeropoint subtraction, from
// the exact second moments of a composed map or by Monte-Carlo sampling.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hyperbell/linear_network.hpp"
#include "hyperbell/zpf.hpp"

namespace hyperbell {

class config_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Detector efficiency constants; detectors not listed have gain 1.
struct DetectorGains {
    std::map<std::string, double> k;

    double operator()(const std::string &detector) const {
        auto it = k.find(detector);
        return it == k.end() ? 1.0 : it->second;
    }

    void validate() const {
        for (const auto &[name, g] : k) {
            if (!(g > 0.0) || !std::isfinite(g)) {
                throw config_error("gain for detector " + name + " must be positive");
            }
        }
    }
};

enum class Normalization { raw, normalized };

struct JointEntry {
    std::string first;
    std::string second;
    bool cross_side = false;
    double p = 0.0;
    std::optional<double> stderr_;
};

struct SingleEntry {
    std::string detector;
    double p = 0.0;
    std::optional<double> stderr_;
};

/// Joint and single detection probabilities over one apparatus. Joint
/// entries cover every unordered detector pair in detector order; a
/// normalized table keeps only cross-side pairs, summing to 1.
struct CoincidenceTable {
    std::vector<Detector> detectors;
    std::vector<JointEntry> joint;
    std::vector<SingleEntry> singles;
    Normalization normalization = Normalization::raw;

    const JointEntry *find(const std::string &a, const std::string &b) const {
        for (const auto &e : joint) {
            if ((e.first == a && e.second == b) || (e.first == b && e.second == a)) {
                return &e;
            }
        }
        return nullptr;
    }

    double p(const std::string &a, const std::string &b) const {
        const auto *e = find(a, b);
        if (!e) {
            throw std::out_of_range("no joint entry for " + a + "," + b);
        }
        return e->p;
    }

    bool has_stderr() const { return !joint.empty() && joint.front().stderr_.has_value(); }

    double cross_side_total() const {
        double s = 0.0;
        for (const auto &e : joint) {
            if (e.cross_side) s += e.p;
        }
        return s;
    }
};

inline CoincidenceTable normalized(const CoincidenceTable &t) {
    const double total = t.cross_side_total();
    if (total == 0.0 || !std::isfinite(total)) {
        throw std::domain_error("cannot normalize a table without coincidences");
    }
    CoincidenceTable out;
    out.detectors = t.detectors;
    out.singles = t.singles;
    out.normalization = Normalization::normalized;
    for (const auto &e : t.joint) {
        if (!e.cross_side) continue;
        JointEntry n = e;
        n.p /= total;
        if (n.stderr_) *n.stderr_ /= std::abs(total);
        out.joint.push_back(n);
    }
    return out;
}

namespace detail {

inline void check_detectors(const Network &net) {
    if (net.detectors().empty()) {
        throw config_error("network has no detectors");
    }
    for (const auto &d : net.detectors()) {
        if (net.detector_rows(d).empty()) {
            throw config_error("detector " + d.name + " has no channels");
        }
    }
}

template <typename Fn>
CoincidenceTable pair_table(const Network &net, Fn &&value) {
    CoincidenceTable t;
    t.detectors = net.detectors();
    const auto &ds = net.detectors();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = i + 1; j < ds.size(); ++j) {
            JointEntry e;
            e.first = ds[i].name;
            e.second = ds[j].name;
            e.cross_side = ds[i].side != ds[j].side;
            e.p = value(i, j);
            t.joint.push_back(std::move(e));
        }
    }
    return t;
}

}  // namespace detail

/// <d_m d_n> = (A B^T + B A^T) / 2 over output channels.
inline CMatrix pair_moments(const FieldMap &m) {
    return 0.5 * (m.A * m.B.transpose() + m.B * m.A.transpose());
}

/// <d_m d_n*> = (A A^H + B B^H) / 2 over output channels.
inline CMatrix intensity_moments(const FieldMap &m) {
    return 0.5 * (m.A * m.A.adjoint() + m.B * m.B.adjoint());
}

/// Zeropoint-subtracted single rates: P_i = k_i sum_lambda |B row|^2 / 2.
inline std::vector<SingleEntry> analytic_singles(const Network &net, const DetectorGains &gains = {}) {
    detail::check_detectors(net);
    gains.validate();
    std::vector<SingleEntry> out;
    for (const auto &d : net.detectors()) {
        double p = 0.0;
        for (auto r : net.detector_rows(d)) {
            p += 0.5 * net.map().B.row(r).squaredNorm();
        }
        out.push_back({d.name, gains(d.name) * p, std::nullopt});
    }
    return out;
}

/// Joint rates P_ij = k_i k_j sum_{lambda, lambda'} |<F_i,lambda F_j,lambda'>|^2.
inline CoincidenceTable analytic_joint(const Network &net, const DetectorGains &gains = {}) {
    detail::check_detectors(net);
    gains.validate();
    const CMatrix M = pair_moments(net.map());
    const auto &ds = net.detectors();
    auto t = detail::pair_table(net, [&](std::size_t i, std::size_t j) {
        double s = 0.0;
        for (auto a : net.detector_rows(ds[i])) {
            for (auto b : net.detector_rows(ds[j])) {
                s += std::norm(M(a, b));
            }
        }
        return gains(ds[i].name) * gains(ds[j].name) * s;
    });
    t.singles = analytic_singles(net, gains);
    return t;
}

/// Complete Gaussian expectation of (I_i - <I_ZPF,i>)(I_j - <I_ZPF,j>):
/// |<d d>|^2 + |<d d*>|^2 summed over channel pairs, plus P_i P_j. This is
/// what the Monte-Carlo estimator converges to.
inline CoincidenceTable gaussian_joint(const Network &net, const DetectorGains &gains = {}) {
    detail::check_detectors(net);
    gains.validate();
    const CMatrix M = pair_moments(net.map());
    const CMatrix N = intensity_moments(net.map());
    const auto singles = analytic_singles(net);
    const auto &ds = net.detectors();
    auto t = detail::pair_table(net, [&](std::size_t i, std::size_t j) {
        double s = singles[i].p * singles[j].p;
        for (auto a : net.detector_rows(ds[i])) {
            for (auto b : net.detector_rows(ds[j])) {
                s += std::norm(M(a, b)) + std::norm(N(a, b));
            }
        }
        return gains(ds[i].name) * gains(ds[j].name) * s;
    });
    t.singles = analytic_singles(net, gains);
    return t;
}

/// Largest |<d_a d_b*>| between channels of detectors on opposite sides.
inline double max_cross_side_intensity_moment(const Network &net) {
    const CMatrix N = intensity_moments(net.map());
    double worst = 0.0;
    for (const auto &di : net.detectors()) {
        for (const auto &dj : net.detectors()) {
            if (di.side == dj.side) continue;
            for (auto a : net.detector_rows(di)) {
                for (auto b : net.detector_rows(dj)) {
                    worst = std::max(worst, std::abs(N(a, b)));
                }
            }
        }
    }
    return worst;
}

/// Fixed-point sum with 2^-40 resolution. Integer addition is associative,
/// so shard partial sums merge to the same bits in any order.
class ExactSum {
  public:
    void add(double x) { acc_ += static_cast<Int>(std::nearbyint(std::ldexp(x, kFracBits))); }
    void merge(const ExactSum &o) { acc_ += o.acc_; }
    double value() const { return std::ldexp(static_cast<double>(acc_), -kFracBits); }
    friend bool operator==(const ExactSum &, const ExactSum &) = default;

  private:
    __extension__ using Int = __int128;
    static constexpr int kFracBits = 40;
    Int acc_ = 0;
};

/// Running first and second moments of the subtracted intensities and of
/// their pairwise products, for one contiguous range of sample indices.
struct McAccumulator {
    std::uint64_t count = 0;
    std::vector<ExactSum> single_sum, single_sq;
    std::vector<ExactSum> pair_sum, pair_sq;  // upper triangle, row-major

    explicit McAccumulator(std::size_t detectors = 0)
        : single_sum(detectors), single_sq(detectors),
          pair_sum(detectors < 2 ? 0 : detectors * (detectors - 1) / 2),
          pair_sq(pair_sum.size()) {}

    void merge(const McAccumulator &o) {
        if (o.single_sum.size() != single_sum.size()) {
            throw std::invalid_argument("cannot merge accumulators of different shape");
        }
        count += o.count;
        for (std::size_t i = 0; i < single_sum.size(); ++i) {
            single_sum[i].merge(o.single_sum[i]);
            single_sq[i].merge(o.single_sq[i]);
        }
        for (std::size_t i = 0; i < pair_sum.size(); ++i) {
            pair_sum[i].merge(o.pair_sum[i]);
            pair_sq[i].merge(o.pair_sq[i]);
        }
    }
};

/// Accumulates samples [begin, end). For each vacuum realization z the
/// detector intensity I = sum |A z + B z*|^2 over its channels is reduced
/// by the exact zeropoint mean sum |A row|^2 / 2.
inline McAccumulator mc_accumulate(const Network &net, std::uint64_t seed, std::uint64_t begin, std::uint64_t end) {
    detail::check_detectors(net);
    const auto &ds = net.detectors();
    const FieldMap &m = net.map();
    std::vector<std::vector<Eigen::Index>> rows;
    std::vector<double> vacuum;
    for (const auto &d : ds) {
        rows.push_back(net.detector_rows(d));
        double v = 0.0;
        for (auto r : rows.back()) {
            v += 0.5 * m.A.row(r).squaredNorm();
        }
        vacuum.push_back(v);
    }
    McAccumulator acc(ds.size());
    std::vector<double> dI(ds.size());
    for (std::uint64_t idx = begin; idx < end; ++idx) {
        const ZpfSample z = sample_zpf(net.basis(), seed, idx);
        const CVector d = m.evaluate(z.amplitudes);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            double intensity = 0.0;
            for (auto r : rows[i]) {
                intensity += std::norm(d[r]);
            }
            dI[i] = intensity - vacuum[i];
            acc.single_sum[i].add(dI[i]);
            acc.single_sq[i].add(dI[i] * dI[i]);
        }
        std::size_t k = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            for (std::size_t j = i + 1; j < ds.size(); ++j, ++k) {
                const double prod = dI[i] * dI[j];
                acc.pair_sum[k].add(prod);
                acc.pair_sq[k].add(prod * prod);
            }
        }
    }
    acc.count = end - begin;
    return acc;
}

/// Mean and standard error of each entry, with gains applied.
inline CoincidenceTable mc_finalize(const Network &net, const McAccumulator &acc, const DetectorGains &gains = {}) {
    gains.validate();
    if (acc.count == 0) {
        throw std::invalid_argument("no Monte-Carlo samples");
    }
    const double n = static_cast<double>(acc.count);
    auto stats = [n](const ExactSum &sum, const ExactSum &sq) {
        const double mean = sum.value() / n;
        if (n < 2.0) {
            return std::pair{mean, std::numeric_limits<double>::infinity()};
        }
        const double var = std::max(0.0, (sq.value() / n - mean * mean) * n / (n - 1.0));
        return std::pair{mean, std::sqrt(var / n)};
    };
    const auto &ds = net.detectors();
    std::vector<std::pair<double, double>> pair_stats;
    for (std::size_t k = 0; k < acc.pair_sum.size(); ++k) {
        pair_stats.push_back(stats(acc.pair_sum[k], acc.pair_sq[k]));
    }
    std::size_t k = 0;
    auto t = detail::pair_table(net, [&](std::size_t, std::size_t) { return 0.0; });
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = i + 1; j < ds.size(); ++j, ++k) {
            const double g = gains(ds[i].name) * gains(ds[j].name);
            t.joint[k].p = g * pair_stats[k].first;
            t.joint[k].stderr_ = g * pair_stats[k].second;
        }
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto [mean, se] = stats(acc.single_sum[i], acc.single_sq[i]);
        const double g = gains(ds[i].name);
        t.singles.push_back({ds[i].name, g * mean, g * se});
    }
    return t;
}

/// Monte-Carlo joint table over `samples` realizations, split across
/// `workers` threads by sample-index range. The result does not depend on
/// the worker count.
inline CoincidenceTable mc_joint(const Network &net, const DetectorGains &gains, std::uint64_t samples,
                                 std::uint64_t seed, unsigned workers = 1) {
    if (samples == 0) {
        throw config_error("Monte-Carlo needs at least one sample");
    }
    detail::check_detectors(net);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(samples, 64))));
    std::vector<McAccumulator> parts(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = samples * w / workers;
        const std::uint64_t end = samples * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] { parts[w] = mc_accumulate(net, seed, begin, end); });
    }
    for (auto &t : pool) {
        t.join();
    }
    McAccumulator total(net.detectors().size());
    for (const auto &p : parts) {
        total.merge(p);
    }
    return mc_finalize(net, total, gains);
}

namespace detail {

inline std::string fmt12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline double round12(double v) { return std::stod(fmt12(v)); }

}  // namespace detail

inline const char *normalization_name(Normalization n) { return n == Normalization::raw ? "raw" : "normalized"; }

/// Nested-map JSON: joint[first][second], with 12 significant digits.
inline nlohmann::json to_json(const CoincidenceTable &t) {
    using detail::round12;
    nlohmann::json j;
    j["normalization"] = normalization_name(t.normalization);
    j["detectors"] = nlohmann::json::array();
    for (const auto &d : t.detectors) {
        j["detectors"].push_back({{"name", d.name}, {"side", side_name(d.side)}});
    }
    nlohmann::json joint = nlohmann::json::object();
    nlohmann::json joint_se = nlohmann::json::object();
    for (const auto &e : t.joint) {
        joint[e.first][e.second] = round12(e.p);
        if (e.stderr_) joint_se[e.first][e.second] = round12(*e.stderr_);
    }
    j["joint"] = joint;
    nlohmann::json singles = nlohmann::json::object();
    nlohmann::json singles_se = nlohmann::json::object();
    for (const auto &s : t.singles) {
        singles[s.detector] = round12(s.p);
        if (s.stderr_) singles_se[s.detector] = round12(*s.stderr_);
    }
    j["singles"] = singles;
    if (t.has_stderr()) {
        j["joint_stderr"] = joint_se;
        j["singles_stderr"] = singles_se;
    }
    return j;
}

/// CSV rows detector_i,detector_j,p,stderr. Singles follow the joint rows
/// with an empty detector_j; stderr is empty for analytic tables.
inline std::string to_csv(const CoincidenceTable &t) {
    using detail::fmt12;
    std::ostringstream os;
    os << "detector_i,detector_j,p,stderr\n";
    for (const auto &e : t.joint) {
        os << e.first << ',' << e.second << ',' << fmt12(e.p) << ',' << (e.stderr_ ? fmt12(*e.stderr_) : "") << '\n';
    }
    for (const auto &s : t.singles) {
        os << s.detector << ",," << fmt12(s.p) << ',' << (s.stderr_ ? fmt12(*s.stderr_) : "") << '\n';
    }
    return os.str();
}

}  // namespace hyperbell
