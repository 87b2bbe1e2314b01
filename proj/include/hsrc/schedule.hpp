/*
Copyright 2026 The HSRC Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hsrc/combinatorics.hpp"
#include "hsrc/error.hpp"
#include "hsrc/trace.hpp"

namespace hsrc {

/// Bits a node may upload / download during one step.
struct Capacity {
    double upload = 0.0;
    double download = 0.0;
};

/// u(i,t) = a(i,t) w_up tau and d(i,t) = a(i,t) w_down tau for every node
/// (slot 0 is the source).
inline std::vector<Capacity> capacities(const AvailabilityTrace &trace, std::size_t t) {
    if (t >= trace.steps()) throw Error(ErrorCode::InvalidArgument, "step beyond trace length");
    std::vector<Capacity> caps(trace.nodes() + 1);
    for (std::size_t id = 0; id <= trace.nodes(); ++id) {
        if (!trace.online(id, t)) continue;
        caps[id].upload = trace.up_bps(id, t) * trace.tau();
        caps[id].download = trace.down_bps(id, t) * trace.tau();
    }
    return caps;
}

/// theta(i, t): bits received so far by each storage node (slot 0 unused).
struct NodeProgress {
    std::vector<double> theta;
    std::vector<double> source_received;
    std::vector<double> innet_received;

    NodeProgress() = default;
    explicit NodeProgress(std::size_t nodes)
        : theta(nodes + 1, 0.0), source_received(nodes + 1, 0.0), innet_received(nodes + 1, 0.0) {}

    std::size_t nodes() const noexcept { return theta.empty() ? 0 : theta.size() - 1; }

    double min_theta() const {
        if (theta.size() < 2) return 0.0;
        return *std::min_element(theta.begin() + 1, theta.end());
    }

    void receive_from_source(std::size_t node, double bits) {
        theta[node] += bits;
        source_received[node] += bits;
    }

    void receive_in_network(std::size_t node, double bits) {
        theta[node] += bits;
        innet_received[node] += bits;
    }
};

/// R(c, t) for one triplet, in the order the engine granted it.
struct TripletGrant {
    Triplet triplet;
    double bits = 0.0;
};

/// Transfers of one step: f(s, i, t) per node and the triplet grants.
struct StepPlan {
    std::vector<double> source_flows; // indexed by node id, slot 0 unused
    std::vector<TripletGrant> grants;

    double source_total() const {
        double total = 0;
        for (std::size_t i = 1; i < source_flows.size(); ++i) total += source_flows[i];
        return total;
    }

    double triplet_total() const {
        double total = 0;
        for (const auto &g : grants) total += g.bits;
        return total;
    }
};

struct Schedule {
    std::size_t nodes = 0;
    double tau = 3600.0;
    std::vector<StepPlan> steps;
};

/// Executes one step: applies the source flows to theta, then walks the
/// triplets in the given order. Each (i, j) -> k is granted
///
///   min(u_i, u_j, d_k / 2, max(min(theta_i, theta_j) - theta_k, 0))
///
/// against the budgets still unspent in this step; both sources are charged
/// the grant on upload and the destination twice the grant on download.
/// Grants may be fractional.
inline StepPlan run_step(NodeProgress &progress, std::span<const Triplet> sorted_triplets,
                         std::span<const double> source_flows, std::span<const Capacity> caps) {
    const std::size_t n = progress.nodes();
    if (caps.size() != n + 1) throw Error(ErrorCode::InvalidArgument, "capacity vector does not match node count");
    StepPlan plan;
    plan.source_flows.assign(n + 1, 0.0);
    std::vector<double> up(n + 1), down(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        up[i] = caps[i].upload;
        down[i] = caps[i].download;
    }
    for (std::size_t i = 1; i < source_flows.size() && i <= n; ++i) {
        const double f = source_flows[i];
        if (f <= 0) continue;
        plan.source_flows[i] = f;
        down[i] = std::max(down[i] - f, 0.0);
        progress.receive_from_source(i, f);
    }
    for (const Triplet &c : sorted_triplets) {
        const double by_bw = std::min({up[c.src_a], up[c.src_b], down[c.dst] / 2.0});
        const double by_index =
            std::max(std::min(progress.theta[c.src_a], progress.theta[c.src_b]) - progress.theta[c.dst], 0.0);
        const double grant = std::min(by_bw, by_index);
        if (!(grant > 0)) continue;
        up[c.src_a] -= grant;
        up[c.src_b] -= grant;
        down[c.dst] -= 2.0 * grant;
        progress.receive_in_network(c.dst, grant);
        plan.grants.push_back({c, grant});
    }
    return plan;
}

/// Outcome of a schedule after its horizon.
struct Metrics {
    double stored_bits = 0.0;   // M(t): min_i theta(i) x k
    double total_traffic = 0.0; // T(f, t): source bits + 2 x triplet bits
    double source_bits = 0.0;
    double triplet_bits = 0.0;  // sum of R(c, t)
    std::size_t steps = 0;
    double tau = 0.0;

    double source_per_useful() const { return stored_bits > 0 ? source_bits / stored_bits : 0.0; }
    double traffic_per_useful() const { return stored_bits > 0 ? total_traffic / stored_bits : 0.0; }
    double throughput_bps() const {
        const double seconds = static_cast<double>(steps) * tau;
        return seconds > 0 ? stored_bits / seconds : 0.0;
    }
};

inline Metrics compute_metrics(const Schedule &sched, const NodeProgress &progress, std::size_t k) {
    Metrics m;
    m.steps = sched.steps.size();
    m.tau = sched.tau;
    for (const auto &step : sched.steps) {
        m.source_bits += step.source_total();
        m.triplet_bits += step.triplet_total();
    }
    m.total_traffic = m.source_bits + 2.0 * m.triplet_bits;
    m.stored_bits = progress.min_theta() * static_cast<double>(k);
    return m;
}

/// One line of a schedule dump. Source records read `t,0,dst,bits` and
/// triplet records `t,i,j,k,bits`; either may carry a trailing `offset`
/// giving the first bit of the destination's fragment being delivered. A
/// record without an offset delivers the bits right after the destination's
/// current prefix.
struct TransferRecord {
    std::size_t step = 0;
    bool from_source = false;
    std::size_t src_a = 0; // 0 for source records
    std::size_t src_b = 0;
    std::size_t dst = 0;
    double bits = 0.0;
    std::optional<double> offset;
    std::size_t line = 0; // 1-based line in the dump, 0 when built in memory
};

inline std::vector<TransferRecord> to_records(const Schedule &sched) {
    std::vector<TransferRecord> out;
    for (std::size_t t = 0; t < sched.steps.size(); ++t) {
        const auto &step = sched.steps[t];
        for (std::size_t i = 1; i < step.source_flows.size(); ++i) {
            if (step.source_flows[i] > 0) out.push_back({t, true, 0, 0, i, step.source_flows[i], std::nullopt, 0});
        }
        for (const auto &g : step.grants) {
            out.push_back({t, false, g.triplet.src_a, g.triplet.src_b, g.triplet.dst, g.bits, std::nullopt, 0});
        }
    }
    return out;
}

inline void write_records(std::ostream &out, std::span<const TransferRecord> records) {
    for (const auto &r : records) {
        out << r.step << ',';
        if (r.from_source) out << "0," << r.dst;
        else out << r.src_a << ',' << r.src_b << ',' << r.dst;
        out << ',' << detail::format_double(r.bits);
        if (r.offset) out << ',' << detail::format_double(*r.offset);
        out << '\n';
    }
}

inline void write_schedule_dump(std::ostream &out, const Schedule &sched) {
    const auto records = to_records(sched);
    write_records(out, records);
}

inline std::vector<TransferRecord> read_schedule_dump(std::istream &in) {
    std::vector<TransferRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        auto fields = detail::split(text, ',');
        for (auto &f : fields) f = detail::trim(f);
        try {
            TransferRecord r;
            r.line = line_no;
            if (fields.size() < 4 || fields.size() > 6) {
                throw Error(ErrorCode::Parse, "expected 4 to 6 fields, got " + std::to_string(fields.size()));
            }
            r.step = detail::parse_uint(fields[0], "step");
            const auto second = detail::parse_uint(fields[1], "node id");
            if (second == 0) {
                if (fields.size() > 5) throw Error(ErrorCode::Parse, "source record has too many fields");
                r.from_source = true;
                r.dst = detail::parse_uint(fields[2], "dst");
                r.bits = detail::parse_double(fields[3], "bits");
                if (fields.size() == 5) r.offset = detail::parse_double(fields[4], "offset");
            } else {
                if (fields.size() < 5) throw Error(ErrorCode::Parse, "triplet record needs t,i,j,k,bits");
                r.src_a = second;
                r.src_b = detail::parse_uint(fields[2], "src");
                r.dst = detail::parse_uint(fields[3], "dst");
                r.bits = detail::parse_double(fields[4], "bits");
                if (fields.size() == 6) r.offset = detail::parse_double(fields[5], "offset");
            }
            if (!(r.bits >= 0)) throw Error(ErrorCode::Parse, "bits must be non-negative");
            if (r.offset && !(*r.offset >= 0)) throw Error(ErrorCode::Parse, "offset must be non-negative");
            out.push_back(r);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::Parse) throw;
            throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

} // namespace hsrc
