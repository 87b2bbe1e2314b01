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
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "hsrc/combinatorics.hpp"
#include "hsrc/error.hpp"
#include "hsrc/rng.hpp"
#include "hsrc/schedule.hpp"

namespace hsrc {

enum class SourcePolicy { Random, MinData, MaxData, NoBasis };
enum class TripletPolicy { Random, MinData, MaxData, MaxFlow };

inline std::string_view to_string(SourcePolicy p) {
    switch (p) {
        case SourcePolicy::Random: return "random";
        case SourcePolicy::MinData: return "min-data";
        case SourcePolicy::MaxData: return "max-data";
        case SourcePolicy::NoBasis: return "no-basis";
    }
    return "?";
}

inline std::string_view to_string(TripletPolicy p) {
    switch (p) {
        case TripletPolicy::Random: return "random";
        case TripletPolicy::MinData: return "min-data";
        case TripletPolicy::MaxData: return "max-data";
        case TripletPolicy::MaxFlow: return "max-flow";
    }
    return "?";
}

inline SourcePolicy parse_source_policy(std::string_view s) {
    for (auto p : {SourcePolicy::Random, SourcePolicy::MinData, SourcePolicy::MaxData, SourcePolicy::NoBasis}) {
        if (s == to_string(p)) return p;
    }
    throw Error(ErrorCode::Parse, "unknown source policy '" + std::string(s) + "'");
}

inline TripletPolicy parse_triplet_policy(std::string_view s) {
    for (auto p : {TripletPolicy::Random, TripletPolicy::MinData, TripletPolicy::MaxData, TripletPolicy::MaxFlow}) {
        if (s == to_string(p)) return p;
    }
    throw Error(ErrorCode::Parse, "unknown triplet policy '" + std::string(s) + "'");
}

struct PolicyConfig {
    SourcePolicy source = SourcePolicy::Random;
    TripletPolicy triplets = TripletPolicy::MaxFlow;
    std::uint64_t rng_seed = 0;

    /// Named combination when there is one (rnd-flw, ...), else "<source>/<triplets>".
    std::string name() const {
        struct Named {
            std::string_view name;
            SourcePolicy source;
            TripletPolicy triplets;
        };
        static constexpr Named named[] = {
            {"rnd-flw", SourcePolicy::Random, TripletPolicy::MaxFlow},
            {"rnd-dta", SourcePolicy::Random, TripletPolicy::MinData},
            {"min-flw", SourcePolicy::MinData, TripletPolicy::MaxFlow},
            {"min-dta", SourcePolicy::MinData, TripletPolicy::MinData},
        };
        for (const auto &c : named) {
            if (c.source == source && c.triplets == triplets) return std::string(c.name);
        }
        return std::string(to_string(source)) + "/" + std::string(to_string(triplets));
    }
};

/// rnd-flw, rnd-dta, min-flw, min-dta, or an explicit "<source>/<triplets>" pair.
inline PolicyConfig parse_policy(std::string_view name) {
    if (name == "rnd-flw") return {SourcePolicy::Random, TripletPolicy::MaxFlow};
    if (name == "rnd-dta") return {SourcePolicy::Random, TripletPolicy::MinData};
    if (name == "min-flw") return {SourcePolicy::MinData, TripletPolicy::MaxFlow};
    if (name == "min-dta") return {SourcePolicy::MinData, TripletPolicy::MinData};
    const auto slash = name.find('/');
    if (slash != std::string_view::npos) {
        return {parse_source_policy(name.substr(0, slash)), parse_triplet_policy(name.substr(slash + 1))};
    }
    throw Error(ErrorCode::Parse, "unknown policy '" + std::string(name) + "'");
}

inline std::vector<PolicyConfig> table_policies() {
    return {parse_policy("rnd-flw"), parse_policy("rnd-dta"), parse_policy("min-flw"), parse_policy("min-dta")};
}

/// Splits `budget` over `members` so that theta + allocation is as level as
/// possible: every member ends at max(theta_i, L) capped by its download
/// limit, with L chosen so the allocations sum to the budget. Members
/// already above L get nothing. When the limits cannot absorb the budget
/// every member receives its limit and the rest is left unused.
inline std::vector<double> water_fill(std::span<const std::size_t> members, std::span<const double> theta,
                                      std::span<const double> limit, double budget) {
    std::vector<double> alloc(theta.size(), 0.0);
    if (members.empty() || !(budget > 0)) return alloc;

    double capacity = 0;
    for (std::size_t i : members) capacity += std::max(limit[i], 0.0);
    if (capacity <= budget) {
        for (std::size_t i : members) alloc[i] = std::max(limit[i], 0.0);
        return alloc;
    }

    auto filled = [&](double level) {
        double total = 0;
        for (std::size_t i : members) total += std::clamp(level - theta[i], 0.0, std::max(limit[i], 0.0));
        return total;
    };
    std::vector<double> breaks;
    for (std::size_t i : members) {
        breaks.push_back(theta[i]);
        breaks.push_back(theta[i] + std::max(limit[i], 0.0));
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // filled() is piecewise linear between consecutive breakpoints
    double lo = breaks.front();
    double level = lo;
    for (std::size_t b = 1; b < breaks.size(); ++b) {
        const double hi = breaks[b];
        if (filled(hi) >= budget) {
            std::size_t slope = 0;
            for (std::size_t i : members) {
                if (theta[i] <= lo && lo < theta[i] + std::max(limit[i], 0.0)) ++slope;
            }
            level = slope == 0 ? hi : std::min(hi, lo + (budget - filled(lo)) / static_cast<double>(slope));
            break;
        }
        lo = hi;
    }
    for (std::size_t i : members) alloc[i] = std::clamp(level - theta[i], 0.0, std::max(limit[i], 0.0));
    return alloc;
}

/// Chooses which basis the source feeds this step (nullptr: none available).
inline const Basis *choose_basis(SourcePolicy policy, std::span<const Basis> available, const NodeProgress &progress,
                                 Rng &rng) {
    if (available.empty()) return nullptr;
    if (policy == SourcePolicy::Random) return &available[rng.below(available.size())];
    auto mean = [&](const Basis &b) {
        double s = 0;
        for (std::size_t i : b.members) s += progress.theta[i];
        return s / static_cast<double>(b.members.size());
    };
    const Basis *best = &available.front();
    double best_mean = mean(*best);
    for (const auto &b : available.subspan(1)) {
        const double v = mean(b);
        if ((policy == SourcePolicy::MinData && v < best_mean) || (policy == SourcePolicy::MaxData && v > best_mean)) {
            best = &b;
            best_mean = v;
        }
    }
    return best;
}

/// f(s, i, t) for every node: the source's upload u_src evened out over one
/// basis (or over every online node under NoBasis), each node capped by its
/// download capacity. Returns all zeros when no basis is online.
inline std::vector<double> allocate_source(SourcePolicy policy, std::span<const Basis> available,
                                           const NodeProgress &progress, double u_src,
                                           std::span<const Capacity> caps, std::span<const std::uint8_t> online,
                                           Rng &rng) {
    const std::size_t n = progress.nodes();
    std::vector<double> limit(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) limit[i] = caps[i].download;
    if (!(u_src > 0)) return std::vector<double>(n + 1, 0.0);

    std::vector<std::size_t> members;
    if (policy == SourcePolicy::NoBasis) {
        for (std::size_t i = 1; i <= n; ++i) {
            if (i < online.size() && online[i]) members.push_back(i);
        }
    } else if (const Basis *b = choose_basis(policy, available, progress, rng)) {
        members = b->members;
    }
    return water_fill(members, progress.theta, limit, u_src);
}

/// Orders the available triplets for the engine. Ties fall back to the
/// canonical (i, j, k) order; Random draws from the run's stream.
inline std::vector<Triplet> sort_triplets(TripletPolicy policy, std::span<const Triplet> available,
                                          const NodeProgress &progress, std::span<const Capacity> caps, Rng &rng) {
    std::vector<Triplet> out(available.begin(), available.end());
    std::sort(out.begin(), out.end());
    const auto &theta = progress.theta;
    switch (policy) {
        case TripletPolicy::Random:
            rng.shuffle(out.begin(), out.end());
            break;
        case TripletPolicy::MinData:
            std::stable_sort(out.begin(), out.end(),
                             [&](const Triplet &a, const Triplet &b) { return theta[a.dst] < theta[b.dst]; });
            break;
        case TripletPolicy::MaxData:
            std::stable_sort(out.begin(), out.end(),
                             [&](const Triplet &a, const Triplet &b) { return theta[a.dst] > theta[b.dst]; });
            break;
        case TripletPolicy::MaxFlow: {
            auto key = [&](const Triplet &c) {
                return std::max(0.0, std::min({caps[c.src_a].upload, caps[c.src_b].upload, caps[c.dst].download,
                                               theta[c.src_a] - theta[c.dst], theta[c.src_b] - theta[c.dst]}));
            };
            std::vector<std::pair<double, Triplet>> keyed;
            keyed.reserve(out.size());
            for (const auto &c : out) keyed.emplace_back(key(c), c);
            std::stable_sort(keyed.begin(), keyed.end(),
                             [](const auto &a, const auto &b) { return a.first > b.first; });
            for (std::size_t p = 0; p < out.size(); ++p) out[p] = keyed[p].second;
            break;
        }
    }
    return out;
}

} // namespace hsrc
