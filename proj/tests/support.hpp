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

// Shared fixtures for the unit tests.

#pragma once

#include <cstdint>
#include <vector>

#include "hsrc/hsrc.hpp"

namespace hsrc::testing {

inline DataObject random_object(Rng &rng, std::size_t bytes) {
    std::vector<std::uint8_t> data(bytes);
    for (auto &b : data) b = static_cast<std::uint8_t>(rng.below(256));
    return DataObject::from_bytes(std::move(data));
}

/// First `bits` bits of `obj`, trailing bits of the last byte cleared.
inline DataObject prefix_of(const DataObject &obj, std::uint64_t bits) {
    DataObject out;
    out.bits = bits;
    out.bytes.assign(obj.bytes.begin(), obj.bytes.begin() + static_cast<std::ptrdiff_t>((bits + 7) / 8));
    if (bits % 8) out.bytes.back() &= static_cast<std::uint8_t>(0xFF00u >> (bits % 8));
    return out;
}

/// Every node (and the source) online at every step with the given rates.
inline AvailabilityTrace uniform_trace(std::size_t nodes, std::size_t steps, double node_up_bps, double node_down_bps,
                                       double source_up_bps, double tau = 1.0) {
    AvailabilityTrace trace(nodes, steps, tau);
    for (std::size_t t = 0; t < steps; ++t) {
        trace.set(0, t, true, source_up_bps, 0.0);
        for (std::size_t i = 1; i <= nodes; ++i) trace.set(i, t, true, node_up_bps, node_down_bps);
    }
    return trace;
}

/// Random availability (source always online) with random bandwidths.
inline AvailabilityTrace random_trace(Rng &rng, std::size_t nodes, std::size_t steps, double q) {
    AvailabilityTrace trace(nodes, steps, 1.0);
    for (std::size_t t = 0; t < steps; ++t) {
        trace.set(0, t, true, rng.uniform(1, 100), 0.0);
        for (std::size_t i = 1; i <= nodes; ++i) {
            const double up = rng.uniform(1, 60);
            trace.set(i, t, rng.bernoulli(q), up, up * rng.uniform(0.5, 4));
        }
    }
    return trace;
}

/// The two schedules of the motivating counterexample at <7,3> with chunks
/// of `chunk` bits. Nodes 1, 2, 3 hold chunk 0 after step 0. In the first,
/// the source also hands chunk 0 to 5, 6, 7 at step 1 and the triplets
/// (1,6)->7, (2,7)->5, (3,5)->6 deliver it again. In the second, nothing
/// reaches 5, 6, 7 before the triplets fire, so each waits on another.
inline std::vector<TransferRecord> duplicate_data_schedule(double chunk) {
    std::vector<TransferRecord> r;
    for (std::size_t i : {1u, 2u, 3u}) r.push_back({0, true, 0, 0, i, chunk, 0.0, 0});
    for (std::size_t i : {5u, 6u, 7u}) r.push_back({1, true, 0, 0, i, chunk, 0.0, 0});
    r.push_back({1, false, 1, 6, 7, chunk, 0.0, 0});
    r.push_back({1, false, 2, 7, 5, chunk, 0.0, 0});
    r.push_back({1, false, 3, 5, 6, chunk, 0.0, 0});
    return r;
}

inline std::vector<TransferRecord> circular_schedule(double chunk) {
    std::vector<TransferRecord> r;
    for (std::size_t i : {1u, 2u, 3u}) r.push_back({0, true, 0, 0, i, chunk, std::nullopt, 0});
    r.push_back({1, false, 1, 6, 7, chunk, std::nullopt, 0});
    r.push_back({1, false, 2, 7, 5, chunk, std::nullopt, 0});
    r.push_back({1, false, 3, 5, 6, chunk, std::nullopt, 0});
    return r;
}

/// Engine-produced schedule on a random instance with a random triplet order per step.
inline Schedule random_engine_schedule(Rng &rng, const CodeContext &ctx, const AvailabilityTrace &trace) {
    const std::size_t n = ctx.params.n();
    NodeProgress progress(n);
    Schedule sched{n, trace.tau(), {}};
    for (std::size_t t = 0; t < trace.steps(); ++t) {
        const auto caps = capacities(trace, t);
        const auto online = trace.row(t);
        const auto bases = available_bases(ctx.bases, online);
        const auto policy = static_cast<SourcePolicy>(rng.below(4));
        const auto flows = allocate_source(policy, bases, progress, caps[0].upload, caps, online, rng);
        auto order = available_triplets(ctx.triplets, online);
        rng.shuffle(order.begin(), order.end());
        sched.steps.push_back(run_step(progress, order, flows, caps));
    }
    return sched;
}

} // namespace hsrc::testing
