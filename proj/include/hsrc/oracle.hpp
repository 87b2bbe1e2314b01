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
#include <numeric>
#include <span>
#include <vector>

#include "hsrc/combinatorics.hpp"
#include "hsrc/error.hpp"
#include "hsrc/schedule.hpp"
#include "hsrc/trace.hpp"

namespace hsrc {

inline constexpr std::size_t kOracleMaxNodes = 3;
inline constexpr std::size_t kOracleMaxSteps = 5;
inline constexpr std::size_t kOracleMaxTriplets = 3;

/// Exhaustive search over every ordering of the triplet set at every step,
/// with the source flows held fixed. Returns the largest achievable stored
/// size and, among orderings reaching it, the least traffic. Only tiny
/// instances are accepted: the search runs (|C|!)^steps engine steps.
inline Metrics brute_force_oracle(const CodeContext &ctx, const AvailabilityTrace &trace,
                                  std::span<const std::vector<double>> source_flows, std::size_t horizon) {
    const std::size_t n = ctx.params.n();
    if (n > kOracleMaxNodes || horizon > kOracleMaxSteps || ctx.triplets.size() > kOracleMaxTriplets) {
        throw Error(ErrorCode::OracleOverflow, "oracle accepts n <= 3, horizon <= 5 and |C| <= 3 only");
    }
    if (trace.nodes() != n || horizon > trace.steps() || source_flows.size() < horizon) {
        throw Error(ErrorCode::InvalidArgument, "trace or source flows shorter than the oracle horizon");
    }

    std::vector<std::vector<Capacity>> caps;
    for (std::size_t t = 0; t < horizon; ++t) caps.push_back(capacities(trace, t));
    const std::vector<Triplet> all(ctx.triplets.all().begin(), ctx.triplets.all().end());

    Metrics best;
    best.steps = horizon;
    best.tau = trace.tau();
    best.stored_bits = -1.0;
    const double k = static_cast<double>(ctx.params.k());

    auto search = [&](auto &&self, std::size_t t, const NodeProgress &progress, double source_bits,
                      double triplet_bits) -> void {
        if (t == horizon) {
            const double stored = progress.min_theta() * k;
            const double traffic = source_bits + 2.0 * triplet_bits;
            const double eps = 1e-9 * std::max(1.0, stored);
            if (stored > best.stored_bits + eps ||
                (stored >= best.stored_bits - eps && traffic < best.total_traffic)) {
                best.stored_bits = stored;
                best.total_traffic = traffic;
                best.source_bits = source_bits;
                best.triplet_bits = triplet_bits;
            }
            return;
        }
        std::vector<std::size_t> order(all.size());
        std::iota(order.begin(), order.end(), 0);
        do {
            std::vector<Triplet> sorted;
            for (std::size_t p : order) sorted.push_back(all[p]);
            NodeProgress next = progress;
            const auto plan = run_step(next, sorted, source_flows[t], caps[t]);
            self(self, t + 1, next, source_bits + plan.source_total(), triplet_bits + plan.triplet_total());
        } while (std::next_permutation(order.begin(), order.end()));
    };
    search(search, 0, NodeProgress(n), 0.0, 0.0);
    return best;
}

} // namespace hsrc
