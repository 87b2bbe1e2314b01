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

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hsrc/codec.hpp"
#include "hsrc/error.hpp"
#include "hsrc/schedule.hpp"
#include "hsrc/validator.hpp"

namespace hsrc {

/// Chunks each node holds after replaying a schedule with real data.
struct ReplayResult {
    std::vector<Fragment> held; // held[i] for node i, slot 0 unused
    std::vector<double> theta;
};

/// Replays prefix-ordered transfer records at chunk granularity. A chunk is
/// materialized once its last bit arrives: from `encoded` for source
/// transfers, or as the xor of the two sources' copies for triplet
/// transfers, which must already hold it. `encoded` must have enough rows
/// for every node's final prefix.
inline ReplayResult replay_chunks(std::span<const TransferRecord> records, const CodeParams &params,
                                  const FragmentSet &encoded) {
    const std::size_t n = params.n();
    const double chunk_bits = params.m();
    ReplayResult out;
    out.held.assign(n + 1, Fragment{});
    out.theta.assign(n + 1, 0.0);
    for (const auto &r : records) {
        if (r.dst < 1 || r.dst > n) throw Error(ErrorCode::InvalidArgument, "record destination out of range");
        if (r.offset && std::abs(*r.offset - out.theta[r.dst]) > detail::tolerance(*r.offset)) {
            throw Error(ErrorCode::InvalidArgument, "chunk replay requires in-order delivery");
        }
        const double next = out.theta[r.dst] + r.bits;
        const auto complete = static_cast<std::size_t>(std::floor((next + detail::tolerance(next)) / chunk_bits));
        auto &dst = out.held[r.dst];
        while (dst.size() < complete) {
            const std::size_t c = dst.size();
            if (c >= encoded.rows()) throw Error(ErrorCode::InvalidArgument, "encoded object too short for replay");
            if (r.from_source) {
                dst.push_back(encoded.fragment(r.dst)[c]);
            } else {
                const auto &a = out.held.at(r.src_a);
                const auto &b = out.held.at(r.src_b);
                if (a.size() <= c || b.size() <= c) {
                    throw Error(ErrorCode::InvalidArgument, "chunk " + std::to_string(c) + " for node " +
                                                                std::to_string(r.dst) + " needed before its sources held it");
                }
                dst.push_back(a[c] ^ b[c]);
            }
        }
        out.theta[r.dst] = next;
    }
    return out;
}

} // namespace hsrc
