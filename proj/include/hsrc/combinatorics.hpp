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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hsrc/codec.hpp"
#include "hsrc/gf.hpp"

namespace hsrc {

/// Per-node online flags indexed by node id; slot 0 is the source.
using Availability = std::vector<std::uint8_t>;

/// Redundancy generation rule (src_a, src_b) -> dst, i.e. r_dst = r_src_a + r_src_b.
/// Stored canonically with src_a < src_b.
struct Triplet {
    std::size_t src_a = 0;
    std::size_t src_b = 0;
    std::size_t dst = 0;

    static Triplet make(std::size_t a, std::size_t b, std::size_t dst) {
        return a < b ? Triplet{a, b, dst} : Triplet{b, a, dst};
    }

    bool involves_source(std::size_t node) const noexcept { return src_a == node || src_b == node; }

    friend auto operator<=>(const Triplet &, const Triplet &) = default;
};

/// Every canonical triplet of a code plus the out-creation O(i) and
/// in-creation I(k) indexes.
class TripletSet {
  public:
    TripletSet() = default;

    explicit TripletSet(const CodeParams &params) : nodes_(params.n()), by_out_(params.n() + 1), by_in_(params.n() + 1) {
        for (std::size_t i = 1; i <= params.n(); ++i) {
            for (std::size_t j = i + 1; j <= params.n(); ++j) {
                auto k = params.index_of(params.alpha(i) ^ params.alpha(j));
                if (!k) continue;
                const std::size_t pos = all_.size();
                all_.push_back(Triplet{i, j, *k});
                by_out_[i].push_back(pos);
                by_out_[j].push_back(pos);
                by_in_[*k].push_back(pos);
            }
        }
        // pair scan order is not lexicographic in (a, b, dst) once dst varies
        std::vector<std::size_t> order(all_.size());
        for (std::size_t p = 0; p < order.size(); ++p) order[p] = p;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return all_[x] < all_[y]; });
        std::vector<std::size_t> rank(order.size());
        std::vector<Triplet> sorted(all_.size());
        for (std::size_t p = 0; p < order.size(); ++p) {
            sorted[p] = all_[order[p]];
            rank[order[p]] = p;
        }
        all_ = std::move(sorted);
        for (auto *index : {&by_out_, &by_in_}) {
            for (auto &list : *index) {
                for (auto &pos : list) pos = rank[pos];
                std::sort(list.begin(), list.end());
            }
        }
    }

    std::size_t nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return all_.size(); }
    std::span<const Triplet> all() const noexcept { return all_; }

    /// O(i): triplets in which node i is one of the two sources.
    std::vector<Triplet> out_creation(std::size_t node) const { return gather(by_out_.at(node)); }
    /// I(k): triplets whose destination is node k.
    std::vector<Triplet> in_creation(std::size_t node) const { return gather(by_in_.at(node)); }

    bool contains(const Triplet &t) const {
        auto c = Triplet::make(t.src_a, t.src_b, t.dst);
        return std::binary_search(all_.begin(), all_.end(), c);
    }

  private:
    std::vector<Triplet> gather(const std::vector<std::size_t> &positions) const {
        std::vector<Triplet> out;
        out.reserve(positions.size());
        for (std::size_t p : positions) out.push_back(all_[p]);
        return out;
    }

    std::size_t nodes_ = 0;
    std::vector<Triplet> all_;
    std::vector<std::vector<std::size_t>> by_out_;
    std::vector<std::vector<std::size_t>> by_in_;
};

inline TripletSet build_triplets(const CodeParams &params) { return TripletSet(params); }

/// k node indices (ascending) whose evaluation points are independent over F_2.
struct Basis {
    std::vector<std::size_t> members;

    friend auto operator<=>(const Basis &, const Basis &) = default;
};

/// All bases in lexicographic order.
inline std::vector<Basis> enumerate_bases(const CodeParams &params) {
    std::vector<Basis> out;
    std::vector<std::size_t> current;
    std::vector<gf::Element> points;
    auto recurse = [&](auto &&self, std::size_t next) -> void {
        if (current.size() == params.k()) {
            out.push_back(Basis{current});
            return;
        }
        const std::size_t needed = params.k() - current.size();
        for (std::size_t i = next; i + needed <= params.n() + 1; ++i) {
            points.push_back(params.alpha(i));
            if (gf::rank_over_f2(points) == points.size()) {
                current.push_back(i);
                self(self, i + 1);
                current.pop_back();
            }
            points.pop_back();
        }
    };
    recurse(recurse, 1);
    return out;
}

inline bool all_online(std::span<const std::size_t> nodes, std::span<const std::uint8_t> online) {
    return std::all_of(nodes.begin(), nodes.end(), [&](std::size_t i) { return i < online.size() && online[i]; });
}

inline std::vector<Basis> available_bases(std::span<const Basis> bases, std::span<const std::uint8_t> online) {
    std::vector<Basis> out;
    for (const auto &b : bases) {
        if (all_online(b.members, online)) out.push_back(b);
    }
    return out;
}

inline std::vector<Triplet> available_triplets(const TripletSet &ts, std::span<const std::uint8_t> online) {
    std::vector<Triplet> out;
    for (const auto &t : ts.all()) {
        const std::size_t nodes[] = {t.src_a, t.src_b, t.dst};
        if (all_online(nodes, online)) out.push_back(t);
    }
    return out;
}

/// Code parameters with their triplet set and bases, built once and shared
/// read-only by every simulation run over the same code.
struct CodeContext {
    CodeParams params;
    TripletSet triplets;
    std::vector<Basis> bases;

    static std::shared_ptr<const CodeContext> build(CodeParams params) {
        TripletSet ts(params);
        auto bases = enumerate_bases(params);
        return std::make_shared<const CodeContext>(CodeContext{std::move(params), std::move(ts), std::move(bases)});
    }
};

} // namespace hsrc
