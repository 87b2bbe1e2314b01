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
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsrc/combinatorics.hpp"
#include "hsrc/schedule.hpp"
#include "hsrc/trace.hpp"

namespace hsrc {

enum class ViolationKind {
    DuplicateData,      // destination already held some of the delivered bits
    CircularDependency, // a triplet source did not hold the range it was asked to xor
    CapacityExceeded,   // source upload, node upload or node download budget overrun
    InvalidTriplet,     // (i, j) -> k is not a triplet of the code
    BadRecord,          // malformed step or node id
};

inline std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::DuplicateData: return "duplicate-data";
        case ViolationKind::CircularDependency: return "circular-dependency";
        case ViolationKind::CapacityExceeded: return "capacity-exceeded";
        case ViolationKind::InvalidTriplet: return "invalid-triplet";
        case ViolationKind::BadRecord: return "bad-record";
    }
    return "unknown";
}

struct Violation {
    ViolationKind kind;
    std::size_t step = 0;
    std::size_t line = 0;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::size_t records = 0;

    bool ok() const { return violations.empty(); }

    std::size_t count(ViolationKind kind) const {
        return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                      [&](const Violation &v) { return v.kind == kind; }));
    }
};

namespace detail {

inline double tolerance(double scale) { return 1e-6 + 1e-9 * std::abs(scale); }

/// Union of half-open bit ranges [a, b) held by one node.
class HeldRanges {
  public:
    double prefix_end() const {
        if (ranges_.empty() || ranges_.front().first > tolerance(0)) return 0.0;
        return ranges_.front().second;
    }

    double overlap(double a, double b) const {
        double total = 0;
        for (const auto &[lo, hi] : ranges_) total += std::max(0.0, std::min(hi, b) - std::max(lo, a));
        return total;
    }

    bool covers(double a, double b) const { return overlap(a, b) >= (b - a) - tolerance(b); }

    void add(double a, double b) {
        if (!(b > a)) return;
        ranges_.emplace_back(a, b);
        std::sort(ranges_.begin(), ranges_.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto &r : ranges_) {
            if (!merged.empty() && r.first <= merged.back().second + tolerance(r.first)) {
                merged.back().second = std::max(merged.back().second, r.second);
            } else {
                merged.push_back(r);
            }
        }
        ranges_ = std::move(merged);
    }

  private:
    std::vector<std::pair<double, double>> ranges_;
};

} // namespace detail

/// Replays transfer records in order and reports every transfer that
/// (a) delivers bits the destination already holds, (b) asks a triplet's
/// sources to xor bits they do not hold yet, or (c) overruns a step's
/// capacities. Node holdings are tracked as bit ranges of each fragment.
inline ValidationReport validate_records(std::span<const TransferRecord> records, const AvailabilityTrace &trace,
                                         const TripletSet &triplets) {
    ValidationReport report;
    report.records = records.size();
    const std::size_t n = trace.nodes();
    std::vector<detail::HeldRanges> held(n + 1);

    struct StepUse {
        double source = 0;
        std::vector<double> up, down;
    };
    auto fresh = [&] { return StepUse{0.0, std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)}; };
    StepUse use = fresh();
    std::size_t current_step = 0;
    bool any = false;

    auto add = [&](ViolationKind kind, const TransferRecord &r, std::string detail) {
        report.violations.push_back({kind, r.step, r.line, std::move(detail)});
    };

    auto check_capacity = [&](std::size_t t) {
        if (t >= trace.steps()) return;
        const auto caps = capacities(trace, t);
        auto flag = [&](std::string what) {
            report.violations.push_back({ViolationKind::CapacityExceeded, t, 0, std::move(what)});
        };
        if (use.source > caps[0].upload + detail::tolerance(caps[0].upload)) {
            flag("source uploads " + detail::format_double(use.source) + " > u(s,t)=" +
                 detail::format_double(caps[0].upload));
        }
        for (std::size_t i = 1; i <= n; ++i) {
            if (use.up[i] > caps[i].upload + detail::tolerance(caps[i].upload)) {
                flag("node " + std::to_string(i) + " uploads " + detail::format_double(use.up[i]) +
                     " > u(i,t)=" + detail::format_double(caps[i].upload));
            }
            if (use.down[i] > caps[i].download + detail::tolerance(caps[i].download)) {
                flag("node " + std::to_string(i) + " downloads " + detail::format_double(use.down[i]) +
                     " > d(i,t)=" + detail::format_double(caps[i].download));
            }
        }
    };

    for (const auto &r : records) {
        if (any && r.step < current_step) {
            add(ViolationKind::BadRecord, r, "records are not in step order");
            continue;
        }
        if (r.step >= trace.steps()) {
            add(ViolationKind::BadRecord, r, "step beyond the trace horizon");
            continue;
        }
        if (!any || r.step != current_step) {
            if (any) check_capacity(current_step);
            use = fresh();
            current_step = r.step;
            any = true;
        }
        auto bad_node = [&](std::size_t id) { return id < 1 || id > n; };
        if (bad_node(r.dst) || (!r.from_source && (bad_node(r.src_a) || bad_node(r.src_b)))) {
            add(ViolationKind::BadRecord, r, "node id outside 1.." + std::to_string(n));
            continue;
        }
        if (!(r.bits > 0)) continue;

        const double begin = r.offset.value_or(held[r.dst].prefix_end());
        const double end = begin + r.bits;

        if (r.from_source) {
            use.source += r.bits;
            use.down[r.dst] += r.bits;
        } else {
            const Triplet c = Triplet::make(r.src_a, r.src_b, r.dst);
            if (!triplets.contains(c)) {
                add(ViolationKind::InvalidTriplet, r,
                    "(" + std::to_string(r.src_a) + "," + std::to_string(r.src_b) + ")->" + std::to_string(r.dst) +
                        " is not a triplet of the code");
                continue;
            }
            use.up[r.src_a] += r.bits;
            use.up[r.src_b] += r.bits;
            use.down[r.dst] += 2.0 * r.bits;
            for (std::size_t src : {r.src_a, r.src_b}) {
                if (!held[src].covers(begin, end)) {
                    add(ViolationKind::CircularDependency, r,
                        "node " + std::to_string(src) + " does not hold bits [" + detail::format_double(begin) + ", " +
                            detail::format_double(end) + ") needed to generate data for node " +
                            std::to_string(r.dst));
                }
            }
        }
        const double dup = held[r.dst].overlap(begin, end);
        if (dup > detail::tolerance(end)) {
            add(ViolationKind::DuplicateData, r,
                "node " + std::to_string(r.dst) + " already holds " + detail::format_double(dup) + " of bits [" +
                    detail::format_double(begin) + ", " + detail::format_double(end) + ")");
        }
        held[r.dst].add(begin, end);
    }
    if (any) check_capacity(current_step);
    return report;
}

inline ValidationReport validate_schedule(const Schedule &sched, const AvailabilityTrace &trace,
                                          const TripletSet &triplets) {
    const auto records = to_records(sched);
    return validate_records(records, trace, triplets);
}

} // namespace hsrc
