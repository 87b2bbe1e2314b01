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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hsrc/combinatorics.hpp"
#include "hsrc/error.hpp"
#include "hsrc/policies.hpp"
#include "hsrc/rng.hpp"
#include "hsrc/schedule.hpp"
#include "hsrc/trace.hpp"

namespace hsrc {

struct RunResult {
    Schedule schedule;
    NodeProgress progress;
    Metrics metrics;
};

/// Source flows f(s, i, t) of every step of a schedule.
inline std::vector<std::vector<double>> source_flows_of(const Schedule &sched) {
    std::vector<std::vector<double>> out;
    for (const auto &step : sched.steps) out.push_back(step.source_flows);
    return out;
}

namespace detail {

inline void check_trace_matches(const CodeContext &ctx, const AvailabilityTrace &trace) {
    trace.validate();
    if (trace.nodes() != ctx.params.n()) {
        throw Error(ErrorCode::InvalidArgument, "trace has " + std::to_string(trace.nodes()) + " storage nodes, code needs " +
                                                    std::to_string(ctx.params.n()));
    }
}

/// One backup process over the whole trace. Without a triplet policy no
/// in-network generation happens (the naive process).
inline RunResult simulate(const CodeContext &ctx, const AvailabilityTrace &trace, SourcePolicy source,
                          std::optional<TripletPolicy> triplets, std::uint64_t seed) {
    check_trace_matches(ctx, trace);
    const std::size_t n = ctx.params.n();
    Rng rng(seed);
    RunResult out;
    out.progress = NodeProgress(n);
    out.schedule.nodes = n;
    out.schedule.tau = trace.tau();
    for (std::size_t t = 0; t < trace.steps(); ++t) {
        const auto caps = capacities(trace, t);
        const auto online = trace.row(t);
        const auto bases = source == SourcePolicy::NoBasis ? std::vector<Basis>{} : available_bases(ctx.bases, online);
        const auto flows = allocate_source(source, bases, out.progress, caps[0].upload, caps, online, rng);

        std::vector<Triplet> order;
        if (triplets) {
            // sort against theta and budgets as they stand once the source flows land
            NodeProgress after = out.progress;
            auto remaining = caps;
            for (std::size_t i = 1; i <= n; ++i) {
                after.theta[i] += flows[i];
                remaining[i].download = std::max(remaining[i].download - flows[i], 0.0);
            }
            order = sort_triplets(*triplets, available_triplets(ctx.triplets, online), after, remaining, rng);
        }
        out.schedule.steps.push_back(run_step(out.progress, order, flows, caps));
    }
    out.metrics = compute_metrics(out.schedule, out.progress, ctx.params.k());
    return out;
}

} // namespace detail

inline RunResult simulate_policy(const CodeContext &ctx, const AvailabilityTrace &trace, const PolicyConfig &policy) {
    return detail::simulate(ctx, trace, policy.source, policy.triplets, policy.rng_seed);
}

/// The naive process: the source evens its upload out over every online
/// node and nothing is generated in-network.
inline RunResult simulate_naive(const CodeContext &ctx, const AvailabilityTrace &trace) {
    return detail::simulate(ctx, trace, SourcePolicy::NoBasis, std::nullopt, 0);
}

inline Metrics run_naive(const CodeContext &ctx, const AvailabilityTrace &trace) {
    return simulate_naive(ctx, trace).metrics;
}

enum class TraceKind { Synthetic, Csv, Load };

struct TraceSource {
    TraceKind kind = TraceKind::Synthetic;
    SynthSpec synth;
    std::string path;             // Csv / Load
    double percentile = 0.5;      // Load
    LoadBandwidth load_bandwidth; // Load
    std::optional<double> min_daily_hours;
    std::string label = "synth:";
};

struct ExperimentConfig {
    std::size_t n = 7;
    std::size_t k = 3;
    unsigned m = 8;
    std::vector<PolicyConfig> policies = table_policies();
    TraceSource trace;
    std::size_t runs = 500;
    std::size_t steps = 120;
    double tau = 3600.0;
    std::uint64_t seed = 1;
    SourceSettings source;
    std::size_t jobs = 1;
};

struct Summary {
    double mean = 0.0;
    double stdev = 0.0; // sample standard deviation, 0 for a single run
};

inline Summary summarize(const std::vector<double> &values) {
    Summary s;
    if (values.empty()) return s;
    double sum = 0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.stdev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return s;
}

/// 100 (value - base) / base, or 0 when the baseline is 0.
inline double percent_change(double value, double base) { return base > 0 ? 100.0 * (value - base) / base : 0.0; }

struct PolicyRun {
    Metrics metrics;
    double stored_gain_pct = 0;
    double traffic_increment_pct = 0;
    double source_reduction_pct = 0;
};

inline PolicyRun compare_to_naive(const Metrics &policy, const Metrics &naive) {
    PolicyRun r;
    r.metrics = policy;
    r.stored_gain_pct = percent_change(policy.stored_bits, naive.stored_bits);
    r.traffic_increment_pct = percent_change(policy.traffic_per_useful(), naive.traffic_per_useful());
    r.source_reduction_pct = -percent_change(policy.source_per_useful(), naive.source_per_useful());
    return r;
}

struct RunRecord {
    std::size_t run = 0;
    Metrics naive;
    std::vector<PolicyRun> policies; // same order as ExperimentConfig::policies
};

struct PolicyAggregate {
    std::string name;
    Summary stored_bits;
    Summary stored_gain_pct;
    Summary traffic_increment_pct;
    Summary source_reduction_pct;
};

struct ComparisonReport {
    ExperimentConfig config;
    Summary naive_stored_bits;
    std::vector<PolicyAggregate> policies;
    std::vector<RunRecord> runs;
};

/// Loads the CSV or load-derived trace an experiment draws its instances from.
inline AvailabilityTrace load_base_trace(const ExperimentConfig &config) {
    AvailabilityTrace base;
    if (config.trace.kind == TraceKind::Csv) {
        base = load_trace_csv(config.trace.path, config.tau);
    } else if (config.trace.kind == TraceKind::Load) {
        base = derive_from_load(load_load_csv(config.trace.path), config.trace.percentile, config.trace.load_bandwidth,
                                config.tau);
    } else {
        throw Error(ErrorCode::InvalidArgument, "synthetic traces have no base trace");
    }
    if (config.trace.min_daily_hours) base = filter_by_daily_hours(base, *config.trace.min_daily_hours);
    if (base.nodes() < config.n) {
        throw Error(ErrorCode::InvalidArgument, "trace keeps " + std::to_string(base.nodes()) + " storage nodes, need " +
                                                    std::to_string(config.n));
    }
    if (base.steps() < config.steps) {
        throw Error(ErrorCode::InvalidArgument, "trace has " + std::to_string(base.steps()) + " steps, need " +
                                                    std::to_string(config.steps));
    }
    return base;
}

/// Trace seen by run `run`: a fresh synthetic draw, or a window of the base
/// trace (n nodes sampled without replacement, random start step).
inline AvailabilityTrace trace_instance(const ExperimentConfig &config, const AvailabilityTrace *base, std::size_t run) {
    Rng rng(mix_seed(config.seed, run, 0));
    if (config.trace.kind == TraceKind::Synthetic) {
        return synth_trace(config.trace.synth, config.n, config.steps, config.tau, config.source, rng);
    }
    std::vector<std::size_t> ids(base->nodes());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i + 1;
    if (ids.size() > config.n) {
        for (std::size_t i = 0; i < config.n; ++i) std::swap(ids[i], ids[i + rng.below(ids.size() - i)]);
        ids.resize(config.n);
        std::sort(ids.begin(), ids.end());
    }
    const std::size_t first = base->steps() == config.steps ? 0 : rng.below(base->steps() - config.steps + 1);
    auto trace = select_window(*base, ids, first, config.steps);
    apply_source(trace, config.source);
    return trace;
}

inline RunRecord run_single(const ExperimentConfig &config, const CodeContext &ctx, const AvailabilityTrace *base,
                            std::size_t run) {
    const auto trace = trace_instance(config, base, run);
    RunRecord rec;
    rec.run = run;
    rec.naive = run_naive(ctx, trace);
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
        PolicyConfig policy = config.policies[p];
        policy.rng_seed = mix_seed(config.seed, run, 1 + p);
        rec.policies.push_back(compare_to_naive(simulate_policy(ctx, trace, policy).metrics, rec.naive));
    }
    return rec;
}

/// Runs naive and every configured policy on `runs` matched trace instances
/// and aggregates the comparison. Runs may execute on `jobs` threads; the
/// result depends only on the configuration.
inline ComparisonReport run_experiment(const ExperimentConfig &config) {
    if (config.runs == 0) throw Error(ErrorCode::InvalidArgument, "runs must be >= 1");
    if (config.steps == 0) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
    if (config.policies.empty()) throw Error(ErrorCode::InvalidArgument, "no policies configured");
    const auto ctx = CodeContext::build(CodeParams::standard(config.n, config.k, config.m));
    std::optional<AvailabilityTrace> base;
    if (config.trace.kind != TraceKind::Synthetic) base = load_base_trace(config);
    const AvailabilityTrace *base_ptr = base ? &*base : nullptr;

    std::vector<RunRecord> records(config.runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (std::size_t r = next++; r < config.runs; r = next++) records[r] = run_single(config, *ctx, base_ptr, r);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = config.runs;
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, config.runs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ComparisonReport report;
    report.config = config;
    report.runs = std::move(records);
    std::vector<double> naive_stored;
    for (const auto &rec : report.runs) naive_stored.push_back(rec.naive.stored_bits);
    report.naive_stored_bits = summarize(naive_stored);
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
        std::vector<double> stored, gain, traffic, source;
        for (const auto &rec : report.runs) {
            const auto &pr = rec.policies[p];
            stored.push_back(pr.metrics.stored_bits);
            gain.push_back(pr.stored_gain_pct);
            traffic.push_back(pr.traffic_increment_pct);
            source.push_back(pr.source_reduction_pct);
        }
        report.policies.push_back(
            {config.policies[p].name(), summarize(stored), summarize(gain), summarize(traffic), summarize(source)});
    }
    return report;
}

inline constexpr int kReportSchema = 1;

inline nlohmann::ordered_json to_json(const Summary &s) { return {{"mean", s.mean}, {"stdev", s.stdev}}; }

inline nlohmann::ordered_json to_json(const Metrics &m) {
    return {{"stored_bits", m.stored_bits},
            {"total_traffic", m.total_traffic},
            {"source_bits", m.source_bits},
            {"triplet_bits", m.triplet_bits},
            {"source_per_useful", m.source_per_useful()},
            {"traffic_per_useful", m.traffic_per_useful()},
            {"throughput_bps", m.throughput_bps()}};
}

inline nlohmann::ordered_json to_json(const ComparisonReport &report) {
    const auto &c = report.config;
    nlohmann::ordered_json policies = nlohmann::ordered_json::array();
    for (const auto &p : c.policies) policies.push_back(p.name());
    nlohmann::ordered_json trace = {{"spec", c.trace.label}};
    if (c.trace.kind == TraceKind::Load) trace["percentile"] = c.trace.percentile;
    if (c.trace.min_daily_hours) trace["min_daily_hours"] = *c.trace.min_daily_hours;

    nlohmann::ordered_json doc;
    doc["schema"] = kReportSchema;
    doc["config"] = {{"n", c.n},           {"k", c.k},
                     {"m", c.m},           {"policies", policies},
                     {"trace", trace},     {"runs", c.runs},
                     {"steps", c.steps},   {"tau", c.tau},
                     {"seed", c.seed},     {"source_up_bps", c.source.up_bps},
                     {"source_churn", c.source.churn}};
    doc["naive"] = {{"stored_bits", to_json(report.naive_stored_bits)}};
    nlohmann::ordered_json aggregates = nlohmann::ordered_json::array();
    for (const auto &a : report.policies) {
        aggregates.push_back({{"name", a.name},
                              {"stored_bits", to_json(a.stored_bits)},
                              {"stored_gain_pct", to_json(a.stored_gain_pct)},
                              {"traffic_increment_pct", to_json(a.traffic_increment_pct)},
                              {"source_reduction_pct", to_json(a.source_reduction_pct)}});
    }
    doc["policies"] = aggregates;
    return doc;
}

inline void write_raw_csv(std::ostream &out, const ComparisonReport &report) {
    out << "run,policy,stored_bits,total_traffic,source_bits,triplet_bits,stored_gain_pct,traffic_increment_pct,"
           "source_reduction_pct\n";
    auto row = [&](std::size_t run, const std::string &name, const Metrics &m, double g, double ti, double sr) {
        out << run << ',' << name << ',' << detail::format_double(m.stored_bits) << ','
            << detail::format_double(m.total_traffic) << ',' << detail::format_double(m.source_bits) << ','
            << detail::format_double(m.triplet_bits) << ',' << detail::format_double(g) << ','
            << detail::format_double(ti) << ',' << detail::format_double(sr) << '\n';
    };
    for (const auto &rec : report.runs) {
        row(rec.run, "naive", rec.naive, 0, 0, 0);
        for (std::size_t p = 0; p < rec.policies.size(); ++p) {
            const auto &pr = rec.policies[p];
            row(rec.run, report.policies[p].name, pr.metrics, pr.stored_gain_pct, pr.traffic_increment_pct,
                pr.source_reduction_pct);
        }
    }
}

} // namespace hsrc
