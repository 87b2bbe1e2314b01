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

// hsrc: encode/decode/repair fragment files and run insertion experiments.
//
// Exit status: 0 success, 1 usage error, 2 data error (parse, decode, I/O)
// or, for `validate`, a schedule with violations.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hsrc/hsrc.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_input(const std::string &path) { return hsrc::read_file_bytes(path); }

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw hsrc::Error(hsrc::ErrorCode::Io, "cannot write " + path);
    out << text;
    if (!out) throw hsrc::Error(hsrc::ErrorCode::Io, "short write to " + path);
}

std::pair<std::size_t, std::size_t> parse_pair(const std::string &text) {
    const auto parts = hsrc::detail::split(text, ',');
    if (parts.size() != 2) throw UsageError("--from expects IDX,IDX");
    try {
        return {hsrc::detail::parse_uint(parts[0], "index"), hsrc::detail::parse_uint(parts[1], "index")};
    } catch (const hsrc::Error &) {
        throw UsageError("--from expects IDX,IDX");
    }
}

// ---------------------------------------------------------------- encode

struct EncodeArgs {
    std::size_t n = 7, k = 3;
    unsigned m = 8;
    std::string in, out_dir;
};

int cmd_encode(const EncodeArgs &a) {
    const auto params = hsrc::CodeParams::standard(a.n, a.k, a.m);
    const auto obj = hsrc::DataObject::from_bytes(read_input(a.in));
    const auto set = hsrc::encode(obj, params);
    hsrc::write_fragment_set(a.out_dir, set, params);
    std::cout << "encoded " << obj.bits << " bits into " << params.n() << " fragments of " << set.rows()
              << " chunks in " << a.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------- decode

struct DecodeArgs {
    std::string in_dir, out;
};

int cmd_decode(const DecodeArgs &a) {
    const auto files = hsrc::read_fragment_dir(a.in_dir);
    if (files.empty()) throw hsrc::Error(hsrc::ErrorCode::InsufficientFragments, "no fragment files in " + a.in_dir);
    const auto &header = files.begin()->second.header;
    const auto params = hsrc::params_from_header(header);
    std::map<std::size_t, hsrc::Fragment> available;
    for (const auto &[idx, file] : files) available.emplace(idx, file.chunks);
    const auto obj = hsrc::decode(available, params, header.object_bits);
    hsrc::write_file_bytes(a.out, obj.bytes);
    std::cout << "decoded " << obj.bits << " bits from " << available.size() << " fragments\n";
    return 0;
}

// ---------------------------------------------------------------- repair

struct RepairArgs {
    std::string dir, from, out;
    std::size_t target = 0;
};

int cmd_repair(const RepairArgs &a) {
    const auto [ia, ib] = parse_pair(a.from);
    auto load = [&](std::size_t idx) {
        return hsrc::parse_fragment(hsrc::read_file_bytes(hsrc::fragment_path(a.dir, idx)));
    };
    const auto fa = load(ia);
    const auto fb = load(ib);
    auto ref = fa.header;
    ref.node_index = fb.header.node_index;
    if (!(ref == fb.header)) throw hsrc::Error(hsrc::ErrorCode::Parse, "fragment headers disagree");
    const auto params = hsrc::params_from_header(fa.header);
    hsrc::FragmentFile out{fa.header, hsrc::repair(ia, fa.chunks, ib, fb.chunks, a.target, params)};
    out.header.node_index = static_cast<std::uint32_t>(a.target);
    const std::string path = a.out.empty() ? hsrc::fragment_path(a.dir, a.target).string() : a.out;
    hsrc::write_file_bytes(path, hsrc::serialize_fragment(out));
    std::cout << "repaired fragment " << a.target << " from (" << ia << "," << ib << ") into " << path << "\n";
    return 0;
}

// ---------------------------------------------------------------- traces

struct TraceArgs {
    std::string trace = "synth:";
    std::string load;
    double percentile = 0.5;
    std::string node_bw = "1Gbps";
    double min_daily_hours = -1;
    std::size_t steps = 120;
    double tau = 3600;
    std::uint64_t seed = 1;
    std::string source_up = "100Kbps";
    bool source_churn = false;
};

void add_trace_options(CLI::App *cmd, TraceArgs &t) {
    cmd->add_option("--trace", t.trace,
                    "synth:q=<p>,up=<lo>-<hi>Kbps,down=x<mult>[,model=onoff,on=<steps>,off=<steps>] or an availability CSV")
        ->capture_default_str();
    cmd->add_option("--load", t.load, "load CSV (node_id,step,load); availability = load below the percentile");
    cmd->add_option("--percentile", t.percentile, "load percentile p in (0,1) for --load")->capture_default_str();
    cmd->add_option("--node-bw", t.node_bw, "symmetric node bandwidth for --load traces")->capture_default_str();
    cmd->add_option("--min-daily-hours", t.min_daily_hours, "keep nodes online at least this many hours per day");
    cmd->add_option("--steps", t.steps, "time steps per backup process")->capture_default_str();
    cmd->add_option("--tau", t.tau, "seconds per time step")->capture_default_str();
    cmd->add_option("--seed", t.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--source-up", t.source_up, "source upload bandwidth, e.g. 100Kbps")->capture_default_str();
    cmd->add_flag("--source-churn", t.source_churn, "source follows its own trace row instead of staying online");
}

hsrc::TraceSource trace_source(const TraceArgs &t) {
    hsrc::TraceSource src;
    if (!t.load.empty()) {
        src.kind = hsrc::TraceKind::Load;
        src.path = t.load;
        src.percentile = t.percentile;
        const double bw = hsrc::detail::parse_rate(t.node_bw);
        src.load_bandwidth = {bw, bw};
        std::ostringstream label;
        label << "load:" << t.load << ",p=" << t.percentile;
        src.label = label.str();
    } else if (t.trace.rfind("synth:", 0) == 0) {
        src.kind = hsrc::TraceKind::Synthetic;
        src.synth = hsrc::parse_synth_spec(t.trace);
        src.label = t.trace;
    } else {
        src.kind = hsrc::TraceKind::Csv;
        src.path = t.trace;
        src.label = "csv:" + t.trace;
    }
    if (t.min_daily_hours >= 0) src.min_daily_hours = t.min_daily_hours;
    return src;
}

struct GenTraceArgs {
    TraceArgs trace;
    std::size_t n = 7;
    std::string out;
};

int cmd_gen_trace(const GenTraceArgs &a) {
    hsrc::ExperimentConfig config;
    config.n = a.n;
    config.trace = trace_source(a.trace);
    config.steps = a.trace.steps;
    config.tau = a.trace.tau;
    config.seed = a.trace.seed;
    config.source = {hsrc::detail::parse_rate(a.trace.source_up), a.trace.source_churn};
    std::optional<hsrc::AvailabilityTrace> base;
    if (config.trace.kind != hsrc::TraceKind::Synthetic) base = hsrc::load_base_trace(config);
    const auto trace = hsrc::trace_instance(config, base ? &*base : nullptr, 0);
    std::ostringstream out;
    hsrc::write_trace_csv(out, trace);
    if (a.out.empty()) std::cout << out.str();
    else write_text(a.out, out.str());
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    TraceArgs trace;
    std::size_t n = 7, k = 3;
    unsigned m = 8;
    std::vector<std::string> policies;
    std::string source_policy, triplet_policy;
    std::size_t runs = 500;
    std::size_t jobs = 1;
    std::string json, raw_out, dump_schedule, dump_trace;
};

int cmd_simulate(const SimulateArgs &a) {
    hsrc::ExperimentConfig config;
    config.n = a.n;
    config.k = a.k;
    config.m = a.m;
    config.trace = trace_source(a.trace);
    config.steps = a.trace.steps;
    config.tau = a.trace.tau;
    config.seed = a.trace.seed;
    config.runs = a.runs;
    config.jobs = a.jobs;
    config.source = {hsrc::detail::parse_rate(a.trace.source_up), a.trace.source_churn};
    config.policies.clear();
    for (const auto &p : a.policies) {
        for (auto name : hsrc::detail::split(p, ',')) config.policies.push_back(hsrc::parse_policy(name));
    }
    if (!a.source_policy.empty() || !a.triplet_policy.empty()) {
        hsrc::PolicyConfig pc;
        pc.source = hsrc::parse_source_policy(a.source_policy.empty() ? "random" : a.source_policy);
        pc.triplets = hsrc::parse_triplet_policy(a.triplet_policy.empty() ? "max-flow" : a.triplet_policy);
        config.policies.push_back(pc);
    }
    if (config.policies.empty()) config.policies = hsrc::table_policies();

    const auto report = hsrc::run_experiment(config);
    const std::string doc = hsrc::to_json(report).dump(2) + "\n";
    if (a.json.empty()) std::cout << doc;
    else write_text(a.json, doc);
    if (!a.raw_out.empty()) {
        std::ostringstream raw;
        hsrc::write_raw_csv(raw, report);
        write_text(a.raw_out, raw.str());
    }
    if (!a.dump_schedule.empty() || !a.dump_trace.empty()) {
        // run 0 of the first policy, replayed exactly as inside the experiment
        std::optional<hsrc::AvailabilityTrace> base;
        if (config.trace.kind != hsrc::TraceKind::Synthetic) base = hsrc::load_base_trace(config);
        const auto trace = hsrc::trace_instance(config, base ? &*base : nullptr, 0);
        if (!a.dump_trace.empty()) {
            std::ostringstream out;
            hsrc::write_trace_csv(out, trace);
            write_text(a.dump_trace, out.str());
        }
        if (!a.dump_schedule.empty()) {
            const auto ctx = hsrc::CodeContext::build(hsrc::CodeParams::standard(config.n, config.k, config.m));
            auto policy = config.policies.front();
            policy.rng_seed = hsrc::mix_seed(config.seed, 0, 1);
            const auto result = hsrc::simulate_policy(*ctx, trace, policy);
            std::ostringstream out;
            out << "# " << policy.name() << " run 0: t,0,dst,bits | t,i,j,k,bits\n";
            hsrc::write_schedule_dump(out, result.schedule);
            write_text(a.dump_schedule, out.str());
        }
    }
    return 0;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
    std::string schedule, trace;
    double tau = 3600;
};

int cmd_validate(const ValidateArgs &a) {
    const auto trace = hsrc::load_trace_csv(a.trace, a.tau);
    std::ifstream in(a.schedule);
    if (!in) throw hsrc::Error(hsrc::ErrorCode::Io, "cannot open " + a.schedule);
    const auto records = hsrc::read_schedule_dump(in);
    if (trace.nodes() < 3) throw hsrc::Error(hsrc::ErrorCode::InvalidArgument, "trace needs at least 3 storage nodes");
    // the triplet set depends only on n under alpha_i = i; k = 2 is the smallest admissible code
    std::size_t m = 2;
    while ((std::size_t{1} << m) <= trace.nodes()) ++m;
    const auto params = hsrc::CodeParams::standard(trace.nodes(), 2, static_cast<unsigned>(m));
    const auto report = hsrc::validate_records(records, trace, hsrc::TripletSet(params));
    for (const auto &v : report.violations) {
        std::cout << "step " << v.step;
        if (v.line) std::cout << " line " << v.line;
        std::cout << ": " << hsrc::to_string(v.kind) << ": " << v.detail << "\n";
    }
    std::cout << report.records << " records, " << report.violations.size() << " violations ("
              << report.count(hsrc::ViolationKind::DuplicateData) << " duplicate-data, "
              << report.count(hsrc::ViolationKind::CircularDependency) << " circular-dependency, "
              << report.count(hsrc::ViolationKind::CapacityExceeded) << " capacity-exceeded)\n";
    return report.ok() ? 0 : kExitData;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::string in;
};

int cmd_report(const ReportArgs &a) {
    std::ifstream in(a.in);
    if (!in) throw hsrc::Error(hsrc::ErrorCode::Io, "cannot open " + a.in);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw hsrc::Error(hsrc::ErrorCode::Parse, e.what());
    }
    if (!doc.contains("schema") || doc["schema"] != hsrc::kReportSchema) {
        throw hsrc::Error(hsrc::ErrorCode::Parse, "unsupported report schema");
    }
    try {
        const auto &c = doc.at("config");
        std::cout << "<" << c.at("n") << "," << c.at("k") << "> m=" << c.at("m") << "  trace "
                  << c.at("trace").at("spec").get<std::string>() << "  runs " << c.at("runs") << " x "
                  << c.at("steps") << " steps\n";
        std::cout << std::left << std::setw(22) << "policy" << std::right << std::setw(16) << "stored gain %"
                  << std::setw(18) << "traffic incr. %" << std::setw(18) << "source reduc. %" << "\n";
        std::cout << std::fixed << std::setprecision(1);
        for (const auto &p : doc.at("policies")) {
            auto cell = [&](const char *key) {
                std::ostringstream s;
                s << std::fixed << std::setprecision(1) << p.at(key).at("mean").get<double>() << " +- "
                  << p.at(key).at("stdev").get<double>();
                return s.str();
            };
            std::cout << std::left << std::setw(22) << p.at("name").get<std::string>() << std::right << std::setw(16)
                      << cell("stored_gain_pct") << std::setw(18) << cell("traffic_increment_pct") << std::setw(18)
                      << cell("source_reduction_pct") << "\n";
        }
    } catch (const nlohmann::json::exception &e) {
        throw hsrc::Error(hsrc::ErrorCode::Parse, std::string("malformed report: ") + e.what());
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Homomorphic self-repairing codes and in-network redundancy generation experiments", "hsrc"};
    app.require_subcommand(1);

    EncodeArgs enc;
    auto *encode = app.add_subcommand("encode", "split a file into n encoded fragment files");
    encode->add_option("--n", enc.n, "number of fragments")->capture_default_str();
    encode->add_option("--k", enc.k, "data symbols per row")->capture_default_str();
    encode->add_option("--m", enc.m, "field degree (GF(2^m))")->capture_default_str();
    encode->add_option("--in", enc.in, "input file")->required()->check(CLI::ExistingFile);
    encode->add_option("--out-dir", enc.out_dir, "output directory")->required();

    DecodeArgs dec;
    auto *decode = app.add_subcommand("decode", "rebuild a file from the fragments in a directory");
    decode->add_option("--in-dir", dec.in_dir, "fragment directory")->required()->check(CLI::ExistingDirectory);
    decode->add_option("--out", dec.out, "output file")->required();

    RepairArgs rep;
    auto *repair = app.add_subcommand("repair", "regenerate one fragment by xoring two others");
    repair->add_option("--dir", rep.dir, "fragment directory")->required()->check(CLI::ExistingDirectory);
    repair->add_option("--target", rep.target, "index of the fragment to regenerate")->required();
    repair->add_option("--from", rep.from, "source fragment indices IDX,IDX")->required();
    repair->add_option("--out", rep.out, "output path (default: <dir>/fragment_<target>.hsrc)");

    GenTraceArgs gen;
    auto *gen_trace = app.add_subcommand("gen-trace", "write one availability trace instance as CSV");
    gen_trace->add_option("--n", gen.n, "storage nodes")->capture_default_str();
    add_trace_options(gen_trace, gen.trace);
    gen_trace->add_option("--out", gen.out, "output CSV (default: stdout)");

    SimulateArgs sim;
    auto *simulate = app.add_subcommand("simulate", "compare in-network policies with naive insertion");
    simulate->add_option("--n", sim.n, "fragments")->capture_default_str();
    simulate->add_option("--k", sim.k, "data symbols per row")->capture_default_str();
    simulate->add_option("--m", sim.m, "field degree")->capture_default_str();
    simulate->add_option("--policy", sim.policies,
                         "rnd-flw, rnd-dta, min-flw, min-dta or <source>/<triplets>; repeatable (default: all four)");
    simulate->add_option("--source", sim.source_policy, "explicit source policy: random|min-data|max-data|no-basis");
    simulate->add_option("--triplets", sim.triplet_policy, "explicit triplet policy: random|min-data|max-data|max-flow");
    add_trace_options(simulate, sim.trace);
    simulate->add_option("--runs", sim.runs, "independent backup processes")->capture_default_str();
    simulate->add_option("--jobs", sim.jobs, "worker threads")->capture_default_str();
    simulate->add_option("--json", sim.json, "write the JSON report here (default: stdout)");
    simulate->add_option("--raw-out", sim.raw_out, "write per-run metrics as CSV");
    simulate->add_option("--dump-schedule", sim.dump_schedule, "write run 0 of the first policy as a schedule dump");
    simulate->add_option("--dump-trace", sim.dump_trace, "write the trace of run 0 as CSV");

    ValidateArgs val;
    auto *validate = app.add_subcommand("validate", "check a schedule dump for duplicate data, circularity and capacity");
    validate->add_option("--schedule", val.schedule, "schedule dump")->required()->check(CLI::ExistingFile);
    validate->add_option("--trace", val.trace, "availability CSV")->required()->check(CLI::ExistingFile);
    validate->add_option("--tau", val.tau, "seconds per time step")->capture_default_str();

    ReportArgs rpt;
    auto *report = app.add_subcommand("report", "print a simulate JSON report as a table");
    report->add_option("--in", rpt.in, "JSON report")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "error: " << e.what() << "\n\n";
        CLI::App *ctx = &app;
        for (auto *sub : app.get_subcommands()) ctx = sub;
        std::cerr << ctx->help();
        return kExitUsage;
    }

    try {
        if (*encode) return cmd_encode(enc);
        if (*decode) return cmd_decode(dec);
        if (*repair) return cmd_repair(rep);
        if (*gen_trace) return cmd_gen_trace(gen);
        if (*simulate) return cmd_simulate(sim);
        if (*validate) return cmd_validate(val);
        if (*report) return cmd_report(rpt);
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const hsrc::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
