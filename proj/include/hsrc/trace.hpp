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
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hsrc/error.hpp"
#include "hsrc/rng.hpp"

namespace hsrc {

/// Node availability a(i,t) and bandwidths over a horizon of discrete steps.
/// Node id 0 is the source; storage nodes are 1..nodes.
class AvailabilityTrace {
  public:
    AvailabilityTrace() = default;

    AvailabilityTrace(std::size_t nodes, std::size_t steps, double tau_seconds)
        : nodes_(nodes), steps_(steps), tau_(tau_seconds), avail_(cells(), 0), up_(cells(), 0.0),
          down_(cells(), 0.0) {}

    std::size_t nodes() const noexcept { return nodes_; }
    std::size_t steps() const noexcept { return steps_; }
    double tau() const noexcept { return tau_; }
    void set_tau(double tau_seconds) { tau_ = tau_seconds; }

    bool online(std::size_t id, std::size_t t) const { return avail_[at(id, t)] != 0; }
    double up_bps(std::size_t id, std::size_t t) const { return up_[at(id, t)]; }
    double down_bps(std::size_t id, std::size_t t) const { return down_[at(id, t)]; }

    void set(std::size_t id, std::size_t t, bool is_online, double up, double down) {
        const std::size_t c = at(id, t);
        avail_[c] = is_online ? 1 : 0;
        up_[c] = up;
        down_[c] = down;
    }

    /// Online flags of every node (source included) at step t.
    std::span<const std::uint8_t> row(std::size_t t) const {
        return std::span<const std::uint8_t>(avail_).subspan(t * (nodes_ + 1), nodes_ + 1);
    }

    double mean_availability(std::size_t id) const {
        if (steps_ == 0) return 0.0;
        std::size_t on = 0;
        for (std::size_t t = 0; t < steps_; ++t) on += online(id, t) ? 1 : 0;
        return static_cast<double>(on) / static_cast<double>(steps_);
    }

    void validate() const {
        if (steps_ == 0) throw Error(ErrorCode::EmptyTrace, "trace has no steps");
        if (!(tau_ > 0)) throw Error(ErrorCode::InvalidArgument, "time step duration must be positive");
        for (std::size_t c = 0; c < cells(); ++c) {
            if (!(up_[c] >= 0) || !(down_[c] >= 0)) throw Error(ErrorCode::InvalidArgument, "negative bandwidth in trace");
        }
    }

    friend bool operator==(const AvailabilityTrace &, const AvailabilityTrace &) = default;

  private:
    std::size_t cells() const noexcept { return (nodes_ + 1) * steps_; }

    std::size_t at(std::size_t id, std::size_t t) const {
        if (id > nodes_ || t >= steps_) {
            throw Error(ErrorCode::InvalidArgument,
                        "trace cell (" + std::to_string(id) + "," + std::to_string(t) + ") out of range");
        }
        return t * (nodes_ + 1) + id;
    }

    std::size_t nodes_ = 0;
    std::size_t steps_ = 0;
    double tau_ = 3600.0;
    std::vector<std::uint8_t> avail_;
    std::vector<double> up_;
    std::vector<double> down_;
};

enum class AvailabilityModel { Bernoulli, OnOff };

/// Parameters of a synthetic trace. Written on the command line as
/// `synth:q=0.8,up=20-200Kbps,down=x4` (see parse_synth_spec).
struct SynthSpec {
    AvailabilityModel model = AvailabilityModel::Bernoulli;
    double q = 1.0;                 // Bernoulli online probability
    std::size_t on_steps = 8;       // OnOff window lengths
    std::size_t off_steps = 16;
    double up_lo_bps = 20e3;
    double up_hi_bps = 200e3;
    double down_multiplier = 4.0;
};

namespace detail {

inline double parse_double(std::string_view text, std::string_view what) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::Parse, "bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

inline std::uint64_t parse_uint(std::string_view text, std::string_view what) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::Parse, "bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

/// "200Kbps" -> 200000; accepts bps, Kbps, Mbps, Gbps (default bps).
inline double parse_rate(std::string_view text) {
    struct Unit {
        std::string_view suffix;
        double scale;
    };
    static constexpr Unit units[] = {{"Gbps", 1e9}, {"Mbps", 1e6}, {"Kbps", 1e3}, {"bps", 1.0}};
    for (const auto &u : units) {
        if (text.size() > u.suffix.size() && text.substr(text.size() - u.suffix.size()) == u.suffix) {
            return parse_double(text.substr(0, text.size() - u.suffix.size()), "rate") * u.scale;
        }
    }
    return parse_double(text, "rate");
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        out.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

inline SynthSpec parse_synth_spec(std::string_view text) {
    constexpr std::string_view prefix = "synth:";
    if (text.substr(0, prefix.size()) != prefix) throw Error(ErrorCode::Parse, "synthetic trace spec must start with synth:");
    text.remove_prefix(prefix.size());
    SynthSpec spec;
    if (text.empty()) return spec;
    for (auto item : detail::split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw Error(ErrorCode::Parse, "expected key=value in '" + std::string(item) + "'");
        const auto key = item.substr(0, eq);
        const auto value = item.substr(eq + 1);
        if (key == "q") {
            spec.q = detail::parse_double(value, "q");
            if (!(spec.q >= 0 && spec.q <= 1)) throw Error(ErrorCode::Parse, "q must lie in [0, 1]");
        } else if (key == "up") {
            const auto dash = value.find('-');
            if (dash == std::string_view::npos) {
                spec.up_lo_bps = spec.up_hi_bps = detail::parse_rate(value);
            } else {
                // a unit on the upper bound applies to both ends: 20-200Kbps
                auto hi = value.substr(dash + 1);
                auto lo = std::string(value.substr(0, dash));
                const auto unit_start = hi.find_first_not_of("0123456789.eE+");
                if (unit_start != std::string_view::npos && lo.find_first_not_of("0123456789.eE+") == std::string::npos) {
                    lo += std::string(hi.substr(unit_start));
                }
                spec.up_lo_bps = detail::parse_rate(lo);
                spec.up_hi_bps = detail::parse_rate(hi);
            }
            if (!(spec.up_lo_bps >= 0 && spec.up_lo_bps <= spec.up_hi_bps)) {
                throw Error(ErrorCode::Parse, "upload range must satisfy 0 <= lo <= hi");
            }
        } else if (key == "down") {
            if (value.empty() || value.front() != 'x') throw Error(ErrorCode::Parse, "down must be written x<multiplier>");
            spec.down_multiplier = detail::parse_double(value.substr(1), "download multiplier");
            if (!(spec.down_multiplier >= 0)) throw Error(ErrorCode::Parse, "download multiplier must be >= 0");
        } else if (key == "model") {
            if (value == "bernoulli") spec.model = AvailabilityModel::Bernoulli;
            else if (value == "onoff") spec.model = AvailabilityModel::OnOff;
            else throw Error(ErrorCode::Parse, "unknown availability model '" + std::string(value) + "'");
        } else if (key == "on") {
            spec.on_steps = detail::parse_uint(value, "on window");
        } else if (key == "off") {
            spec.off_steps = detail::parse_uint(value, "off window");
        } else {
            throw Error(ErrorCode::Parse, "unknown synthetic trace key '" + std::string(key) + "'");
        }
    }
    if (spec.model == AvailabilityModel::OnOff && spec.on_steps + spec.off_steps == 0) {
        throw Error(ErrorCode::Parse, "on/off windows cannot both be empty");
    }
    return spec;
}

/// Source row settings applied when building or loading a trace.
struct SourceSettings {
    double up_bps = 100e3;
    /// When false the source is always online with up_bps; when true its row
    /// follows the same availability model as the storage nodes.
    bool churn = false;
};

/// Draws a trace: per-node upload bandwidth uniform in [lo, hi] (fixed over
/// the horizon), download = multiplier x upload, availability per the model.
inline AvailabilityTrace synth_trace(const SynthSpec &spec, std::size_t nodes, std::size_t steps, double tau,
                                     const SourceSettings &source, Rng &rng) {
    AvailabilityTrace trace(nodes, steps, tau);
    auto draw_row = [&](std::size_t id, double up) {
        const double down = up * spec.down_multiplier;
        if (spec.model == AvailabilityModel::Bernoulli) {
            for (std::size_t t = 0; t < steps; ++t) trace.set(id, t, rng.bernoulli(spec.q), up, down);
        } else {
            const std::size_t period = spec.on_steps + spec.off_steps;
            const std::size_t phase = rng.below(period);
            for (std::size_t t = 0; t < steps; ++t) {
                trace.set(id, t, (t + phase) % period < spec.on_steps, up, down);
            }
        }
    };
    for (std::size_t id = 1; id <= nodes; ++id) draw_row(id, rng.uniform(spec.up_lo_bps, spec.up_hi_bps));
    if (source.churn) {
        draw_row(0, source.up_bps);
    } else {
        for (std::size_t t = 0; t < steps; ++t) trace.set(0, t, true, source.up_bps, 0.0);
    }
    return trace;
}

/// Forces the source row online with the configured upload unless the
/// source is meant to churn with its recorded row.
inline void apply_source(AvailabilityTrace &trace, const SourceSettings &source) {
    if (source.churn) return;
    for (std::size_t t = 0; t < trace.steps(); ++t) trace.set(0, t, true, source.up_bps, 0.0);
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

/// Reads a CSV with the given header; calls row(fields, line_no) per record.
template <typename RowFn>
void read_csv(std::istream &in, std::string_view expected_header, RowFn &&row) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        if (!header_seen) {
            if (text != expected_header) {
                throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected header '" +
                                                  std::string(expected_header) + "'");
            }
            header_seen = true;
            continue;
        }
        auto fields = split(text, ',');
        for (auto &f : fields) f = trim(f);
        try {
            row(fields, line_no);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::Parse) throw;
            throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen) throw Error(ErrorCode::Parse, "missing header '" + std::string(expected_header) + "'");
}

inline std::ifstream open_input(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    return in;
}

} // namespace detail

inline constexpr std::string_view kTraceCsvHeader = "node_id,step,avail,up_bps,down_bps";
inline constexpr std::string_view kLoadCsvHeader = "node_id,step,load";

inline void write_trace_csv(std::ostream &out, const AvailabilityTrace &trace) {
    out << kTraceCsvHeader << '\n';
    for (std::size_t t = 0; t < trace.steps(); ++t) {
        for (std::size_t id = 0; id <= trace.nodes(); ++id) {
            out << id << ',' << t << ',' << (trace.online(id, t) ? 1 : 0) << ','
                << detail::format_double(trace.up_bps(id, t)) << ',' << detail::format_double(trace.down_bps(id, t))
                << '\n';
        }
    }
}

/// Parses the availability CSV. Every node 0..N must have a record for
/// every step 0..T-1; tau is not part of the file.
inline AvailabilityTrace read_trace_csv(std::istream &in, double tau = 3600.0) {
    struct Cell {
        bool online;
        double up, down;
    };
    std::map<std::pair<std::size_t, std::size_t>, Cell> cells;
    std::size_t max_node = 0, max_step = 0;
    detail::read_csv(in, kTraceCsvHeader, [&](const std::vector<std::string_view> &f, std::size_t) {
        if (f.size() != 5) throw Error(ErrorCode::Parse, "expected 5 fields, got " + std::to_string(f.size()));
        const auto id = detail::parse_uint(f[0], "node_id");
        const auto t = detail::parse_uint(f[1], "step");
        const auto a = detail::parse_uint(f[2], "avail");
        if (a > 1) throw Error(ErrorCode::Parse, "avail must be 0 or 1");
        const double up = detail::parse_double(f[3], "up_bps");
        const double down = detail::parse_double(f[4], "down_bps");
        if (!(up >= 0) || !(down >= 0)) throw Error(ErrorCode::Parse, "bandwidths must be non-negative");
        if (!cells.emplace(std::pair{id, t}, Cell{a == 1, up, down}).second) {
            throw Error(ErrorCode::Parse, "duplicate record for node " + std::to_string(id) + " step " + std::to_string(t));
        }
        max_node = std::max<std::size_t>(max_node, id);
        max_step = std::max<std::size_t>(max_step, t);
    });
    if (cells.empty()) throw Error(ErrorCode::EmptyTrace, "trace has no records");
    const std::size_t steps = max_step + 1;
    if (cells.size() != (max_node + 1) * steps) {
        throw Error(ErrorCode::Parse, "trace is not a complete node x step grid (node ids 0.." +
                                          std::to_string(max_node) + ", steps 0.." + std::to_string(max_step) + ")");
    }
    AvailabilityTrace trace(max_node, steps, tau);
    for (const auto &[key, cell] : cells) trace.set(key.first, key.second, cell.online, cell.up, cell.down);
    return trace;
}

inline AvailabilityTrace load_trace_csv(const std::string &path, double tau = 3600.0) {
    auto in = detail::open_input(path);
    return read_trace_csv(in, tau);
}

/// Keeps the storage nodes online at least `min_hours` per day on average,
/// renumbered 1..N' in their original order. The source row is preserved.
inline AvailabilityTrace filter_by_daily_hours(const AvailabilityTrace &trace, double min_hours) {
    std::vector<std::size_t> keep;
    for (std::size_t id = 1; id <= trace.nodes(); ++id) {
        if (trace.mean_availability(id) * 24.0 >= min_hours) keep.push_back(id);
    }
    AvailabilityTrace out(keep.size(), trace.steps(), trace.tau());
    for (std::size_t t = 0; t < trace.steps(); ++t) {
        out.set(0, t, trace.online(0, t), trace.up_bps(0, t), trace.down_bps(0, t));
        for (std::size_t i = 0; i < keep.size(); ++i) {
            out.set(i + 1, t, trace.online(keep[i], t), trace.up_bps(keep[i], t), trace.down_bps(keep[i], t));
        }
    }
    return out;
}

/// Sub-trace of the given storage nodes (in order) over steps [first, first + steps).
inline AvailabilityTrace select_window(const AvailabilityTrace &trace, std::span<const std::size_t> node_ids,
                                       std::size_t first, std::size_t steps) {
    if (first + steps > trace.steps()) throw Error(ErrorCode::InvalidArgument, "trace window exceeds trace length");
    AvailabilityTrace out(node_ids.size(), steps, trace.tau());
    for (std::size_t t = 0; t < steps; ++t) {
        out.set(0, t, trace.online(0, first + t), trace.up_bps(0, first + t), trace.down_bps(0, first + t));
        for (std::size_t i = 0; i < node_ids.size(); ++i) {
            const std::size_t id = node_ids[i];
            out.set(i + 1, t, trace.online(id, first + t), trace.up_bps(id, first + t), trace.down_bps(id, first + t));
        }
    }
    return out;
}

/// Per-node load series. Node id 0, when present, is the source.
struct LoadTable {
    std::map<std::size_t, std::vector<double>> series;
    std::size_t steps = 0;
};

inline LoadTable read_load_csv(std::istream &in) {
    std::map<std::size_t, std::map<std::size_t, double>> raw;
    detail::read_csv(in, kLoadCsvHeader, [&](const std::vector<std::string_view> &f, std::size_t) {
        if (f.size() != 3) throw Error(ErrorCode::Parse, "expected 3 fields, got " + std::to_string(f.size()));
        const auto id = detail::parse_uint(f[0], "node_id");
        const auto t = detail::parse_uint(f[1], "step");
        const double load = detail::parse_double(f[2], "load");
        if (!(load >= 0)) throw Error(ErrorCode::Parse, "load must be non-negative");
        if (!raw[id].emplace(t, load).second) throw Error(ErrorCode::Parse, "duplicate load record");
    });
    if (raw.empty()) throw Error(ErrorCode::EmptyTrace, "load table has no records");
    LoadTable table;
    table.steps = raw.begin()->second.size();
    for (auto &[id, by_step] : raw) {
        if (by_step.size() != table.steps || by_step.rbegin()->first + 1 != table.steps) {
            throw Error(ErrorCode::Parse, "node " + std::to_string(id) + " does not cover steps 0.." +
                                              std::to_string(table.steps - 1) + " contiguously");
        }
        auto &s = table.series[id];
        for (const auto &[t, v] : by_step) s.push_back(v);
    }
    return table;
}

inline LoadTable load_load_csv(const std::string &path) {
    auto in = detail::open_input(path);
    return read_load_csv(in);
}

/// p-quantile by linear interpolation between order statistics
/// (h = (N-1)p), so p = 0.5 over an even count is the midpoint.
inline double quantile_linear(std::vector<double> values, double p) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty series");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct LoadBandwidth {
    double up_bps = 1e9;
    double down_bps = 1e9;
};

/// a(i,t) = 1 iff load(i,t) is strictly below node i's p-quantile load. A
/// node whose series is constant is always available.
inline AvailabilityTrace derive_from_load(const LoadTable &table, double p, const LoadBandwidth &bw, double tau) {
    if (!(p > 0 && p < 1)) throw Error(ErrorCode::InvalidArgument, "percentile must lie in (0, 1)");
    if (table.series.empty() || table.steps == 0) throw Error(ErrorCode::EmptyTrace, "load table has no records");
    std::size_t storage = 0;
    for (const auto &[id, s] : table.series) storage += id == 0 ? 0 : 1;
    AvailabilityTrace trace(storage, table.steps, tau);
    for (std::size_t t = 0; t < table.steps; ++t) trace.set(0, t, true, bw.up_bps, bw.down_bps);
    std::size_t next = 1;
    for (const auto &[id, s] : table.series) {
        const std::size_t slot = id == 0 ? 0 : next++;
        const double threshold = quantile_linear(s, p);
        const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
        const bool constant = *mn == *mx;
        for (std::size_t t = 0; t < table.steps; ++t) {
            trace.set(slot, t, constant || s[t] < threshold, bw.up_bps, bw.down_bps);
        }
    }
    return trace;
}

} // namespace hsrc
