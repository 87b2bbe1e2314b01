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

#include <gtest/gtest.h>

#include <sstream>

#include "hsrc/sim.hpp"

namespace {

using hsrc::AvailabilityTrace;
using hsrc::ErrorCode;

template <typename Fn>
std::pair<ErrorCode, std::string> error_of(Fn &&fn) {
    try {
        fn();
    } catch (const hsrc::Error &e) {
        return {e.code(), e.what()};
    }
    ADD_FAILURE() << "no error thrown";
    return {ErrorCode::Io, ""};
}

AvailabilityTrace parse(const std::string &text) {
    std::istringstream in(text);
    return hsrc::read_trace_csv(in);
}

TEST(Rates, Units) {
    EXPECT_DOUBLE_EQ(hsrc::detail::parse_rate("200Kbps"), 200e3);
    EXPECT_DOUBLE_EQ(hsrc::detail::parse_rate("1.5Mbps"), 1.5e6);
    EXPECT_DOUBLE_EQ(hsrc::detail::parse_rate("1Gbps"), 1e9);
    EXPECT_DOUBLE_EQ(hsrc::detail::parse_rate("300bps"), 300);
    EXPECT_DOUBLE_EQ(hsrc::detail::parse_rate("42"), 42);
    EXPECT_EQ(error_of([] { hsrc::detail::parse_rate("fastKbps"); }).first, ErrorCode::Parse);
}

TEST(SynthSpec, Parsing) {
    const auto s = hsrc::parse_synth_spec("synth:q=0.8,up=20-200Kbps,down=x4");
    EXPECT_EQ(s.model, hsrc::AvailabilityModel::Bernoulli);
    EXPECT_DOUBLE_EQ(s.q, 0.8);
    EXPECT_DOUBLE_EQ(s.up_lo_bps, 20e3);
    EXPECT_DOUBLE_EQ(s.up_hi_bps, 200e3);
    EXPECT_DOUBLE_EQ(s.down_multiplier, 4);
    const auto o = hsrc::parse_synth_spec("synth:model=onoff,on=3,off=5,up=1Mbps");
    EXPECT_EQ(o.model, hsrc::AvailabilityModel::OnOff);
    EXPECT_EQ(o.on_steps, 3u);
    EXPECT_EQ(o.off_steps, 5u);
    EXPECT_DOUBLE_EQ(o.up_lo_bps, 1e6);
    EXPECT_DOUBLE_EQ(o.up_hi_bps, 1e6);
    const auto d = hsrc::parse_synth_spec("synth:");
    EXPECT_DOUBLE_EQ(d.q, 1.0);
    for (const char *bad : {"q=0.5", "synth:q=2", "synth:q", "synth:down=4", "synth:color=red", "synth:up=9-1Kbps",
                            "synth:model=markov", "synth:model=onoff,on=0,off=0"}) {
        EXPECT_EQ(error_of([&] { hsrc::parse_synth_spec(bad); }).first, ErrorCode::Parse) << bad;
    }
}

TEST(SynthTrace, AlwaysOnlineWhenQIsOne) {
    hsrc::Rng rng(1);
    const auto spec = hsrc::parse_synth_spec("synth:q=1,up=50Kbps,down=x4");
    const auto trace = hsrc::synth_trace(spec, 7, 24, 3600, {}, rng);
    for (std::size_t t = 0; t < 24; ++t) {
        for (std::size_t i = 0; i <= 7; ++i) EXPECT_TRUE(trace.online(i, t));
        EXPECT_DOUBLE_EQ(trace.up_bps(3, t), 50e3);
        EXPECT_DOUBLE_EQ(trace.down_bps(3, t), 200e3);
        EXPECT_DOUBLE_EQ(trace.up_bps(0, t), 100e3);
    }
}

TEST(SynthTrace, SeededAndWithinRanges) {
    const auto spec = hsrc::parse_synth_spec("synth:q=0.5,up=20-200Kbps,down=x4");
    hsrc::Rng a(77), b(77), c(78);
    const auto ta = hsrc::synth_trace(spec, 7, 120, 3600, {}, a);
    EXPECT_EQ(ta, hsrc::synth_trace(spec, 7, 120, 3600, {}, b));
    EXPECT_NE(ta, hsrc::synth_trace(spec, 7, 120, 3600, {}, c));
    std::size_t on = 0;
    for (std::size_t i = 1; i <= 7; ++i) {
        for (std::size_t t = 0; t < 120; ++t) {
            EXPECT_GE(ta.up_bps(i, t), 20e3);
            EXPECT_LE(ta.up_bps(i, t), 200e3);
            EXPECT_DOUBLE_EQ(ta.down_bps(i, t), 4 * ta.up_bps(i, t));
            on += ta.online(i, t) ? 1 : 0;
        }
    }
    EXPECT_NEAR(static_cast<double>(on) / 840.0, 0.5, 0.06);
}

TEST(SynthTrace, OnOffWindows) {
    hsrc::Rng rng(3);
    const auto spec = hsrc::parse_synth_spec("synth:model=onoff,on=2,off=3");
    const auto trace = hsrc::synth_trace(spec, 4, 50, 3600, {}, rng);
    for (std::size_t i = 1; i <= 4; ++i) {
        EXPECT_NEAR(trace.mean_availability(i), 0.4, 0.021);
        for (std::size_t t = 0; t + 5 < 50; ++t) EXPECT_EQ(trace.online(i, t), trace.online(i, t + 5));
    }
}

TEST(SynthTrace, SourceChurn) {
    hsrc::Rng rng(4);
    const auto spec = hsrc::parse_synth_spec("synth:q=0.3");
    const auto trace = hsrc::synth_trace(spec, 3, 200, 3600, {64e3, true}, rng);
    EXPECT_LT(trace.mean_availability(0), 0.5);
    EXPECT_DOUBLE_EQ(trace.up_bps(0, 0), 64e3);
}

TEST(TraceCsv, RoundTrip) {
    hsrc::Rng rng(5);
    const auto spec = hsrc::parse_synth_spec("synth:q=0.6,up=20-200Kbps,down=x4");
    const auto trace = hsrc::synth_trace(spec, 7, 30, 3600, {}, rng);
    std::ostringstream out;
    hsrc::write_trace_csv(out, trace);
    EXPECT_EQ(parse(out.str()), trace);
}

TEST(TraceCsv, SmallGrid) {
    const auto trace = parse(
        "node_id,step,avail,up_bps,down_bps\n"
        "0,0,1,100,0\n0,1,1,100,0\n0,2,0,100,0\n"
        "1,0,1,10,40\n1,1,0,10,40\n1,2,1,10,40\n"
        "2,0,0,20,80\n2,1,1,20,80\n2,2,1,20,80\n");
    EXPECT_EQ(trace.nodes(), 2u);
    EXPECT_EQ(trace.steps(), 3u);
    EXPECT_FALSE(trace.online(1, 1));
    EXPECT_TRUE(trace.online(2, 2));
    EXPECT_FALSE(trace.online(0, 2));
    EXPECT_DOUBLE_EQ(trace.down_bps(2, 0), 80);
}

TEST(TraceCsv, Errors) {
    EXPECT_EQ(error_of([] { parse("node_id,step,avail,up_bps,down_bps\n"); }).first, ErrorCode::EmptyTrace);
    EXPECT_EQ(error_of([] { parse(""); }).first, ErrorCode::Parse);
    EXPECT_EQ(error_of([] { parse("id,t,a\n0,0,1\n"); }).first, ErrorCode::Parse);
    const auto bad = error_of([] { parse("node_id,step,avail,up_bps,down_bps\n0,0,1,1,1\n1,0,1,x,1\n"); });
    EXPECT_EQ(bad.first, ErrorCode::Parse);
    EXPECT_NE(bad.second.find("line 3"), std::string::npos) << bad.second;
    EXPECT_EQ(error_of([] { parse("node_id,step,avail,up_bps,down_bps\n0,0,1,1,1\n1,1,1,1,1\n"); }).first,
              ErrorCode::Parse);
    EXPECT_EQ(error_of([] { parse("node_id,step,avail,up_bps,down_bps\n0,0,2,1,1\n"); }).first, ErrorCode::Parse);
    EXPECT_EQ(error_of([] { parse("node_id,step,avail,up_bps,down_bps\n0,0,1,1,1\n0,0,1,1,1\n"); }).first,
              ErrorCode::Parse);
    EXPECT_EQ(error_of([] { hsrc::load_trace_csv("/nonexistent/trace.csv"); }).first, ErrorCode::Io);
}

TEST(TraceOps, FilterAndWindow) {
    AvailabilityTrace trace(3, 24, 3600);
    for (std::size_t t = 0; t < 24; ++t) {
        trace.set(0, t, true, 1, 0);
        trace.set(1, t, t < 3, 1, 1);  // 3 h/day
        trace.set(2, t, t < 12, 2, 2); // 12 h/day
        trace.set(3, t, true, 3, 3);   // 24 h/day
    }
    const auto kept = hsrc::filter_by_daily_hours(trace, 6);
    EXPECT_EQ(kept.nodes(), 2u);
    EXPECT_DOUBLE_EQ(kept.up_bps(1, 0), 2);
    EXPECT_DOUBLE_EQ(kept.up_bps(2, 0), 3);
    EXPECT_EQ(hsrc::filter_by_daily_hours(trace, 3).nodes(), 3u);

    const std::vector<std::size_t> ids{3, 1};
    const auto win = hsrc::select_window(trace, ids, 2, 4);
    EXPECT_EQ(win.nodes(), 2u);
    EXPECT_EQ(win.steps(), 4u);
    EXPECT_TRUE(win.online(2, 0));  // node 1 at step 2
    EXPECT_FALSE(win.online(2, 1)); // node 1 at step 3
    EXPECT_DOUBLE_EQ(win.up_bps(1, 0), 3);
    EXPECT_EQ(error_of([&] { hsrc::select_window(trace, ids, 22, 4); }).first, ErrorCode::InvalidArgument);
}

hsrc::LoadTable load_table(const std::string &text) {
    std::istringstream in(text);
    return hsrc::read_load_csv(in);
}

TEST(LoadTrace, QuantileExample) {
    EXPECT_DOUBLE_EQ(hsrc::quantile_linear({1, 2, 3, 4}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(hsrc::quantile_linear({4, 1, 3, 2}, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(hsrc::quantile_linear({7}, 0.9), 7);
    const auto table = load_table("node_id,step,load\n1,0,1\n1,1,2\n1,2,3\n1,3,4\n");
    const auto trace = hsrc::derive_from_load(table, 0.5, {}, 3600);
    EXPECT_EQ(trace.nodes(), 1u);
    EXPECT_TRUE(trace.online(1, 0));
    EXPECT_TRUE(trace.online(1, 1));
    EXPECT_FALSE(trace.online(1, 2));
    EXPECT_FALSE(trace.online(1, 3));
    EXPECT_DOUBLE_EQ(trace.up_bps(1, 0), 1e9);
}

TEST(LoadTrace, HighPercentileExcludesOnlyPeaks) {
    const auto table = load_table("node_id,step,load\n1,0,5\n1,1,9\n1,2,1\n1,3,9\n1,4,3\n");
    const auto trace = hsrc::derive_from_load(table, 0.999, {}, 3600);
    EXPECT_TRUE(trace.online(1, 0));
    EXPECT_FALSE(trace.online(1, 1));
    EXPECT_TRUE(trace.online(1, 2));
    EXPECT_FALSE(trace.online(1, 3));
    EXPECT_TRUE(trace.online(1, 4));
}

TEST(LoadTrace, ConstantSeriesAlwaysAvailable) {
    const auto table = load_table("node_id,step,load\n1,0,0\n1,1,0\n2,0,3\n2,1,1\n");
    const auto trace = hsrc::derive_from_load(table, 0.25, {}, 3600);
    EXPECT_TRUE(trace.online(1, 0));
    EXPECT_TRUE(trace.online(1, 1));
    EXPECT_FALSE(trace.online(2, 0));
}

TEST(LoadTrace, PercentilesNest) {
    hsrc::Rng rng(9);
    std::ostringstream csv;
    csv << "node_id,step,load\n";
    for (int id = 1; id <= 12; ++id)
        for (int t = 0; t < 48; ++t) csv << id << ',' << t << ',' << rng.uniform01() << '\n';
    const auto table = load_table(csv.str());
    const auto low = hsrc::derive_from_load(table, 0.25, {}, 3600);
    const auto mid = hsrc::derive_from_load(table, 0.5, {}, 3600);
    const auto high = hsrc::derive_from_load(table, 0.75, {}, 3600);
    for (std::size_t i = 1; i <= 12; ++i) {
        for (std::size_t t = 0; t < 48; ++t) {
            if (low.online(i, t)) { EXPECT_TRUE(mid.online(i, t)); }
            if (mid.online(i, t)) { EXPECT_TRUE(high.online(i, t)); }
        }
        EXPECT_LT(low.mean_availability(i), mid.mean_availability(i));
        EXPECT_LT(mid.mean_availability(i), high.mean_availability(i));
    }
}

TEST(LoadTrace, Errors) {
    EXPECT_EQ(error_of([] { load_table("node_id,step,load\n"); }).first, ErrorCode::EmptyTrace);
    EXPECT_EQ(error_of([] { load_table("node_id,step,load\n1,0,1\n1,2,1\n"); }).first, ErrorCode::Parse);
    EXPECT_EQ(error_of([] { load_table("node_id,step,load\n1,0,-1\n"); }).first, ErrorCode::Parse);
    const auto table = load_table("node_id,step,load\n1,0,1\n");
    EXPECT_EQ(error_of([&] { hsrc::derive_from_load(table, 1.0, {}, 3600); }).first, ErrorCode::InvalidArgument);
}

} // namespace
