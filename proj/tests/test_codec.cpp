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

#include <map>

#include "hsrc/codec.hpp"
#include "support.hpp"

namespace {

using hsrc::CodeParams;
using hsrc::DataObject;
using hsrc::ErrorCode;
using hsrc::Fragment;
using hsrc::gf::Element;

template <typename Fn>
ErrorCode error_of(Fn &&fn) {
    try {
        fn();
    } catch (const hsrc::Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Io;
}

// p(alpha) = sum_i o_i alpha^(2^i), via plain exponentiation.
Element naive_eval(const std::vector<Element> &o, Element alpha, const hsrc::gf::Field &f) {
    Element acc = 0;
    for (std::size_t i = 0; i < o.size(); ++i) acc ^= f.mul(o[i], f.pow(alpha, std::uint64_t{1} << i));
    return acc;
}

TEST(CodeParams, StandardAlphasAreIndices) {
    const auto p = CodeParams::standard(7, 3, 4);
    ASSERT_EQ(p.alphas().size(), 7u);
    for (std::size_t i = 1; i <= 7; ++i) EXPECT_EQ(p.alpha(i), i);
    EXPECT_EQ(p.index_of(6), 6u);
    EXPECT_FALSE(p.index_of(9).has_value());
    EXPECT_EQ(p.row_bits(), 12u);
}

TEST(CodeParams, Validation) {
    EXPECT_EQ(error_of([] { CodeParams::standard(7, 1, 4); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_of([] { CodeParams::standard(7, 7, 4); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_of([] { CodeParams::standard(16, 3, 4); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_of([] { CodeParams(5, 4, hsrc::gf::Field(8), {1, 2, 3, 4, 5}); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_of([] { CodeParams(3, 2, hsrc::gf::Field(4), {1, 1, 2}); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_of([] { CodeParams(3, 2, hsrc::gf::Field(4), {0, 1, 2}); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_of([] { CodeParams::standard(7, 3, 8).check_index(8); }), ErrorCode::InvalidArgument);
}

TEST(Codec, EvalPolyExamples) {
    const auto p = CodeParams::standard(7, 3, 4);
    const std::vector<Element> zero{0, 0, 0}, identity{1, 0, 0};
    for (Element a = 1; a < 16; ++a) {
        EXPECT_EQ(hsrc::eval_poly(zero, a, p), 0u);
        EXPECT_EQ(hsrc::eval_poly(identity, a, p), a);
    }
    EXPECT_EQ(error_of([&] { hsrc::eval_poly(identity, 0, p); }), ErrorCode::InvalidArgument);
}

TEST(Codec, EvalPolyMatchesPlainPowers) {
    hsrc::Rng rng(21);
    for (unsigned m : {4u, 8u, 16u}) {
        const auto p = CodeParams::standard(7, 3, m);
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<Element> o(3);
            for (auto &s : o) s = static_cast<Element>(rng.next() & p.field().mask());
            const auto a = static_cast<Element>(1 + rng.below(p.field().mask()));
            EXPECT_EQ(hsrc::eval_poly(o, a, p), naive_eval(o, a, p.field()));
        }
    }
}

TEST(Codec, LinearizedHomomorphism) {
    hsrc::Rng rng(2);
    const auto p = CodeParams::standard(7, 3, 8);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<Element> o(3);
        for (auto &s : o) s = static_cast<Element>(rng.below(256));
        const auto a = static_cast<Element>(1 + rng.below(255));
        const auto b = static_cast<Element>(1 + rng.below(255));
        if (a == b) continue;
        EXPECT_EQ(hsrc::eval_poly(o, a ^ b, p), hsrc::eval_poly(o, a, p) ^ hsrc::eval_poly(o, b, p));
    }
}

TEST(Codec, EncodeStream) {
    const auto p = CodeParams::standard(7, 3, 4);
    const std::vector<Element> zero{0, 0, 0};
    EXPECT_EQ(hsrc::encode_stream(zero, p), std::vector<Element>(7, 0));
    const std::vector<Element> row{3, 9, 14};
    const auto out = hsrc::encode_stream(row, p);
    for (std::size_t i = 1; i <= 7; ++i) EXPECT_EQ(out[i - 1], naive_eval(row, static_cast<Element>(i), p.field()));
    const std::vector<Element> out_of_field{16, 0, 0};
    EXPECT_EQ(error_of([&] { hsrc::encode_stream(out_of_field, p); }), ErrorCode::InvalidArgument);
}

TEST(Codec, ChunkedLayout36Bits) {
    const auto p = CodeParams::standard(7, 3, 4);
    // 36 bits: symbols 1..9 in order, 4 bits each
    DataObject obj{{0x12, 0x34, 0x56, 0x78, 0x90}, 36};
    const auto set = hsrc::encode(obj, p);
    ASSERT_EQ(set.fragments.size(), 7u);
    EXPECT_EQ(set.object_bits, 36u);
    const std::vector<std::vector<Element>> rows{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
    for (std::size_t i = 1; i <= 7; ++i) {
        ASSERT_EQ(set.fragment(i).size(), 3u);
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_EQ(set.fragment(i)[j], naive_eval(rows[j], static_cast<Element>(i), p.field()));
        }
    }
    EXPECT_FALSE(obj.padded(p));
}

TEST(Codec, ZeroObjectGivesZeroFragments) {
    const auto p = CodeParams::standard(7, 3, 8);
    const auto obj = DataObject::from_bytes(std::vector<std::uint8_t>(50, 0));
    for (const auto &set : {hsrc::encode(obj, p), hsrc::encode_via_basis(obj, p)}) {
        for (const auto &frag : set.fragments) EXPECT_EQ(frag, Fragment(frag.size(), 0));
    }
    EXPECT_EQ(error_of([&] { hsrc::encode(DataObject{}, p); }), ErrorCode::EmptyObject);
}

TEST(Codec, PaddingRoundsUpToWholeRows) {
    const auto p = CodeParams::standard(7, 3, 8);
    const auto obj = DataObject::from_bytes({0xAB, 0xCD, 0xEF, 0x01});
    EXPECT_EQ(obj.rows(p), 2u);
    EXPECT_TRUE(obj.padded(p));
    // the padded symbols read as zero
    EXPECT_EQ(obj.symbol(3, 8), 0x01u);
    EXPECT_EQ(obj.symbol(4, 8), 0u);
    EXPECT_EQ(obj.symbol(5, 8), 0u);
}

TEST(Codec, SourceBasisIsLexicographicallyFirst) {
    EXPECT_EQ(hsrc::source_basis(CodeParams::standard(7, 3, 4)), (std::vector<std::size_t>{1, 2, 4}));
    EXPECT_EQ(hsrc::source_basis(CodeParams::standard(3, 2, 4)), (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(hsrc::source_basis(CodeParams::standard(15, 4, 8)), (std::vector<std::size_t>{1, 2, 4, 8}));
}

TEST(Codec, EncodeViaBasisMatchesEncode) {
    hsrc::Rng rng(8);
    for (unsigned m : {4u, 8u}) {
        const auto p = CodeParams::standard(7, 3, m);
        for (int trial = 0; trial < 30; ++trial) {
            const auto obj = hsrc::testing::random_object(rng, 1 + rng.below(200));
            const auto direct = hsrc::encode(obj, p);
            const auto derived = hsrc::encode_via_basis(obj, p);
            EXPECT_EQ(derived, direct);
            // the derivation chain r3=r1+r2, r5=r1+r4, r6=r2+r4, r7=r1+r6
            const auto &r = derived;
            for (std::size_t j = 0; j < r.rows(); ++j) {
                EXPECT_EQ(r.fragment(3)[j], r.fragment(1)[j] ^ r.fragment(2)[j]);
                EXPECT_EQ(r.fragment(5)[j], r.fragment(1)[j] ^ r.fragment(4)[j]);
                EXPECT_EQ(r.fragment(6)[j], r.fragment(2)[j] ^ r.fragment(4)[j]);
                EXPECT_EQ(r.fragment(7)[j], r.fragment(1)[j] ^ r.fragment(6)[j]);
            }
        }
    }
    const auto p15 = CodeParams::standard(15, 4, 8);
    const auto obj = hsrc::testing::random_object(rng, 333);
    EXPECT_EQ(hsrc::encode_via_basis(obj, p15), hsrc::encode(obj, p15));
}

TEST(Codec, RepairExamples) {
    hsrc::Rng rng(9);
    const auto p = CodeParams::standard(7, 3, 8);
    const auto obj = hsrc::testing::random_object(rng, 120);
    const auto set = hsrc::encode(obj, p);
    EXPECT_EQ(hsrc::repair(1, set.fragment(1), 6, set.fragment(6), 7, p), set.fragment(7));
    EXPECT_EQ(hsrc::repair(2, set.fragment(2), 5, set.fragment(5), 7, p), set.fragment(7));
    EXPECT_EQ(hsrc::repair(6, set.fragment(6), 1, set.fragment(1), 7, p), set.fragment(7));
    EXPECT_EQ(error_of([&] { hsrc::repair(1, set.fragment(1), 2, set.fragment(2), 4, p); }), ErrorCode::TripletMismatch);
    EXPECT_EQ(error_of([&] { hsrc::repair(1, set.fragment(1), 1, set.fragment(1), 7, p); }), ErrorCode::TripletMismatch);
    Fragment shorter(set.fragment(6).begin(), set.fragment(6).end() - 1);
    EXPECT_EQ(error_of([&] { hsrc::repair(1, set.fragment(1), 6, shorter, 7, p); }), ErrorCode::InvalidArgument);
}

TEST(Codec, DecodeExamples) {
    hsrc::Rng rng(10);
    const auto p = CodeParams::standard(7, 3, 8);
    const auto obj = hsrc::testing::random_object(rng, 77);
    const auto set = hsrc::encode(obj, p);
    std::map<std::size_t, Fragment> basis{{1, set.fragment(1)}, {2, set.fragment(2)}, {4, set.fragment(4)}};
    EXPECT_EQ(hsrc::decode(basis, p, obj.bits), obj);
    std::map<std::size_t, Fragment> dependent{{1, set.fragment(1)}, {2, set.fragment(2)}, {3, set.fragment(3)}};
    EXPECT_EQ(error_of([&] { hsrc::decode(dependent, p, obj.bits); }), ErrorCode::DependentFragments);
    std::map<std::size_t, Fragment> two{{1, set.fragment(1)}, {2, set.fragment(2)}};
    EXPECT_EQ(error_of([&] { hsrc::decode(two, p, obj.bits); }), ErrorCode::InsufficientFragments);
    // a dependent triple plus one more node is enough
    dependent.emplace(7, set.fragment(7));
    EXPECT_EQ(hsrc::decode(dependent, p, obj.bits), obj);
}

// Independent rank: Gaussian elimination over F2 on the bit vectors of the alphas.
std::size_t oracle_rank(std::vector<std::uint32_t> rows) {
    std::size_t rank = 0;
    for (int bit = 31; bit >= 0; --bit) {
        auto pivot = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(rank), rows.end(),
                                  [&](std::uint32_t r) { return (r >> bit) & 1; });
        if (pivot == rows.end()) continue;
        std::iter_swap(rows.begin() + static_cast<std::ptrdiff_t>(rank), pivot);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && ((rows[r] >> bit) & 1)) rows[r] ^= rows[rank];
        }
        ++rank;
    }
    return rank;
}

TEST(Codec, DecodeCoverageOfAllTriples) {
    hsrc::Rng rng(12);
    const auto p = CodeParams::standard(7, 3, 8);
    const auto obj = hsrc::testing::random_object(rng, 64);
    const auto set = hsrc::encode(obj, p);
    std::size_t ok = 0, dependent = 0;
    for (std::size_t a = 1; a <= 7; ++a)
        for (std::size_t b = a + 1; b <= 7; ++b)
            for (std::size_t c = b + 1; c <= 7; ++c) {
                std::map<std::size_t, Fragment> avail{{a, set.fragment(a)}, {b, set.fragment(b)}, {c, set.fragment(c)}};
                const bool independent = oracle_rank({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                                                      static_cast<std::uint32_t>(c)}) == 3;
                if (independent) {
                    EXPECT_EQ(hsrc::decode(avail, p, obj.bits), obj);
                    ++ok;
                } else {
                    EXPECT_EQ(error_of([&] { hsrc::decode(avail, p, obj.bits); }), ErrorCode::DependentFragments);
                    ++dependent;
                }
            }
    EXPECT_EQ(ok, 28u);
    EXPECT_EQ(dependent, 7u);
}

TEST(Codec, RoundTripAcrossFieldsAndSizes) {
    hsrc::Rng rng(13);
    for (unsigned m : {4u, 5u, 8u, 12u, 16u, 32u}) {
        const auto p = CodeParams::standard(7, 3, m);
        for (std::size_t bytes : {1u, 3u, 17u, 256u}) {
            const auto obj = hsrc::testing::random_object(rng, bytes);
            const auto set = hsrc::encode(obj, p);
            std::map<std::size_t, Fragment> avail{{3, set.fragment(3)}, {5, set.fragment(5)}, {7, set.fragment(7)}};
            // 3,5,6 is dependent (3^5=6); 3,5,7 is not
            EXPECT_EQ(hsrc::decode(avail, p, obj.bits), obj) << "m=" << m << " bytes=" << bytes;
        }
    }
}

TEST(Codec, PrefixDecodeUsesLeadingRows) {
    hsrc::Rng rng(14);
    const auto p = CodeParams::standard(7, 3, 8);
    const auto obj = hsrc::testing::random_object(rng, 90);
    const auto set = hsrc::encode(obj, p);
    std::map<std::size_t, Fragment> avail;
    for (std::size_t i : {1u, 2u, 4u}) avail.emplace(i, Fragment(set.fragment(i).begin(), set.fragment(i).begin() + 5));
    EXPECT_EQ(hsrc::decode(avail, p, 5 * 24), hsrc::testing::prefix_of(obj, 120));
    EXPECT_EQ(hsrc::decode(avail, p, 100), hsrc::testing::prefix_of(obj, 100));
    EXPECT_EQ(error_of([&] { hsrc::decode(avail, p, 121); }), ErrorCode::InvalidArgument);
}

} // namespace
