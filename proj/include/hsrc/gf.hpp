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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hsrc/error.hpp"

namespace hsrc::gf {

/// An element of GF(2^m) in its natural binary encoding: bit i is the
/// coefficient of x^i in the polynomial basis {1, x, ..., x^(m-1)}.
using Element = std::uint32_t;

inline constexpr unsigned kMinDegree = 2;
inline constexpr unsigned kMaxDegree = 32;

namespace detail {

inline unsigned degree_of(std::uint64_t poly) {
    return poly == 0 ? 0 : static_cast<unsigned>(std::bit_width(poly)) - 1;
}

/// Remainder of carry-less polynomial division.
inline std::uint64_t poly_mod(std::uint64_t a, std::uint64_t b) {
    const unsigned db = degree_of(b);
    while (a != 0 && degree_of(a) >= db) {
        a ^= b << (degree_of(a) - db);
    }
    return a;
}

inline std::uint64_t clmul_reduce(std::uint64_t a, std::uint64_t b, unsigned m, std::uint64_t modulus) {
    std::uint64_t result = 0;
    const std::uint64_t top = std::uint64_t{1} << m;
    while (b != 0) {
        if (b & 1) result ^= a;
        b >>= 1;
        a <<= 1;
        if (a & top) a ^= modulus;
    }
    return result;
}

} // namespace detail

/// Trial division by every polynomial of degree 1..m/2.
inline bool is_irreducible(std::uint64_t poly) {
    const unsigned m = detail::degree_of(poly);
    if (m == 0) return false;
    if ((poly & 1) == 0) return m == 1;
    const std::uint64_t limit = std::uint64_t{1} << (m / 2 + 1);
    for (std::uint64_t divisor = 2; divisor < limit; ++divisor) {
        if (detail::poly_mod(poly, divisor) == 0) return false;
    }
    return true;
}

/// The modulus used when none is given. m=16 and m=32 are the moduli used by
/// jerasure; every other degree takes the numerically smallest irreducible
/// polynomial, which yields x^4+x+1 for m=4 and x^8+x^4+x^3+x+1 for m=8.
inline std::uint64_t default_modulus(unsigned m) {
    if (m < kMinDegree || m > kMaxDegree) {
        throw Error(ErrorCode::InvalidField, "field degree must be in [2, 32], got " + std::to_string(m));
    }
    if (m == 16) return 0x1100BULL;
    if (m == 32) return 0x100400007ULL;
    const std::uint64_t top = std::uint64_t{1} << m;
    for (std::uint64_t poly = top | 1; poly < (top << 1); poly += 2) {
        if (is_irreducible(poly)) return poly;
    }
    throw Error(ErrorCode::InvalidField, "no irreducible polynomial found");
}

/// GF(2^m) for 2 <= m <= 32. Values are immutable after construction and
/// cheap to copy; log/antilog tables (m <= 16) are shared between copies.
class Field {
  public:
    explicit Field(unsigned m) : Field(m, default_modulus(m)) {}

    Field(unsigned m, std::uint64_t modulus) : m_(m), modulus_(modulus) {
        if (m < kMinDegree || m > kMaxDegree) {
            throw Error(ErrorCode::InvalidField, "field degree must be in [2, 32], got " + std::to_string(m));
        }
        if (detail::degree_of(modulus) != m) {
            throw Error(ErrorCode::InvalidField, "modulus degree does not match m=" + std::to_string(m));
        }
        if (!is_irreducible(modulus)) {
            throw Error(ErrorCode::InvalidField, "modulus is reducible over F_2");
        }
        if (m <= kTableLimit) build_tables();
    }

    unsigned degree() const noexcept { return m_; }
    std::uint64_t modulus() const noexcept { return modulus_; }
    Element mask() const noexcept { return static_cast<Element>((std::uint64_t{1} << m_) - 1); }
    std::uint64_t order() const noexcept { return std::uint64_t{1} << m_; }
    bool contains(Element a) const noexcept { return (a & ~mask()) == 0; }
    /// Number of bytes an element occupies in serialized form.
    std::size_t element_bytes() const noexcept { return (m_ + 7) / 8; }

    static constexpr Element add(Element a, Element b) noexcept { return a ^ b; }

    Element mul(Element a, Element b) const noexcept {
        if (a == 0 || b == 0) return 0;
        if (tables_) {
            return tables_->exp[tables_->log[a] + tables_->log[b]];
        }
        return static_cast<Element>(detail::clmul_reduce(a, b, m_, modulus_));
    }

    Element square(Element a) const noexcept { return mul(a, a); }

    /// a^(2^j). The Frobenius map has order m, so j is reduced modulo m.
    Element frob_pow(Element a, std::uint64_t j) const noexcept {
        for (std::uint64_t s = j % m_; s > 0; --s) a = square(a);
        return a;
    }

    Element pow(Element a, std::uint64_t e) const noexcept {
        Element result = 1;
        while (e != 0) {
            if (e & 1) result = mul(result, a);
            a = square(a);
            e >>= 1;
        }
        return result;
    }

    Element inv(Element a) const {
        if (a == 0) throw Error(ErrorCode::InvalidArgument, "zero has no multiplicative inverse");
        if (tables_) {
            const std::uint32_t group = static_cast<std::uint32_t>(order() - 1);
            return tables_->exp[(group - tables_->log[a]) % group];
        }
        return pow(a, order() - 2);
    }

    Element div(Element a, Element b) const { return mul(a, inv(b)); }

    friend bool operator==(const Field &x, const Field &y) noexcept {
        return x.m_ == y.m_ && x.modulus_ == y.modulus_;
    }

  private:
    static constexpr unsigned kTableLimit = 16;

    struct Tables {
        std::vector<std::uint32_t> log;
        std::vector<Element> exp; // doubled so log a + log b never wraps
    };

    void build_tables() {
        const std::uint32_t group = static_cast<std::uint32_t>(order() - 1);
        const Element generator = find_generator(group);
        auto tables = std::make_shared<Tables>();
        tables->log.assign(order(), 0);
        tables->exp.assign(2 * static_cast<std::size_t>(group), 0);
        Element x = 1;
        for (std::uint32_t i = 0; i < group; ++i) {
            tables->exp[i] = x;
            tables->exp[i + group] = x;
            tables->log[x] = i;
            x = static_cast<Element>(detail::clmul_reduce(x, generator, m_, modulus_));
        }
        tables_ = std::move(tables);
    }

    Element find_generator(std::uint32_t group) const {
        std::vector<std::uint32_t> primes;
        std::uint32_t rest = group;
        for (std::uint32_t p = 2; p * p <= rest; ++p) {
            if (rest % p == 0) {
                primes.push_back(p);
                while (rest % p == 0) rest /= p;
            }
        }
        if (rest > 1) primes.push_back(rest);
        auto slow_pow = [&](std::uint64_t a, std::uint64_t e) {
            std::uint64_t r = 1;
            while (e != 0) {
                if (e & 1) r = detail::clmul_reduce(r, a, m_, modulus_);
                a = detail::clmul_reduce(a, a, m_, modulus_);
                e >>= 1;
            }
            return r;
        };
        for (Element g = 2; g <= mask(); ++g) {
            bool primitive = true;
            for (std::uint32_t p : primes) {
                if (slow_pow(g, group / p) == 1) {
                    primitive = false;
                    break;
                }
            }
            if (primitive) return g;
        }
        return 1; // GF(2^m) with group order 1 does not occur for m >= 2
    }

    unsigned m_;
    std::uint64_t modulus_;
    std::shared_ptr<const Tables> tables_;
};

/// Rank of the vectors viewed as bit vectors over F_2.
inline std::size_t rank_over_f2(std::span<const Element> vectors) {
    // basis[b] holds a reduced vector whose leading bit is b
    Element basis[32] = {};
    std::size_t rank = 0;
    for (Element v : vectors) {
        while (v != 0) {
            const unsigned lead = static_cast<unsigned>(std::bit_width(v)) - 1;
            if (basis[lead] == 0) {
                basis[lead] = v;
                ++rank;
                break;
            }
            v ^= basis[lead];
        }
    }
    return rank;
}

} // namespace hsrc::gf
