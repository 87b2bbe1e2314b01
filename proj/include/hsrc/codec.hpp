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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hsrc/error.hpp"
#include "hsrc/gf.hpp"

namespace hsrc {

/// One node's encoded data: chunk j of the fragment is r_{j,i}.
using Fragment = std::vector<gf::Element>;

/// <n, k> code over GF(2^m) with evaluation points alpha_1..alpha_n.
///
/// Node indices are 1-based throughout the library, matching triplet notation.
class CodeParams {
  public:
    /// alpha_i is the m-bit binary expansion of i, so alpha_i + alpha_j is
    /// alpha_(i xor j) whenever i xor j <= n.
    static CodeParams standard(std::size_t n, std::size_t k, unsigned m) {
        return standard(n, k, gf::Field(m));
    }

    static CodeParams standard(std::size_t n, std::size_t k, gf::Field field) {
        std::vector<gf::Element> alphas(n);
        for (std::size_t i = 0; i < n; ++i) alphas[i] = static_cast<gf::Element>(i + 1);
        return CodeParams(n, k, std::move(field), std::move(alphas));
    }

    CodeParams(std::size_t n, std::size_t k, gf::Field field, std::vector<gf::Element> alphas)
        : n_(n), k_(k), field_(std::move(field)), alphas_(std::move(alphas)) {
        if (!(1 < k_ && k_ < n_ && n_ < field_.order())) {
            throw Error(ErrorCode::InvalidParams, "need 1 < k < n <= 2^m - 1 (n=" + std::to_string(n_) +
                                                      ", k=" + std::to_string(k_) +
                                                      ", m=" + std::to_string(field_.degree()) + ")");
        }
        if (alphas_.size() != n_) {
            throw Error(ErrorCode::InvalidParams, "expected one evaluation point per fragment");
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if (alphas_[i] == 0 || !field_.contains(alphas_[i])) {
                throw Error(ErrorCode::InvalidParams, "evaluation points must be nonzero field elements");
            }
            if (!index_of_.emplace(alphas_[i], i + 1).second) {
                throw Error(ErrorCode::InvalidParams, "evaluation points must be pairwise distinct");
            }
        }
        if (gf::rank_over_f2(alphas_) < k_) {
            throw Error(ErrorCode::InvalidParams, "evaluation points span fewer than k dimensions over F_2");
        }
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    unsigned m() const noexcept { return field_.degree(); }
    const gf::Field &field() const noexcept { return field_; }
    std::span<const gf::Element> alphas() const noexcept { return alphas_; }

    gf::Element alpha(std::size_t index) const {
        check_index(index);
        return alphas_[index - 1];
    }

    /// Index whose evaluation point equals value, if any.
    std::optional<std::size_t> index_of(gf::Element value) const {
        auto it = index_of_.find(value);
        if (it == index_of_.end()) return std::nullopt;
        return it->second;
    }

    void check_index(std::size_t index) const {
        if (index < 1 || index > n_) {
            throw Error(ErrorCode::InvalidArgument,
                        "node index " + std::to_string(index) + " outside 1.." + std::to_string(n_));
        }
    }

    /// Bits carried by one chunk row: k symbols of m bits.
    std::uint64_t row_bits() const noexcept { return static_cast<std::uint64_t>(k_) * m(); }

  private:
    std::size_t n_;
    std::size_t k_;
    gf::Field field_;
    std::vector<gf::Element> alphas_;
    std::unordered_map<gf::Element, std::size_t> index_of_;
};

/// Raw object of `bits` bits stored MSB-first in `bytes`.
struct DataObject {
    std::vector<std::uint8_t> bytes;
    std::uint64_t bits = 0;

    static DataObject from_bytes(std::vector<std::uint8_t> data) {
        DataObject obj;
        obj.bits = static_cast<std::uint64_t>(data.size()) * 8;
        obj.bytes = std::move(data);
        return obj;
    }

    bool bit(std::uint64_t index) const {
        if (index >= bits) return false;
        return (bytes[index / 8] >> (7 - index % 8)) & 1;
    }

    /// Number of k x m-bit rows after zero padding.
    std::uint64_t rows(const CodeParams &params) const {
        return (bits + params.row_bits() - 1) / params.row_bits();
    }

    bool padded(const CodeParams &params) const { return rows(params) * params.row_bits() != bits; }

    /// Symbol `index` of the zero-padded object, first bit as most significant.
    gf::Element symbol(std::uint64_t index, unsigned m) const {
        gf::Element value = 0;
        const std::uint64_t first = index * m;
        for (unsigned b = 0; b < m; ++b) value = (value << 1) | (bit(first + b) ? 1u : 0u);
        return value;
    }

    friend bool operator==(const DataObject &, const DataObject &) = default;
};

/// Fragments r_1..r_n of one encoded object; fragments[i - 1] is node i's.
struct FragmentSet {
    std::vector<Fragment> fragments;
    std::uint64_t object_bits = 0;

    const Fragment &fragment(std::size_t index) const { return fragments.at(index - 1); }
    std::size_t rows() const { return fragments.empty() ? 0 : fragments.front().size(); }

    friend bool operator==(const FragmentSet &, const FragmentSet &) = default;
};

namespace detail {

/// powers[t] = alpha^(2^t) for t in [0, k)
inline std::vector<gf::Element> frobenius_powers(gf::Element alpha, const CodeParams &params) {
    std::vector<gf::Element> powers(params.k());
    gf::Element x = alpha;
    for (std::size_t t = 0; t < params.k(); ++t) {
        powers[t] = x;
        x = params.field().square(x);
    }
    return powers;
}

inline gf::Element dot(std::span<const gf::Element> symbols, std::span<const gf::Element> powers,
                       const gf::Field &field) {
    gf::Element acc = 0;
    for (std::size_t t = 0; t < symbols.size(); ++t) acc ^= field.mul(symbols[t], powers[t]);
    return acc;
}

inline std::vector<gf::Element> row_symbols(const DataObject &obj, std::uint64_t row, const CodeParams &params) {
    std::vector<gf::Element> symbols(params.k());
    for (std::size_t t = 0; t < params.k(); ++t) symbols[t] = obj.symbol(row * params.k() + t, params.m());
    return symbols;
}

inline void check_symbols(std::span<const gf::Element> symbols, const CodeParams &params) {
    if (symbols.size() != params.k()) {
        throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(params.k()) + " symbols, got " +
                                                    std::to_string(symbols.size()));
    }
    for (gf::Element s : symbols) {
        if (!params.field().contains(s)) throw Error(ErrorCode::InvalidArgument, "symbol exceeds m bits");
    }
}

inline void check_object(const DataObject &obj) {
    if (obj.bits == 0) throw Error(ErrorCode::EmptyObject, "cannot encode an empty object");
    if (obj.bytes.size() * 8 < obj.bits) throw Error(ErrorCode::InvalidArgument, "object shorter than its bit count");
}

} // namespace detail

/// p(alpha) for p(X) = sum_i o_i X^(2^(i-1)).
inline gf::Element eval_poly(std::span<const gf::Element> symbols, gf::Element alpha, const CodeParams &params) {
    detail::check_symbols(symbols, params);
    if (alpha == 0) throw Error(ErrorCode::InvalidArgument, "evaluation point must be nonzero");
    if (!params.field().contains(alpha)) throw Error(ErrorCode::InvalidArgument, "evaluation point exceeds m bits");
    return detail::dot(symbols, detail::frobenius_powers(alpha, params), params.field());
}

/// Encodes one k-symbol row into its n chunks r_{j,1..n}; rows are independent
/// so a producer can dispatch each row as soon as its k symbols are known.
inline std::vector<gf::Element> encode_stream(std::span<const gf::Element> row, const CodeParams &params) {
    detail::check_symbols(row, params);
    std::vector<gf::Element> out(params.n());
    for (std::size_t i = 1; i <= params.n(); ++i) {
        out[i - 1] = detail::dot(row, detail::frobenius_powers(params.alpha(i), params), params.field());
    }
    return out;
}

inline FragmentSet encode(const DataObject &obj, const CodeParams &params) {
    detail::check_object(obj);
    const std::uint64_t rows = obj.rows(params);
    std::vector<std::vector<gf::Element>> powers;
    powers.reserve(params.n());
    for (std::size_t i = 1; i <= params.n(); ++i) powers.push_back(detail::frobenius_powers(params.alpha(i), params));

    FragmentSet out;
    out.object_bits = obj.bits;
    out.fragments.assign(params.n(), Fragment(rows));
    for (std::uint64_t j = 0; j < rows; ++j) {
        const auto symbols = detail::row_symbols(obj, j, params);
        for (std::size_t i = 0; i < params.n(); ++i) {
            out.fragments[i][j] = detail::dot(symbols, powers[i], params.field());
        }
    }
    return out;
}

/// Lexicographically smallest set of indices (ascending greedy over a linear
/// matroid) drawn from `candidates` whose evaluation points are independent.
/// Returns fewer than k indices when the candidates have rank < k.
inline std::vector<std::size_t> first_independent(std::span<const std::size_t> candidates, const CodeParams &params) {
    std::vector<std::size_t> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> chosen;
    std::vector<gf::Element> points;
    for (std::size_t idx : sorted) {
        points.push_back(params.alpha(idx));
        if (gf::rank_over_f2(points) == points.size()) {
            chosen.push_back(idx);
            if (chosen.size() == params.k()) break;
        } else {
            points.pop_back();
        }
    }
    return chosen;
}

/// Indices of the basis the source evaluates directly ({1, 2, 4} at <7,3>).
inline std::vector<std::size_t> source_basis(const CodeParams &params) {
    std::vector<std::size_t> all(params.n());
    for (std::size_t i = 0; i < params.n(); ++i) all[i] = i + 1;
    return first_independent(all, params);
}

/// Evaluates only the source basis, then derives every other fragment in
/// increasing index order as the xor of the lexicographically smallest pair
/// of already produced fragments.
inline FragmentSet encode_via_basis(const DataObject &obj, const CodeParams &params) {
    detail::check_object(obj);
    const std::uint64_t rows = obj.rows(params);
    const auto basis = source_basis(params);

    FragmentSet out;
    out.object_bits = obj.bits;
    out.fragments.assign(params.n(), Fragment(rows));
    std::vector<bool> produced(params.n() + 1, false);
    for (std::size_t idx : basis) {
        const auto powers = detail::frobenius_powers(params.alpha(idx), params);
        for (std::uint64_t j = 0; j < rows; ++j) {
            out.fragments[idx - 1][j] = detail::dot(detail::row_symbols(obj, j, params), powers, params.field());
        }
        produced[idx] = true;
    }

    std::vector<std::size_t> pending;
    for (std::size_t d = 1; d <= params.n(); ++d) {
        if (!produced[d]) pending.push_back(d);
    }
    while (!pending.empty()) {
        bool progress = false;
        for (auto it = pending.begin(); it != pending.end();) {
            const std::size_t d = *it;
            std::optional<std::pair<std::size_t, std::size_t>> pair;
            for (std::size_t i = 1; i <= params.n() && !pair; ++i) {
                if (!produced[i]) continue;
                auto j = params.index_of(params.alpha(i) ^ params.alpha(d));
                if (j && *j > i && produced[*j]) pair.emplace(i, *j);
            }
            if (!pair) {
                ++it;
                continue;
            }
            auto &target = out.fragments[d - 1];
            const auto &a = out.fragments[pair->first - 1];
            const auto &b = out.fragments[pair->second - 1];
            for (std::uint64_t j = 0; j < rows; ++j) target[j] = a[j] ^ b[j];
            produced[d] = true;
            it = pending.erase(it);
            progress = true;
            break; // restart so derivation stays in increasing index order
        }
        if (!progress) {
            // Not reachable through pairs of produced fragments; evaluate directly.
            const std::size_t d = pending.front();
            const auto powers = detail::frobenius_powers(params.alpha(d), params);
            for (std::uint64_t j = 0; j < rows; ++j) {
                out.fragments[d - 1][j] = detail::dot(detail::row_symbols(obj, j, params), powers, params.field());
            }
            produced[d] = true;
            pending.erase(pending.begin());
        }
    }
    return out;
}

/// Regenerates fragment `target` as the chunk-wise xor of fragments a and b.
inline Fragment repair(std::size_t index_a, const Fragment &frag_a, std::size_t index_b, const Fragment &frag_b,
                       std::size_t target, const CodeParams &params) {
    params.check_index(index_a);
    params.check_index(index_b);
    params.check_index(target);
    if (index_a == index_b || index_a == target || index_b == target ||
        (params.alpha(index_a) ^ params.alpha(index_b)) != params.alpha(target)) {
        throw Error(ErrorCode::TripletMismatch, "(" + std::to_string(index_a) + "," + std::to_string(index_b) +
                                                    ") cannot generate fragment " + std::to_string(target));
    }
    if (frag_a.size() != frag_b.size()) {
        throw Error(ErrorCode::InvalidArgument, "fragments have different lengths");
    }
    Fragment out(frag_a.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = frag_a[j] ^ frag_b[j];
    return out;
}

namespace detail {

/// Inverts a square matrix over GF(2^m) by Gauss-Jordan elimination; returns
/// nullopt when singular.
inline std::optional<std::vector<std::vector<gf::Element>>> invert(std::vector<std::vector<gf::Element>> a,
                                                                   const gf::Field &field) {
    const std::size_t size = a.size();
    std::vector<std::vector<gf::Element>> inv(size, std::vector<gf::Element>(size, 0));
    for (std::size_t i = 0; i < size; ++i) inv[i][i] = 1;
    for (std::size_t col = 0; col < size; ++col) {
        std::size_t pivot = col;
        while (pivot < size && a[pivot][col] == 0) ++pivot;
        if (pivot == size) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        const gf::Element scale = field.inv(a[col][col]);
        for (std::size_t c = 0; c < size; ++c) {
            a[col][c] = field.mul(a[col][c], scale);
            inv[col][c] = field.mul(inv[col][c], scale);
        }
        for (std::size_t r = 0; r < size; ++r) {
            if (r == col || a[r][col] == 0) continue;
            const gf::Element factor = a[r][col];
            for (std::size_t c = 0; c < size; ++c) {
                a[r][c] ^= field.mul(factor, a[col][c]);
                inv[r][c] ^= field.mul(factor, inv[col][c]);
            }
        }
    }
    return inv;
}

} // namespace detail

/// Reconstructs the first `object_bits` bits of the object from any set of
/// fragments containing k with independent evaluation points. Fragments may
/// be longer than needed; only the leading rows are used.
inline DataObject decode(const std::map<std::size_t, Fragment> &available, const CodeParams &params,
                         std::uint64_t object_bits) {
    if (available.size() < params.k()) {
        throw Error(ErrorCode::InsufficientFragments, "need " + std::to_string(params.k()) + " fragments, got " +
                                                          std::to_string(available.size()));
    }
    std::vector<std::size_t> indices;
    for (const auto &[idx, frag] : available) {
        params.check_index(idx);
        indices.push_back(idx);
    }
    const auto chosen = first_independent(indices, params);
    if (chosen.size() < params.k()) {
        throw Error(ErrorCode::DependentFragments, "available fragments span rank " + std::to_string(chosen.size()) +
                                                       " < k=" + std::to_string(params.k()));
    }

    const std::uint64_t rows = (object_bits + params.row_bits() - 1) / params.row_bits();
    for (std::size_t idx : chosen) {
        if (available.at(idx).size() < rows) {
            throw Error(ErrorCode::InvalidArgument, "fragment " + std::to_string(idx) + " holds fewer than " +
                                                        std::to_string(rows) + " chunks");
        }
    }

    // Moore system: sum_t o_t alpha_c^(2^t) = r_c for each chosen c.
    std::vector<std::vector<gf::Element>> moore;
    for (std::size_t idx : chosen) moore.push_back(detail::frobenius_powers(params.alpha(idx), params));
    auto inverse = detail::invert(std::move(moore), params.field());
    if (!inverse) throw Error(ErrorCode::DependentFragments, "Moore matrix is singular");

    DataObject obj;
    obj.bits = object_bits;
    obj.bytes.assign((object_bits + 7) / 8, 0);
    const unsigned m = params.m();
    const std::size_t k = params.k();
    std::uint64_t bit_pos = 0;
    for (std::uint64_t j = 0; j < rows; ++j) {
        for (std::size_t t = 0; t < k; ++t) {
            gf::Element symbol = 0;
            for (std::size_t c = 0; c < k; ++c) {
                symbol ^= params.field().mul((*inverse)[t][c], available.at(chosen[c])[j]);
            }
            for (unsigned b = 0; b < m; ++b, ++bit_pos) {
                if (bit_pos >= object_bits) break;
                if ((symbol >> (m - 1 - b)) & 1) obj.bytes[bit_pos / 8] |= static_cast<std::uint8_t>(0x80u >> (bit_pos % 8));
            }
        }
    }
    return obj;
}

} // namespace hsrc
