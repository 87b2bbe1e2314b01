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
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hsrc/codec.hpp"
#include "hsrc/error.hpp"

namespace hsrc {

// Per-node fragment file, all integers big-endian:
//
//   offset  size  field
//        0     5  magic "HSRC1"
//        5     1  m
//        6     8  modulus (bit pattern, degree m)
//       14     4  n
//       18     4  k
//       22     4  node_index (1-based)
//       26     8  u (chunks that follow)
//       34     8  M (object length in bits, before padding)
//       42     -  u chunks, ceil(m/8) bytes each
//
// Evaluation points are not stored; files always use alpha_i = i.

inline constexpr std::array<char, 5> kFragmentMagic = {'H', 'S', 'R', 'C', '1'};
inline constexpr std::size_t kFragmentHeaderBytes = 42;

struct FragmentHeader {
    unsigned m = 0;
    std::uint64_t modulus = 0;
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::uint32_t node_index = 0;
    std::uint64_t rows = 0;
    std::uint64_t object_bits = 0;

    friend bool operator==(const FragmentHeader &, const FragmentHeader &) = default;
};

struct FragmentFile {
    FragmentHeader header;
    Fragment chunks;

    friend bool operator==(const FragmentFile &, const FragmentFile &) = default;
};

namespace detail {

inline void put_be(std::vector<std::uint8_t> &out, std::uint64_t value, std::size_t bytes) {
    for (std::size_t i = bytes; i > 0; --i) out.push_back(static_cast<std::uint8_t>(value >> (8 * (i - 1))));
}

inline std::uint64_t get_be(std::span<const std::uint8_t> in, std::size_t offset, std::size_t bytes) {
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < bytes; ++i) value = (value << 8) | in[offset + i];
    return value;
}

} // namespace detail

inline std::vector<std::uint8_t> serialize_fragment(const FragmentFile &file) {
    const auto &h = file.header;
    if (file.chunks.size() != h.rows) {
        throw Error(ErrorCode::InvalidArgument, "header chunk count does not match fragment length");
    }
    const std::size_t width = (h.m + 7) / 8;
    std::vector<std::uint8_t> out;
    out.reserve(kFragmentHeaderBytes + width * file.chunks.size());
    out.insert(out.end(), kFragmentMagic.begin(), kFragmentMagic.end());
    detail::put_be(out, h.m, 1);
    detail::put_be(out, h.modulus, 8);
    detail::put_be(out, h.n, 4);
    detail::put_be(out, h.k, 4);
    detail::put_be(out, h.node_index, 4);
    detail::put_be(out, h.rows, 8);
    detail::put_be(out, h.object_bits, 8);
    for (gf::Element chunk : file.chunks) detail::put_be(out, chunk, width);
    return out;
}

inline FragmentFile parse_fragment(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFragmentHeaderBytes) throw Error(ErrorCode::Parse, "fragment file shorter than its header");
    if (!std::equal(kFragmentMagic.begin(), kFragmentMagic.end(), bytes.begin())) {
        throw Error(ErrorCode::Parse, "bad fragment magic");
    }
    FragmentFile file;
    auto &h = file.header;
    h.m = static_cast<unsigned>(detail::get_be(bytes, 5, 1));
    h.modulus = detail::get_be(bytes, 6, 8);
    h.n = static_cast<std::uint32_t>(detail::get_be(bytes, 14, 4));
    h.k = static_cast<std::uint32_t>(detail::get_be(bytes, 18, 4));
    h.node_index = static_cast<std::uint32_t>(detail::get_be(bytes, 22, 4));
    h.rows = detail::get_be(bytes, 26, 8);
    h.object_bits = detail::get_be(bytes, 34, 8);
    if (h.m < gf::kMinDegree || h.m > gf::kMaxDegree) throw Error(ErrorCode::Parse, "field degree out of range");
    if (h.node_index < 1 || h.node_index > h.n) throw Error(ErrorCode::Parse, "node index outside 1..n");

    const std::size_t width = (h.m + 7) / 8;
    const std::size_t payload = bytes.size() - kFragmentHeaderBytes;
    if (payload % width != 0 || payload / width != h.rows) {
        throw Error(ErrorCode::Parse, "payload length does not match " + std::to_string(h.rows) + " chunks");
    }
    const std::uint64_t limit = std::uint64_t{1} << h.m;
    file.chunks.resize(h.rows);
    for (std::uint64_t j = 0; j < h.rows; ++j) {
        const std::uint64_t v = detail::get_be(bytes, kFragmentHeaderBytes + j * width, width);
        if (v >= limit) throw Error(ErrorCode::Parse, "chunk " + std::to_string(j) + " exceeds m bits");
        file.chunks[j] = static_cast<gf::Element>(v);
    }
    return file;
}

inline FragmentHeader make_header(const CodeParams &params, std::size_t node_index, std::uint64_t rows,
                                  std::uint64_t object_bits) {
    FragmentHeader h;
    h.m = params.m();
    h.modulus = params.field().modulus();
    h.n = static_cast<std::uint32_t>(params.n());
    h.k = static_cast<std::uint32_t>(params.k());
    h.node_index = static_cast<std::uint32_t>(node_index);
    h.rows = rows;
    h.object_bits = object_bits;
    return h;
}

/// Code parameters described by a header (standard evaluation points).
inline CodeParams params_from_header(const FragmentHeader &h) {
    try {
        return CodeParams::standard(h.n, h.k, gf::Field(h.m, h.modulus));
    } catch (const Error &e) {
        throw Error(ErrorCode::Parse, std::string("fragment header describes an invalid code: ") + e.what());
    }
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path &path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

inline std::filesystem::path fragment_path(const std::filesystem::path &dir, std::size_t node_index) {
    return dir / ("fragment_" + std::to_string(node_index) + ".hsrc");
}

inline void write_fragment_set(const std::filesystem::path &dir, const FragmentSet &set, const CodeParams &params) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 1; i <= params.n(); ++i) {
        FragmentFile file{make_header(params, i, set.rows(), set.object_bits), set.fragment(i)};
        write_file_bytes(fragment_path(dir, i), serialize_fragment(file));
    }
}

/// Loads every *.hsrc file in dir; all headers must describe the same code
/// and object.
inline std::map<std::size_t, FragmentFile> read_fragment_dir(const std::filesystem::path &dir) {
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " is not a directory");
    std::vector<std::filesystem::path> paths;
    for (const auto &entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".hsrc") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::map<std::size_t, FragmentFile> out;
    for (const auto &path : paths) {
        auto file = parse_fragment(read_file_bytes(path));
        if (!out.empty()) {
            auto ref = out.begin()->second.header;
            ref.node_index = file.header.node_index;
            if (!(ref == file.header)) throw Error(ErrorCode::Parse, path.string() + " disagrees with sibling headers");
        }
        const std::size_t idx = file.header.node_index;
        if (!out.emplace(idx, std::move(file)).second) {
            throw Error(ErrorCode::Parse, "duplicate fragment for node " + std::to_string(idx));
        }
    }
    return out;
}

} // namespace hsrc
