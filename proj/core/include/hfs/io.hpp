/* Copyright 2026 The HFS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hfs/diff/tensor.hpp"
#include "hfs/error.hpp"
#include "hfs/synthdata.hpp"

namespace hfs::io {

using diff::Tensor;

// Why a binary container was refused. Each reason is distinct so callers can
// tell a foreign file from a stale one from a cut-off one.
enum class FormatErrc {
    bad_magic = 1,
    bad_version = 2,
    truncated = 3,
    malformed = 4,
};

class FormatError : public IoError {
public:
    FormatError(FormatErrc code, std::uint64_t offset, const std::string& what)
        : IoError(what), code_(code), offset_(offset) {}
    FormatErrc code() const noexcept { return code_; }
    std::uint64_t offset() const noexcept { return offset_; }

private:
    FormatErrc code_;
    std::uint64_t offset_;
};

const char* to_string(FormatErrc code);

// Little-endian append-only buffer.
class ByteWriter {
public:
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void f64(double v);
    void bytes(const void* data, std::size_t n);
    void str(const std::string& s);  // u32 length + bytes
    const std::vector<unsigned char>& buffer() const noexcept { return buf_; }

private:
    std::vector<unsigned char> buf_;
};

// Bounds-checked little-endian cursor. Every failure names the byte offset.
class ByteReader {
public:
    ByteReader(const unsigned char* data, std::size_t size, std::string source)
        : data_(data), size_(size), source_(std::move(source)) {}
    std::uint32_t u32();
    std::uint64_t u64();
    float f32();
    double f64();
    void bytes(void* out, std::size_t n);
    std::string str(std::size_t max_len = 1u << 26);
    std::size_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return size_ - pos_; }
    const std::string& source() const noexcept { return source_; }
    void expect_magic(const char (&magic)[5]);
    [[noreturn]] void fail(FormatErrc code, const std::string& detail) const;

private:
    void need(std::size_t n);
    const unsigned char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
    std::string source_;
};

std::vector<unsigned char> read_file(const std::string& path);
// Writes via a sibling temp file then renames, so readers never see a partial file.
void write_file(const std::string& path, const std::vector<unsigned char>& bytes);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// HFSF: "HFSF", u32 version, u32 N, u32 d, N*d f32 features row-major, N f32 timestamps.
inline constexpr std::uint32_t kFeatureFileVersion = 1;

struct FeatureFile {
    Tensor features;  // N x d, f32 values widened to f64
    std::vector<double> timestamps;
};

std::vector<unsigned char> encode_feature_file(const FeatureFile& file);
FeatureFile decode_feature_file(const std::vector<unsigned char>& bytes, const std::string& source = "<memory>");
void write_feature_file(const std::string& path, const FeatureFile& file);
FeatureFile read_feature_file(const std::string& path);

// Dataset directory: manifest.jsonl (header line, then one record per episode)
// and features.bin, the f64 payload each record points into.
inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr const char* kManifestName = "manifest.jsonl";
inline constexpr const char* kBlobName = "features.bin";

struct Dataset {
    synth::EpisodeSpec spec;
    std::uint64_t seed = 0;
    std::vector<synth::Episode> episodes;
};

void write_dataset(const std::string& dir, const Dataset& dataset);
Dataset read_dataset(const std::string& dir);

}  // namespace hfs::io
