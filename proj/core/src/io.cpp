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

#include "hfs/io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace hfs::io {
namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace {

template <class U>
U to_le(U v) {
    if constexpr (std::endian::native == std::endian::big) {
        U out = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) out = (out << 8) | ((v >> (8 * i)) & 0xff);
        return out;
    }
    return v;
}

}  // namespace

const char* to_string(FormatErrc code) {
    switch (code) {
        case FormatErrc::bad_magic: return "bad magic";
        case FormatErrc::bad_version: return "unsupported version";
        case FormatErrc::truncated: return "truncated";
        case FormatErrc::malformed: return "malformed";
    }
    return "unknown";
}

void ByteWriter::bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    buf_.insert(buf_.end(), p, p + n);
}

void ByteWriter::u32(std::uint32_t v) {
    v = to_le(v);
    bytes(&v, 4);
}

void ByteWriter::u64(std::uint64_t v) {
    v = to_le(v);
    bytes(&v, 8);
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
}

void ByteReader::fail(FormatErrc code, const std::string& detail) const {
    throw FormatError(code, pos_, source_ + ": " + to_string(code) + " at offset " + std::to_string(pos_) + ": " + detail);
}

void ByteReader::need(std::size_t n) {
    if (n > size_ - pos_) {
        fail(FormatErrc::truncated,
             "need " + std::to_string(n) + " bytes, " + std::to_string(size_ - pos_) + " remain");
    }
}

void ByteReader::bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
}

std::uint32_t ByteReader::u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return to_le(v);
}

std::uint64_t ByteReader::u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return to_le(v);
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }
double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str(std::size_t max_len) {
    const std::size_t n = u32();
    if (n > max_len) fail(FormatErrc::malformed, "string length " + std::to_string(n) + " exceeds limit");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
}

void ByteReader::expect_magic(const char (&magic)[5]) {
    if (remaining() < 4) fail(FormatErrc::truncated, "file shorter than its magic");
    if (std::memcmp(data_ + pos_, magic, 4) != 0) {
        fail(FormatErrc::bad_magic, std::string("expected \"") + magic + "\"");
    }
    pos_ += 4;
}

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path);
    return data;
}

void write_file(const std::string& path, const std::vector<unsigned char>& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& text) {
    write_file(path, std::vector<unsigned char>(text.begin(), text.end()));
}

std::string read_text_file(const std::string& path) {
    const auto bytes = read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

std::vector<unsigned char> encode_feature_file(const FeatureFile& file) {
    const auto& f = file.features;
    if (f.rank() != 2) throw ValidationError("feature file needs an N x d matrix, got " + diff::shape_str(f.shape()));
    if (file.timestamps.size() != f.rows()) {
        throw ValidationError("feature file: " + std::to_string(file.timestamps.size()) + " timestamps for " +
                              std::to_string(f.rows()) + " frames");
    }
    ByteWriter w;
    w.bytes("HFSF", 4);
    w.u32(kFeatureFileVersion);
    w.u32(static_cast<std::uint32_t>(f.rows()));
    w.u32(static_cast<std::uint32_t>(f.cols()));
    for (double x : f.values()) w.f32(static_cast<float>(x));
    for (double t : file.timestamps) w.f32(static_cast<float>(t));
    return w.buffer();
}

FeatureFile decode_feature_file(const std::vector<unsigned char>& bytes, const std::string& source) {
    ByteReader r(bytes.data(), bytes.size(), source);
    r.expect_magic("HFSF");
    const auto version = r.u32();
    if (version != kFeatureFileVersion) {
        r.fail(FormatErrc::bad_version, "version " + std::to_string(version) + ", expected " +
                                            std::to_string(kFeatureFileVersion));
    }
    const std::uint64_t n = r.u32();
    const std::uint64_t d = r.u32();
    const std::uint64_t expected = 16 + 4 * n * d + 4 * n;
    if (bytes.size() < expected) {
        r.fail(FormatErrc::truncated, "N=" + std::to_string(n) + " d=" + std::to_string(d) + " needs " +
                                          std::to_string(expected) + " bytes, file has " +
                                          std::to_string(bytes.size()));
    }
    if (bytes.size() > expected) {
        r.fail(FormatErrc::malformed, std::to_string(bytes.size() - expected) + " trailing bytes");
    }
    FeatureFile out;
    out.features = Tensor({n, d});
    for (auto& x : out.features.values()) x = r.f32();
    out.timestamps.resize(n);
    for (auto& t : out.timestamps) t = r.f32();
    return out;
}

void write_feature_file(const std::string& path, const FeatureFile& file) { write_file(path, encode_feature_file(file)); }

FeatureFile read_feature_file(const std::string& path) { return decode_feature_file(read_file(path), path); }

namespace {

void put_tensor(ByteWriter& w, const Tensor& t) {
    for (double x : t.values()) w.f64(x);
}

Tensor get_tensor(ByteReader& r, diff::Shape shape) {
    Tensor t(std::move(shape));
    for (auto& x : t.values()) x = r.f64();
    return t;
}

[[noreturn]] void manifest_fail(const std::string& path, std::size_t line, const std::string& what) {
    throw FormatError(FormatErrc::malformed, line, path + " line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_dataset(const std::string& dir, const Dataset& dataset) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

    ByteWriter blob;
    std::ostringstream manifest;
    json header = {{"format", "hfs-dataset"},
                   {"version", kDatasetVersion},
                   {"count", dataset.episodes.size()},
                   {"seed", dataset.seed},
                   {"blob", kBlobName},
                   {"spec", json::parse(synth::spec_to_json(dataset.spec))}};
    manifest << header.dump() << '\n';
    for (std::size_t i = 0; i < dataset.episodes.size(); ++i) {
        const auto& e = dataset.episodes[i];
        json rec = {{"index", i},
                    {"offset", blob.buffer().size()},
                    {"n_frames", e.n_frames()},
                    {"dim", e.dim()},
                    {"num_options", e.num_options()},
                    {"answer", e.answer},
                    {"evidence", e.evidence},
                    {"duplicates", e.duplicates},
                    {"lead_evidence", e.lead_evidence}};
        manifest << rec.dump() << '\n';
        put_tensor(blob, e.features);
        for (double t : e.timestamps) blob.f64(t);
        put_tensor(blob, e.question);
        put_tensor(blob, e.options);
    }
    write_file((fs::path(dir) / kBlobName).string(), blob.buffer());
    write_text_file((fs::path(dir) / kManifestName).string(), manifest.str());
}

Dataset read_dataset(const std::string& dir) {
    const std::string manifest_path = (fs::path(dir) / kManifestName).string();
    const std::string blob_path = (fs::path(dir) / kBlobName).string();
    std::istringstream manifest(read_text_file(manifest_path));
    const auto blob = read_file(blob_path);

    Dataset out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t count = 0;
    ByteReader r(blob.data(), blob.size(), blob_path);
    while (std::getline(manifest, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            manifest_fail(manifest_path, line_no, e.what());
        }
        try {
            if (line_no == 1) {
                if (rec.value("format", "") != "hfs-dataset") manifest_fail(manifest_path, 1, "not an hfs dataset");
                const auto version = rec.at("version").get<std::uint32_t>();
                if (version != kDatasetVersion) {
                    throw FormatError(FormatErrc::bad_version, 1,
                                      manifest_path + " line 1: dataset version " + std::to_string(version) +
                                          ", expected " + std::to_string(kDatasetVersion));
                }
                count = rec.at("count").get<std::size_t>();
                out.seed = rec.at("seed").get<std::uint64_t>();
                out.spec = synth::spec_from_json(rec.at("spec").dump());
                out.episodes.reserve(count);
                continue;
            }
            const auto index = rec.at("index").get<std::size_t>();
            if (index != out.episodes.size()) {
                manifest_fail(manifest_path, line_no, "record index " + std::to_string(index) + ", expected " +
                                                          std::to_string(out.episodes.size()));
            }
            const auto offset = rec.at("offset").get<std::size_t>();
            if (offset != r.offset()) {
                manifest_fail(manifest_path, line_no, "blob offset " + std::to_string(offset) + ", expected " +
                                                          std::to_string(r.offset()));
            }
            const auto n = rec.at("n_frames").get<std::size_t>();
            const auto d = rec.at("dim").get<std::size_t>();
            const auto c = rec.at("num_options").get<std::size_t>();
            synth::Episode e;
            e.answer = rec.at("answer").get<std::size_t>();
            e.evidence = rec.at("evidence").get<std::vector<std::size_t>>();
            e.duplicates = rec.at("duplicates").get<std::vector<std::size_t>>();
            e.lead_evidence = rec.at("lead_evidence").get<std::size_t>();
            if (e.answer >= c) manifest_fail(manifest_path, line_no, "answer out of range");
            for (auto i : e.evidence) {
                if (i >= n) manifest_fail(manifest_path, line_no, "evidence index out of range");
            }
            for (auto i : e.duplicates) {
                if (i >= n) manifest_fail(manifest_path, line_no, "duplicate index out of range");
            }
            e.features = get_tensor(r, {n, d});
            e.timestamps.resize(n);
            for (auto& t : e.timestamps) t = r.f64();
            e.question = get_tensor(r, {d});
            e.options = get_tensor(r, {c, d});
            out.episodes.push_back(std::move(e));
        } catch (const json::exception& e) {
            manifest_fail(manifest_path, line_no, e.what());
        } catch (const ValidationError& e) {
            manifest_fail(manifest_path, line_no, e.what());
        }
    }
    if (line_no == 0) manifest_fail(manifest_path, 1, "missing header");
    if (out.episodes.size() != count) {
        manifest_fail(manifest_path, line_no, "header promises " + std::to_string(count) + " episodes, found " +
                                                  std::to_string(out.episodes.size()));
    }
    if (r.remaining() != 0) r.fail(FormatErrc::malformed, std::to_string(r.remaining()) + " trailing bytes");
    return out;
}

}  // namespace hfs::io
