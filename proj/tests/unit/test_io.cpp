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

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "hfs/io.hpp"

using namespace hfs;
using namespace hfs::io;

namespace {

FeatureFile sample_feature_file() {
    FeatureFile f;
    f.features = Tensor::matrix(3, 2, {0.5, -1.25, 3.0, 1e-3f, -7.0, 2.5});
    f.timestamps = {0.0, 1.5, 4.0};
    return f;
}

FormatErrc decode_errc(const std::vector<unsigned char>& bytes) {
    try {
        decode_feature_file(bytes);
    } catch (const FormatError& e) {
        return e.code();
    }
    FAIL("decode unexpectedly succeeded");
    return FormatErrc::malformed;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& l : lines) out << l << '\n';
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("byte writer and reader are little-endian and bounds-checked") {
    ByteWriter w;
    w.u32(0x01020304u);
    w.u64(42);
    w.f64(-0.5);
    w.str("abc");
    const auto& b = w.buffer();
    CHECK(b[0] == 0x04);
    CHECK(b[3] == 0x01);
    ByteReader r(b.data(), b.size(), "buf");
    CHECK(r.u32() == 0x01020304u);
    CHECK(r.u64() == 42);
    CHECK(r.f64() == -0.5);
    CHECK(r.str() == "abc");
    CHECK(r.remaining() == 0);
    try {
        r.u32();
        FAIL("expected truncation");
    } catch (const FormatError& e) {
        CHECK(e.code() == FormatErrc::truncated);
        CHECK(e.offset() == b.size());
        CHECK(std::string(e.what()).find("buf") != std::string::npos);
    }
}

TEST_CASE("feature file layout and bit-exact round trip") {
    const auto f = sample_feature_file();
    const auto bytes = encode_feature_file(f);
    CHECK(bytes.size() == 16 + 4 * 3 * 2 + 4 * 3);
    CHECK(std::memcmp(bytes.data(), "HFSF", 4) == 0);
    const auto back = decode_feature_file(bytes);
    CHECK(back.features == f.features);
    CHECK(back.timestamps == f.timestamps);
    CHECK(encode_feature_file(back) == bytes);
}

TEST_CASE("feature file rejections carry distinct codes") {
    const auto good = encode_feature_file(sample_feature_file());
    auto bad_magic = good;
    bad_magic[0] = 'X';
    auto bad_version = good;
    bad_version[4] = 9;
    auto truncated = good;
    truncated.resize(good.size() - 3);
    auto trailing = good;
    trailing.push_back(0);
    CHECK(decode_errc(bad_magic) == FormatErrc::bad_magic);
    CHECK(decode_errc(bad_version) == FormatErrc::bad_version);
    CHECK(decode_errc(truncated) == FormatErrc::truncated);
    CHECK(decode_errc(trailing) == FormatErrc::malformed);
    CHECK(decode_errc({'H', 'F'}) == FormatErrc::truncated);
    CHECK(std::string(to_string(FormatErrc::bad_magic)) != to_string(FormatErrc::truncated));
}

TEST_CASE("feature file encoder rejects inconsistent input") {
    FeatureFile f = sample_feature_file();
    f.timestamps.pop_back();
    CHECK_THROWS_AS(encode_feature_file(f), ValidationError);
}

TEST_CASE("files are written atomically and missing files are io errors") {
    test::TempDir dir("io-files");
    write_file(dir / "a.bin", {1, 2, 3});
    CHECK(read_file(dir / "a.bin") == std::vector<unsigned char>{1, 2, 3});
    write_text_file(dir / "t.txt", "hello\n");
    CHECK(read_text_file(dir / "t.txt") == "hello\n");
    CHECK_THROWS_AS(read_file(dir / "missing.bin"), IoError);
    CHECK_THROWS_AS(write_file(dir / "no/such/dir/x.bin", {1}), IoError);
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++entries;
    CHECK(entries == 2);  // no temp files left behind
}

TEST_CASE("dataset round trip is bit-exact") {
    test::TempDir dir("io-dataset");
    Dataset ds;
    ds.spec = test::tiny_spec(4);
    ds.seed = 9;
    ds.episodes = synth::generate_dataset(ds.spec, 7, 9);
    write_dataset(dir.path().string(), ds);
    const auto back = read_dataset(dir.path().string());
    CHECK(back.seed == 9);
    CHECK(synth::spec_to_json(back.spec) == synth::spec_to_json(ds.spec));
    REQUIRE(back.episodes.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) CHECK(back.episodes[i] == ds.episodes[i]);
}

TEST_CASE("empty dataset round trip") {
    test::TempDir dir("io-empty");
    Dataset ds;
    ds.spec = test::tiny_spec();
    write_dataset(dir.path().string(), ds);
    CHECK(read_dataset(dir.path().string()).episodes.empty());
}

TEST_CASE("dataset reader rejects damage with a location") {
    test::TempDir dir("io-damage");
    Dataset ds;
    ds.spec = test::tiny_spec();
    ds.episodes = synth::generate_dataset(ds.spec, 3, 1);
    const auto root = dir.path().string();
    write_dataset(root, ds);
    const auto manifest = dir / kManifestName;
    const auto blob = dir / kBlobName;
    const auto lines = read_lines(manifest);
    const auto bytes = read_file(blob);

    SUBCASE("truncated blob") {
        auto cut = bytes;
        cut.resize(cut.size() - 8);
        write_file(blob, cut);
        try {
            read_dataset(root);
            FAIL("expected an error");
        } catch (const FormatError& e) {
            CHECK(e.code() == FormatErrc::truncated);
            CHECK(e.offset() > 0);
        }
    }
    SUBCASE("trailing blob bytes") {
        auto extra = bytes;
        extra.push_back(1);
        write_file(blob, extra);
        CHECK_THROWS_AS(read_dataset(root), FormatError);
    }
    SUBCASE("version mismatch") {
        auto edited = lines;
        const auto pos = edited[0].find("\"version\":1");
        REQUIRE(pos != std::string::npos);
        edited[0].replace(pos, 11, "\"version\":2");
        write_lines(manifest, edited);
        try {
            read_dataset(root);
            FAIL("expected an error");
        } catch (const FormatError& e) {
            CHECK(e.code() == FormatErrc::bad_version);
        }
    }
    SUBCASE("malformed record names its line") {
        auto edited = lines;
        edited[2] = "{not json";
        write_lines(manifest, edited);
        try {
            read_dataset(root);
            FAIL("expected an error");
        } catch (const FormatError& e) {
            CHECK(e.code() == FormatErrc::malformed);
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("missing record") {
        auto edited = lines;
        edited.pop_back();
        write_lines(manifest, edited);
        CHECK_THROWS_AS(read_dataset(root), FormatError);
    }
    SUBCASE("out of range answer") {
        auto edited = lines;
        const auto pos = edited[1].find("\"answer\":");
        REQUIRE(pos != std::string::npos);
        edited[1].replace(pos, 10, "\"answer\":9");
        write_lines(manifest, edited);
        CHECK_THROWS_AS(read_dataset(root), FormatError);
    }
    SUBCASE("missing directory") {
        CHECK_THROWS_AS(read_dataset(dir / "nowhere"), IoError);
    }
}

}  // TEST_SUITE
