#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "medmark/corpus.hpp"
#include "medmark/features.hpp"
#include "medmark/watermark.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace medmark;
using testutil::TempDir;

namespace {

FeatureSet small_set() {
    FeatureSet fs;
    fs.n = 2;
    fs.d = 3;
    fs.values = {0.25, -1.5, 3.0, 0.0, 2.25, -0.125};
    fs.ids = {"first.png", "second.png"};
    return fs;
}

}  // namespace

TEST_CASE("builtin features of a constant image") {
    const ImageGray img(64, 64, 0.5);
    const std::vector<double> f = extract_features_builtin(img, 288);
    REQUIRE(f.size() == 288);
    for (int i = 0; i < 256; ++i) CHECK(f[i] == doctest::Approx(0.5).epsilon(1e-12));
    // all mass in one histogram bin
    double hist_sum = 0.0;
    int nonzero = 0;
    for (int i = 256; i < 288; ++i) {
        hist_sum += f[i];
        nonzero += f[i] != 0.0;
    }
    CHECK(nonzero == 1);
    CHECK(hist_sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histogram always sums to one") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        ImageGray img(37, 23);
        for (double& p : img.pixels) p = oracles::uniform01(rng);
        const std::vector<double> f = extract_features_builtin(img, 2 * 2 + 32);
        double s = 0.0;
        for (std::size_t i = 4; i < f.size(); ++i) s += f[i];
        CHECK(std::abs(s - 1.0) <= 1e-9);
    }
}

TEST_CASE("intensity translation shifts block means by exactly the offset") {
    std::mt19937_64 rng(8);
    ImageGray img(48, 48);
    for (double& p : img.pixels) p = 0.2 + 0.4 * oracles::uniform01(rng);
    const double delta = 0.125;
    ImageGray shifted = img;
    for (double& p : shifted.pixels) p += delta;

    const auto fa = extract_features_builtin(img, 288);
    const auto fb = extract_features_builtin(shifted, 288);
    for (int i = 0; i < 256; ++i) CHECK(std::abs(fb[i] - (fa[i] + delta)) <= 1e-9);
}

TEST_CASE("feature dimension contract") {
    const ImageGray img(64, 64, 0.5);
    CHECK_NOTHROW(extract_features_builtin(img, 16 * 16 + 32));
    CHECK_NOTHROW(extract_features_builtin(img, 1 + 32));
    CHECK_THROWS_AS(extract_features_builtin(img, 100), ArgumentError);  // 68 is not a square
    CHECK_THROWS_AS(extract_features_builtin(img, 32), ArgumentError);
    const ImageGray tiny(8, 8, 0.5);
    CHECK_THROWS_AS(extract_features_builtin(tiny, 288), ArgumentError);  // smaller than the grid
}

TEST_CASE("watermarking barely moves the builtin features") {
    const ImageGray img = gen_corpus_image(33, 0, 0);
    const ImageGray marked = embed(img, WatermarkPayload::from_text("synthetic"));
    const auto fa = extract_features_builtin(img, 288);
    const auto fb = extract_features_builtin(marked, 288);
    double dist = 0.0;
    for (std::size_t i = 0; i < fa.size(); ++i) dist += (fa[i] - fb[i]) * (fa[i] - fb[i]);
    CHECK(std::sqrt(dist) < 0.05);
}

TEST_CASE("feature file round trip is bit-exact") {
    TempDir tmp;
    const FeatureSet fs = small_set();
    write_features(fs, tmp.str("x.feat"));
    const FeatureSet back = read_features(tmp.str("x.feat"));
    CHECK(back.n == fs.n);
    CHECK(back.d == fs.d);
    CHECK(back.values == fs.values);  // exact, not approximate
    CHECK(back.ids == fs.ids);
}

TEST_CASE("feature file layout matches the documented format") {
    TempDir tmp;
    FeatureSet fs;
    fs.n = 1;
    fs.d = 2;
    fs.values = {1.0, -2.0};
    fs.ids = {"ab"};
    write_features(fs, tmp.str("y.feat"));

    const auto bytes = testutil::read_bytes(tmp.str("y.feat"));
    REQUIRE(bytes.size() == 8 + 1 + 4 + 4 + 16 + 4 + 2);
    CHECK(std::memcmp(bytes.data(), "MDMKFEAT", 8) == 0);
    CHECK(bytes[8] == 1);  // version
    CHECK(bytes[9] == 1);  // n, little-endian
    CHECK(bytes[10] == 0);
    CHECK(bytes[13] == 2);  // d
    double v0, v1;
    std::memcpy(&v0, bytes.data() + 17, 8);
    std::memcpy(&v1, bytes.data() + 25, 8);
    CHECK(v0 == 1.0);
    CHECK(v1 == -2.0);
    CHECK(bytes[33] == 2);  // id length
    CHECK(bytes[37] == 'a');
    CHECK(bytes[38] == 'b');
}

TEST_CASE("feature file validation errors") {
    TempDir tmp;

    // n = 0 violates the invariant
    std::vector<unsigned char> bytes;
    const char magic[] = "MDMKFEAT";
    bytes.insert(bytes.end(), magic, magic + 8);
    bytes.push_back(1);
    for (int i = 0; i < 4; ++i) bytes.push_back(0);  // n = 0
    bytes.push_back(2);
    for (int i = 0; i < 3; ++i) bytes.push_back(0);  // d = 2
    testutil::write_bytes(tmp.str("empty.feat"), bytes);
    CHECK_THROWS_AS(read_features(tmp.str("empty.feat")), FormatError);

    testutil::write_file(tmp.str("bad.feat"), "NOTMAGIC rest");
    CHECK_THROWS_AS(read_features(tmp.str("bad.feat")), FormatError);

    testutil::write_file(tmp.str("short.feat"), "MDMKFEAT");
    CHECK_THROWS_AS(read_features(tmp.str("short.feat")), FormatError);

    CHECK_THROWS_AS(read_features(tmp.str("missing.feat")), IoError);

    FeatureSet invalid = small_set();
    invalid.values[2] = std::nan("");
    CHECK_THROWS_AS(write_features(invalid, tmp.str("nan.feat")), ArgumentError);
}
