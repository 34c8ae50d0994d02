#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "medmark/image_io.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace medmark;
using testutil::TempDir;

namespace {

// 2x1 8-bit RGB PNG, pixels (255,0,0) and (0,255,0)
const char* kRgbPngHex =
    "89504e470d0a1a0a0000000d49484452000000020000000108020000007b40e8dd"
    "0000000f49444154789c63f8cfc0c0f09f010007ff01ff017f89a7"
    "0000000049454e44ae426082";

// 1x1 16-bit grayscale PNG, value 32767
const char* kGray16PngHex =
    "89504e470d0a1a0a0000000d49484452000000010000000110000000006aee4716"
    "0000000b49444154789c63a8ff0f000200017fffd1c949"
    "0000000049454e44ae426082";

ImageGray random_image(int w, int h, std::mt19937_64& rng) {
    ImageGray img(w, h);
    for (double& p : img.pixels) p = oracles::uniform01(rng);
    return img;
}

}  // namespace

TEST_CASE("PGM P5 extremes scale to exactly 0 and 1") {
    TempDir tmp;
    testutil::write_file(tmp.str("max.pgm"), std::string("P5\n2 2\n255\n") + std::string(4, '\xFF'));
    const ImageGray maxed = load_image(tmp.str("max.pgm"));
    for (const double p : maxed.pixels) CHECK(p == 1.0);
    CHECK(maxed.source_bit_depth == 8);

    testutil::write_file(tmp.str("zero.pgm"), std::string("P2\n2 2\n255\n0 0 0 0\n"));
    const ImageGray zeroed = load_image(tmp.str("zero.pgm"));
    for (const double p : zeroed.pixels) CHECK(p == 0.0);
}

TEST_CASE("PGM P2 parses comments and 16-bit values") {
    TempDir tmp;
    testutil::write_file(tmp.str("wide.pgm"), "P2\n# a comment\n1 1\n65535\n32767\n");
    const ImageGray img = load_image(tmp.str("wide.pgm"));
    CHECK(img.source_bit_depth == 16);
    CHECK(img.at(0, 0) == doctest::Approx(0.49999237048905165).epsilon(1e-12));
}

TEST_CASE("16-bit PNG sample scales by 65535") {
    TempDir tmp;
    testutil::write_bytes(tmp.str("g16.png"), testutil::from_hex(kGray16PngHex));
    const ImageGray img = load_image(tmp.str("g16.png"));
    REQUIRE(img.width == 1);
    REQUIRE(img.height == 1);
    CHECK(img.source_bit_depth == 16);
    CHECK(img.at(0, 0) == doctest::Approx(32767.0 / 65535.0).epsilon(1e-12));
}

TEST_CASE("RGB PNG converts to luma with BT.601 weights") {
    TempDir tmp;
    testutil::write_bytes(tmp.str("rgb.png"), testutil::from_hex(kRgbPngHex));
    const ImageGray img = load_image(tmp.str("rgb.png"));
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 1);
    CHECK(img.at(0, 0) == doctest::Approx(0.299).epsilon(1e-9));
    CHECK(img.at(1, 0) == doctest::Approx(0.587).epsilon(1e-9));
}

TEST_CASE("save quantizes with round-half-up and clamps") {
    TempDir tmp;
    ImageGray img(3, 1);
    img.at(0, 0) = 1.0;
    img.at(1, 0) = 0.5;
    img.at(2, 0) = 1.2;  // out of range from processing
    save_image(img, tmp.str("q.pgm"), 8);

    const auto bytes = testutil::read_bytes(tmp.str("q.pgm"));
    // P5 header "P5\n3 1\n255\n" is 11 bytes
    REQUIRE(bytes.size() == 14);
    CHECK(bytes[11] == 255);
    CHECK(bytes[12] == 128);  // round-half-up of 127.5
    CHECK(bytes[13] == 255);  // clamped
}

TEST_CASE("save/load round trip stays within one quantization step") {
    TempDir tmp;
    std::mt19937_64 rng(42);
    for (const int depth : {8, 16}) {
        for (const char* name : {"a.png", "a.pgm"}) {
            const ImageGray img = random_image(17, 9, rng);
            save_image(img, tmp.str(name), depth);
            const ImageGray back = load_image(tmp.str(name));
            REQUIRE(back.width == img.width);
            REQUIRE(back.height == img.height);
            CHECK(back.source_bit_depth == depth);
            const double bound = 1.0 / (std::pow(2.0, depth) - 1.0);
            for (std::size_t i = 0; i < img.pixels.size(); ++i) {
                CHECK(std::abs(back.pixels[i] - img.pixels[i]) <= bound);
            }
        }
    }
}

TEST_CASE("PNG 8-bit save is byte-stable across calls") {
    TempDir tmp;
    std::mt19937_64 rng(43);
    const ImageGray img = random_image(31, 22, rng);
    save_image(img, tmp.str("one.png"), 8);
    save_image(img, tmp.str("two.png"), 8);
    CHECK(testutil::read_bytes(tmp.str("one.png")) == testutil::read_bytes(tmp.str("two.png")));
}

TEST_CASE("load rejects unknown formats and missing files") {
    TempDir tmp;
    testutil::write_file(tmp.str("junk.png"), "definitely not a png");
    CHECK_THROWS_AS(load_image(tmp.str("junk.png")), FormatError);
    CHECK_THROWS_AS(load_image(tmp.str("absent.png")), IoError);
    testutil::write_file(tmp.str("trunc.pgm"), "P5\n4 4\n255\nxx");
    CHECK_THROWS_AS(load_image(tmp.str("trunc.pgm")), FormatError);
}

TEST_CASE("resize keeps constants exactly constant") {
    const ImageGray img(100, 100, 0.7);
    const ImageGray out = resize_bilinear(img, 512, 512);
    REQUIRE(out.width == 512);
    REQUIRE(out.height == 512);
    for (const double p : out.pixels) CHECK(p == 0.7);
}

TEST_CASE("resize matches hand-computed half-pixel weights") {
    ImageGray img(2, 1);
    img.at(0, 0) = 0.0;
    img.at(1, 0) = 1.0;
    const ImageGray out = resize_bilinear(img, 4, 1);
    CHECK(out.at(0, 0) == doctest::Approx(0.0));
    CHECK(out.at(1, 0) == doctest::Approx(0.25));
    CHECK(out.at(2, 0) == doctest::Approx(0.75));
    CHECK(out.at(3, 0) == doctest::Approx(1.0));
}

TEST_CASE("identity resize is pixel-identical") {
    std::mt19937_64 rng(44);
    const ImageGray img = random_image(13, 7, rng);
    const ImageGray out = resize_bilinear(img, 13, 7);
    CHECK(out.pixels == img.pixels);
}

TEST_CASE("resize output stays within the input min/max") {
    std::mt19937_64 rng(45);
    const ImageGray img = random_image(9, 5, rng);
    double lo = 1.0, hi = 0.0;
    for (const double p : img.pixels) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    for (const auto [w, h] : {std::pair{40, 3}, {4, 17}, {128, 128}}) {
        const ImageGray out = resize_bilinear(img, w, h);
        for (const double p : out.pixels) {
            CHECK(p >= lo);
            CHECK(p <= hi);
        }
    }
    CHECK_THROWS_AS(resize_bilinear(img, 0, 5), ArgumentError);
}

TEST_CASE("scan_dataset sorts, labels and stays deterministic") {
    TempDir tmp;
    const ImageGray img(4, 4, 0.5);
    std::filesystem::create_directories(tmp.str("PE"));
    std::filesystem::create_directories(tmp.str("NO"));
    save_image(img, tmp.str("b.png"), 8);
    save_image(img, tmp.str("a.png"), 8);
    save_image(img, tmp.str("PE/x.png"), 8);
    save_image(img, tmp.str("NO/y.pgm"), 8);
    testutil::write_file(tmp.str("notes.txt"), "ignored");

    const DatasetManifest plain = scan_dataset(tmp.str());
    REQUIRE(plain.entries.size() == 4);
    CHECK(plain.entries[0].path == "NO/y.pgm");
    CHECK(plain.entries[1].path == "PE/x.png");
    CHECK(plain.entries[2].path == "a.png");
    CHECK(plain.entries[3].path == "b.png");
    for (const auto& e : plain.entries) CHECK_FALSE(e.label.has_value());

    const DatasetManifest labeled = scan_dataset(tmp.str(), true);
    CHECK(labeled.entries[0].label == "NO");
    CHECK(labeled.entries[1].label == "PE");
    CHECK_FALSE(labeled.entries[2].label.has_value());

    const DatasetManifest again = scan_dataset(tmp.str(), true);
    REQUIRE(again.entries.size() == labeled.entries.size());
    for (std::size_t i = 0; i < again.entries.size(); ++i) {
        CHECK(again.entries[i].path == labeled.entries[i].path);
        CHECK(again.entries[i].label == labeled.entries[i].label);
    }
}

TEST_CASE("scan_dataset on an empty or missing directory") {
    TempDir tmp;
    const DatasetManifest empty = scan_dataset(tmp.str());
    CHECK(empty.entries.empty());
    CHECK_THROWS_AS(scan_dataset(tmp.str("nope")), IoError);
}

TEST_CASE("manifest JSON round trip") {
    DatasetManifest m;
    m.root = "/data/corpus";
    m.entries.push_back({"classA/img_00000.png", "classA"});
    m.entries.push_back({"loose.png", std::nullopt});

    const DatasetManifest back = manifest_from_json(manifest_to_json(m));
    REQUIRE(back.entries.size() == 2);
    CHECK(back.root == m.root);
    CHECK(back.entries[0].path == m.entries[0].path);
    CHECK(back.entries[0].label == m.entries[0].label);
    CHECK_FALSE(back.entries[1].label.has_value());

    CHECK_THROWS_AS(manifest_from_json("{"), FormatError);
    CHECK_THROWS_AS(manifest_from_json("{\"entries\": []}"), FormatError);
}
