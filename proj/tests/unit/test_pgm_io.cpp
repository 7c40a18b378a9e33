#include <string>

#include "crystalseg/errors.hpp"
#include "crystalseg/pgm_io.hpp"
#include "crystalseg/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crystalseg;

TEST_CASE("read minimal binary pgm") {
    const std::string bytes = std::string("P5 2 1 255\n") + '\x00' + '\xFF';
    const GrayImage img = read_pgm(bytes);
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    CHECK(img.data == std::vector<std::uint8_t>{0, 255});
}

TEST_CASE("read ascii pgm") {
    const GrayImage img = read_pgm("P2 1 1 255\n128\n");
    CHECK(img.width == 1);
    CHECK(img.height == 1);
    CHECK(img.data == std::vector<std::uint8_t>{128});
}

TEST_CASE("header comments are skipped") {
    const std::string bytes = std::string("P5\n# a comment\n2 1 # trailing\n255\n") + "\x10\x20";
    const GrayImage img = read_pgm(bytes);
    CHECK(img.data == std::vector<std::uint8_t>{0x10, 0x20});
}

TEST_CASE("truncated raster reports the byte offset") {
    const std::string bytes = std::string("P5 2 2 255\n") + "abc";
    CHECK_THROWS_WITH_AS(read_pgm(bytes), doctest::Contains("truncated"), FormatError);
    CHECK_THROWS_WITH_AS(read_pgm(bytes), doctest::Contains("byte 11"), FormatError);
}

TEST_CASE("bad magic and maxval are rejected") {
    CHECK_THROWS_AS(read_pgm("P6 1 1 255\nx"), FormatError);
    CHECK_THROWS_WITH_AS(read_pgm("P5 1 1 65535\nxx"), doctest::Contains("maxval"), FormatError);
    CHECK_THROWS_AS(read_pgm("P2 1 1 255\n300\n"), FormatError);
    CHECK_THROWS_AS(read_pgm(""), FormatError);
}

TEST_CASE("write produces the canonical header") {
    GrayImage img(1, 1);
    img.data[0] = 0;
    const std::string bytes = write_pgm(img);
    CHECK(bytes == std::string("P5\n1 1\n255\n") + '\x00');
}

TEST_CASE("pgm round-trip is the identity") {
    Xoshiro256StarStar rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const int w = rng.next_int(1, 40);
        const int h = rng.next_int(1, 40);
        const GrayImage img = oracle::random_image(rng, w, h);
        CHECK(read_pgm(write_pgm(img)) == img);
    }
    // The 256x256 shape used by the 8-bit datasets.
    const GrayImage big = oracle::random_image(rng, 256, 256);
    CHECK(read_pgm(write_pgm(big)) == big);
}

TEST_CASE("label map io") {
    const std::string bytes = std::string("P5 2 1 65535\n") + '\x00' + '\x00' + '\x00' + '\x01';
    const LabelMap map = read_label_map(bytes);
    CHECK(map.labels == std::vector<std::uint32_t>{0, 1});

    SUBCASE("round trip") {
        LabelMap src(3, 2);
        src.labels = {0, 1, 2, 2, 1, 0};
        CHECK(read_label_map(write_label_map(src)) == src);
    }
    SUBCASE("big-endian sample order") {
        LabelMap src(1, 1);
        src.labels = {0x0102};
        const std::string out = write_label_map(src);
        CHECK(out.substr(out.size() - 2) == std::string("\x01\x02"));
    }
    SUBCASE("non-contiguous ids rejected") {
        const std::string bad = std::string("P5 2 1 65535\n") + '\x00' + '\x00' + '\x00' + '\x02';
        CHECK_THROWS_WITH_AS(read_label_map(bad), doctest::Contains("missing: 1"),
                             ValidationError);
    }
    SUBCASE("eight-bit maxval rejected for label maps") {
        CHECK_THROWS_AS(read_label_map(std::string("P5 1 1 255\n") + '\x00'), FormatError);
    }
    SUBCASE("ids above 65535 cannot be written") {
        LabelMap big(1, 1);
        big.labels = {70000};
        CHECK_THROWS_AS(write_label_map(big), ValidationError);
    }
}

TEST_CASE("file helpers round-trip through disk") {
    const auto dir = std::filesystem::temp_directory_path() / "crystalseg_pgm_test";
    std::filesystem::create_directories(dir);
    Xoshiro256StarStar rng(3);
    const GrayImage img = oracle::random_image(rng, 19, 7);
    save_pgm(dir / "img.pgm", img);
    CHECK(load_pgm(dir / "img.pgm") == img);
    CHECK_THROWS_AS(load_pgm(dir / "absent.pgm"), FormatError);
    std::filesystem::remove_all(dir);
}
