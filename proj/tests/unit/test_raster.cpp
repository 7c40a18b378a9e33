#include <numeric>

#include "crystalseg/errors.hpp"
#include "crystalseg/raster.hpp"
#include "crystalseg/rng.hpp"
#include "doctest.h"

using namespace crystalseg;

TEST_CASE("object class codes are stable") {
    CHECK(static_cast<int>(ObjectClass::crystal) == 0);
    CHECK(static_cast<int>(ObjectClass::hard_mimic) == 1);
    CHECK(static_cast<int>(ObjectClass::air_bubble) == 2);
    CHECK(object_class_from_string("crystal") == ObjectClass::crystal);
    CHECK(object_class_from_string("hard_mimic") == ObjectClass::hard_mimic);
    CHECK(object_class_from_string("air_bubble") == ObjectClass::air_bubble);
    CHECK(!object_class_from_string("dust"));
    CHECK(!object_class_from_code(3));
    CHECK(!object_class_from_code(-1));
}

TEST_CASE("gray image construction validates dimensions") {
    CHECK_THROWS_AS(GrayImage(0, 3), ValidationError);
    CHECK_THROWS_AS(GrayImage(3, 0), ValidationError);
    const GrayImage img(4, 3, 7);
    CHECK(img.pixel_count() == 12);
    CHECK(img.at(3, 2) == 7);
}

TEST_CASE("bbox clamping") {
    CHECK(BBox{-2, -2, 3, 3}.clamped(4, 4) == BBox{0, 0, 1, 1});
    CHECK(BBox{1, 1, 10, 10}.clamped(4, 4) == BBox{1, 1, 3, 3});
    CHECK(BBox{-5, 0, 3, 3}.clamped(4, 4).empty());
    CHECK(BBox{0, 0, 4, 4}.clamped(4, 4) == BBox{0, 0, 4, 4});
}

TEST_CASE("crop by direct indexing") {
    GrayImage img(3, 3);
    std::iota(img.data.begin(), img.data.end(), std::uint8_t{1});  // 1..9 row-major

    const GrayImage sub = crop(img, BBox{1, 1, 2, 2});
    CHECK(sub.width == 2);
    CHECK(sub.height == 2);
    CHECK(sub.data == std::vector<std::uint8_t>{5, 6, 8, 9});
}

TEST_CASE("crop of the full-image box is the identity") {
    GrayImage img(5, 4);
    std::iota(img.data.begin(), img.data.end(), std::uint8_t{0});
    CHECK(crop(img, BBox{0, 0, 5, 4}) == img);
    // Oversized boxes clamp down to the identity as well.
    CHECK(crop(img, BBox{-3, -3, 20, 20}) == img);
}

TEST_CASE("crop errors on a fully outside box") {
    const GrayImage img(4, 4);
    CHECK_THROWS_AS(crop(img, BBox{10, 10, 3, 3}), ValidationError);
    CHECK_THROWS_AS(crop(img, BBox{-5, 0, 3, 3}), ValidationError);
}

TEST_CASE("crop composes") {
    Xoshiro256StarStar rng(7);
    GrayImage img(17, 13);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.next_below(256));

    for (int trial = 0; trial < 50; ++trial) {
        const int ax = rng.next_int(0, 10), ay = rng.next_int(0, 8);
        const BBox a{ax, ay, rng.next_int(2, 17 - ax), rng.next_int(2, 13 - ay)};
        const int bx = rng.next_int(0, a.w - 1), by = rng.next_int(0, a.h - 1);
        const BBox b{bx, by, rng.next_int(1, a.w - bx), rng.next_int(1, a.h - by)};
        const BBox composed{a.x0 + b.x0, a.y0 + b.y0, b.w, b.h};
        CHECK(crop(crop(img, a), b) == crop(img, composed));
    }
}

TEST_CASE("label map validation lists missing ids") {
    LabelMap map(2, 1);
    map.labels = {0, 2};
    CHECK_THROWS_WITH_AS(validate_label_map(map), doctest::Contains("missing: 1"),
                         ValidationError);

    map.labels = {0, 1};
    CHECK_NOTHROW(validate_label_map(map));
    CHECK(map.max_label() == 1);
}

TEST_CASE("mask_of_label anchors at the tight box") {
    LabelMap map(4, 4);
    map.at(2, 1) = 1;
    map.at(3, 1) = 1;
    map.at(2, 2) = 1;
    const BitMask mask = mask_of_label(map, 1);
    CHECK(mask.x0 == 2);
    CHECK(mask.y0 == 1);
    CHECK(mask.width == 2);
    CHECK(mask.height == 2);
    CHECK(mask.area() == 3);
    CHECK(mask.get(0, 0));
    CHECK(mask.get(1, 0));
    CHECK(mask.get(0, 1));
    CHECK(!mask.get(1, 1));

    CHECK(mask_of_label(map, 9).area() == 0);
}

TEST_CASE("bitmask tight box") {
    BitMask mask(3, 5, 6, 6);
    CHECK(mask.tight_box().empty());
    mask.set(1, 2, true);
    mask.set(4, 3, true);
    CHECK(mask.tight_box() == BBox{4, 7, 4, 2});
}
