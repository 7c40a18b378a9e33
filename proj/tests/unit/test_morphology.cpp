#include <algorithm>
#include <cmath>

#include "crystalseg/errors.hpp"
#include "crystalseg/morphology.hpp"
#include "crystalseg/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crystalseg;

namespace {

BitMask from_rows(const std::vector<std::string>& rows) {
    BitMask mask(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) mask.set(x, y, rows[y][x] == '#');
    }
    return mask;
}

bool subset(const BitMask& a, const BitMask& b) {
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        if (a.bits[i] && !b.bits[i]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("structuring elements contain the origin and are symmetric") {
    for (const auto& se : {StructuringElement::square(1), StructuringElement::square(2),
                           StructuringElement::disk(1), StructuringElement::disk(3)}) {
        CHECK(std::count(se.offsets.begin(), se.offsets.end(), std::pair{0, 0}) == 1);
        for (const auto& [dx, dy] : se.offsets) {
            CHECK(std::count(se.offsets.begin(), se.offsets.end(), std::pair{-dx, -dy}) == 1);
        }
    }
    CHECK(StructuringElement::square(1).offsets.size() == 9);
    CHECK(StructuringElement::disk(1).offsets.size() == 5);
    CHECK_THROWS_AS(StructuringElement::square(0), ValidationError);
}

TEST_CASE("percentile binarize marks the k darkest pixels") {
    GrayImage region(3, 3);
    region.data = {10, 20, 30, 40, 50, 60, 70, 80, 90};
    const BitMask mask = percentile_binarize(region, 0.7);
    CHECK(mask.area() == 6);  // k = floor(0.7*9 + 0.5)
    CHECK(mask.bits == std::vector<std::uint8_t>{1, 1, 1, 1, 1, 1, 0, 0, 0});
}

TEST_CASE("binarize ties go to earlier scan positions") {
    const GrayImage uniform(10, 10, 42);
    const BitMask mask = percentile_binarize(uniform, 0.7);
    CHECK(mask.area() == 70);
    for (int i = 0; i < 100; ++i) CHECK(mask.bits[i] == (i < 70 ? 1 : 0));
}

TEST_CASE("binarize sets exactly floor(f*N+0.5) bits") {
    Xoshiro256StarStar rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = rng.next_int(1, 24), h = rng.next_int(1, 24);
        const GrayImage region = oracle::random_image(rng, w, h);
        const double f = rng.next_range(0.01, 0.99);
        const auto expected =
            static_cast<std::int64_t>(std::floor(f * static_cast<double>(w) * h + 0.5));
        CHECK(percentile_binarize(region, f).area() == expected);
    }
    CHECK_THROWS_AS(percentile_binarize(GrayImage(2, 2), 0.0), ValidationError);
    CHECK_THROWS_AS(percentile_binarize(GrayImage(2, 2), 1.0), ValidationError);
}

TEST_CASE("fill holes closes a ring") {
    const BitMask ring = from_rows({
        "#####",
        "#...#",
        "#...#",
        "#...#",
        "#####",
    });
    const BitMask filled = fill_holes(ring, Connectivity::four);
    CHECK(filled.area() == 25);

    const BitMask solid = from_rows({"###", "###", "###"});
    CHECK(fill_holes(solid, Connectivity::four) == solid);

    const BitMask empty(4, 4);
    CHECK(fill_holes(empty, Connectivity::four) == empty);
}

TEST_CASE("background connectivity decides diagonal leaks") {
    // Diagonal gap: 4-connected background cannot escape, 8-connected can.
    const BitMask diag = from_rows({
        ".##..",
        "#..#.",
        "#..#.",
        ".##..",
    });
    CHECK(fill_holes(diag, Connectivity::four).area() > diag.area());
    CHECK(fill_holes(diag, Connectivity::eight) == diag);
}

TEST_CASE("fill holes is extensive and idempotent") {
    Xoshiro256StarStar rng(5);
    for (int trial = 0; trial < 80; ++trial) {
        const BitMask mask = oracle::random_mask(rng, 16, 16, rng.next_range(0.2, 0.7));
        for (const auto conn : {Connectivity::four, Connectivity::eight}) {
            const BitMask filled = fill_holes(mask, conn);
            CHECK(subset(mask, filled));
            CHECK(fill_holes(filled, conn) == filled);
        }
    }
}

TEST_CASE("open on canonical shapes") {
    const StructuringElement se = StructuringElement::square(1);

    const BitMask empty(6, 6);
    CHECK(open(empty, se) == empty);

    BitMask single(5, 5);
    single.set(2, 2, true);
    CHECK(open(single, se).area() == 0);

    const BitMask solid = from_rows({"#####", "#####", "#####", "#####", "#####"});
    CHECK(open(solid, se) == solid);
}

TEST_CASE("open is anti-extensive, idempotent and monotone") {
    Xoshiro256StarStar rng(17);
    const StructuringElement se = StructuringElement::square(1);
    for (int trial = 0; trial < 60; ++trial) {
        const BitMask a = oracle::random_mask(rng, 18, 18, 0.55);
        BitMask b = a;  // superset of a
        for (auto& bit : b.bits) {
            if (!bit && rng.next_double() < 0.2) bit = 1;
        }
        const BitMask oa = open(a, se);
        CHECK(subset(oa, a));
        CHECK(open(oa, se) == oa);
        CHECK(subset(oa, open(b, se)));
    }
}

TEST_CASE("erode/dilate duality on a padded canvas") {
    Xoshiro256StarStar rng(29);
    for (const auto& se : {StructuringElement::square(1), StructuringElement::disk(2)}) {
        for (int trial = 0; trial < 30; ++trial) {
            const BitMask mask = oracle::random_mask(rng, 14, 14, 0.5);
            const int pad = se.radius;
            BitMask padded(mask.width + 2 * pad, mask.height + 2 * pad);
            for (int y = 0; y < mask.height; ++y) {
                for (int x = 0; x < mask.width; ++x) {
                    if (mask.get(x, y)) padded.set(x + pad, y + pad, true);
                }
            }
            BitMask complement = padded;
            for (auto& b : complement.bits) b = b ? 0 : 1;
            const BitMask via_duality = erode(complement, se);
            const BitMask dilated = dilate(mask, se);
            for (int y = 0; y < mask.height; ++y) {
                for (int x = 0; x < mask.width; ++x) {
                    CHECK(dilated.get(x, y) == !via_duality.get(x + pad, y + pad));
                }
            }
        }
    }
}

TEST_CASE("connected components id ordering") {
    const BitMask empty(3, 3);
    CHECK(connected_components(empty, Connectivity::eight).max_label() == 0);

    BitMask two(3, 3);
    two.set(0, 0, true);
    two.set(2, 2, true);
    const LabelMap map = connected_components(two, Connectivity::eight);
    CHECK(map.max_label() == 2);
    CHECK(map.at(0, 0) == 1);
    CHECK(map.at(2, 2) == 2);
}

TEST_CASE("diagonal pairs split under four-connectivity") {
    BitMask diag(2, 2);
    diag.set(0, 0, true);
    diag.set(1, 1, true);
    CHECK(connected_components(diag, Connectivity::eight).max_label() == 1);
    CHECK(connected_components(diag, Connectivity::four).max_label() == 2);
}

TEST_CASE("largest component with ties") {
    const BitMask two_sizes = from_rows({
        "##...",
        "##...",
        "#...#",
        "....#",
        ".....",
    });
    const BitMask big = largest_component(two_sizes, Connectivity::eight);
    CHECK(big.area() == 5);
    CHECK(big.get(0, 0));
    CHECK(!big.get(4, 2));

    // Equal areas: the component whose first pixel scans earlier wins.
    const BitMask tie = from_rows({
        "##..##",
        "......",
    });
    const BitMask winner = largest_component(tie, Connectivity::eight);
    CHECK(winner.area() == 2);
    CHECK(winner.get(0, 0));
    CHECK(winner.get(1, 0));

    const BitMask empty(4, 4);
    CHECK(largest_component(empty, Connectivity::eight).area() == 0);

    const BitMask single = from_rows({".#.", "###"});
    CHECK(largest_component(single, Connectivity::eight) == single);
}

TEST_CASE("operations match their oracles on random masks") {
    Xoshiro256StarStar rng(101);
    const StructuringElement square1 = StructuringElement::square(1);
    const StructuringElement disk2 = StructuringElement::disk(2);
    for (int trial = 0; trial < 100; ++trial) {
        const double density = 0.1 + 0.08 * (trial % 10);
        const BitMask mask = oracle::random_mask(rng, 16, 16, density);
        const GrayImage region = oracle::random_image(rng, 16, 16);
        const double fraction = rng.next_range(0.05, 0.95);
        const Connectivity conn = trial % 2 == 0 ? Connectivity::eight : Connectivity::four;
        const StructuringElement& se = trial % 3 == 0 ? disk2 : square1;

        CHECK(percentile_binarize(region, fraction) == oracle::binarize(region, fraction));
        CHECK(fill_holes(mask, conn) == oracle::fill_holes(mask, conn));
        CHECK(erode(mask, se) == oracle::erode(mask, se));
        CHECK(dilate(mask, se) == oracle::dilate(mask, se));
        CHECK(open(mask, se) == oracle::open(mask, se));
        CHECK(connected_components(mask, conn) == oracle::components(mask, conn));
        CHECK(largest_component(mask, conn) == oracle::largest(mask, conn));
    }
}
