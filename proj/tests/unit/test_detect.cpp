#include "crystalseg/detect.hpp"
#include "crystalseg/errors.hpp"
#include "crystalseg/rng.hpp"
#include "doctest.h"

using namespace crystalseg;

TEST_CASE("parse a plain detection line") {
    const DetectionSet set = parse_detections("0 0.5 0.5 0.5 0.5", 100, 100);
    REQUIRE(set.detections.size() == 1);
    const Detection& d = set.detections[0];
    CHECK(d.cls == ObjectClass::crystal);
    CHECK(d.box == BBox{25, 25, 50, 50});
    CHECK(d.confidence == 1.0);
}

TEST_CASE("parse a full-image box with confidence") {
    const DetectionSet set = parse_detections("2 0.5 0.5 1.0 1.0 0.9", 64, 64);
    REQUIRE(set.detections.size() == 1);
    CHECK(set.detections[0].cls == ObjectClass::air_bubble);
    CHECK(set.detections[0].box == BBox{0, 0, 64, 64});
    CHECK(set.detections[0].confidence == doctest::Approx(0.9));
}

TEST_CASE("comments and blank lines are ignored, order is kept") {
    const DetectionSet set = parse_detections(
        "# detector export\n"
        "1 0.2 0.2 0.1 0.1\n"
        "\n"
        "0 0.8 0.8 0.1 0.1 0.5\n",
        200, 200);
    REQUIRE(set.detections.size() == 2);
    CHECK(set.detections[0].cls == ObjectClass::hard_mimic);
    CHECK(set.detections[1].cls == ObjectClass::crystal);
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_detections("3 0.5 0.5 0.1 0.1", 64, 64),
                         doctest::Contains("line 1"), FormatError);
    CHECK_THROWS_WITH_AS(parse_detections("0 0.5 0.5 0.1 0.1\n0 0.5 abc 0.1 0.1", 64, 64),
                         doctest::Contains("line 2"), FormatError);
    CHECK_THROWS_AS(parse_detections("0 0.5 0.5 0.1", 64, 64), FormatError);        // field count
    CHECK_THROWS_AS(parse_detections("0 1.5 0.5 0.1 0.1", 64, 64), FormatError);    // geometry range
    CHECK_THROWS_AS(parse_detections("0 0.5 0.5 0.1 0.1 1.5", 64, 64), FormatError);  // confidence
    // A box that rounds or clamps to nothing is rejected.
    CHECK_THROWS_WITH_AS(parse_detections("0 0.5 0.5 0.001 0.001", 64, 64),
                         doctest::Contains("zero area"), FormatError);
}

TEST_CASE("boxes straddling the border clamp to the image") {
    const DetectionSet set = parse_detections("0 0.0 0.0 0.5 0.5", 100, 100);
    REQUIRE(set.detections.size() == 1);
    CHECK(set.detections[0].box == BBox{0, 0, 25, 25});
}

TEST_CASE("serialize then parse is the identity") {
    Xoshiro256StarStar rng(31);
    const int w = 640, h = 480;
    for (int trial = 0; trial < 40; ++trial) {
        DetectionSet set;
        set.image_id = "img";
        const int n = rng.next_int(0, 12);
        for (int i = 0; i < n; ++i) {
            Detection d;
            d.cls = *object_class_from_code(rng.next_int(0, 2));
            const int x0 = rng.next_int(0, w - 2), y0 = rng.next_int(0, h - 2);
            d.box = BBox{x0, y0, rng.next_int(1, w - x0), rng.next_int(1, h - y0)};
            d.confidence = rng.next_int(0, 1000) / 1000.0;
            set.detections.push_back(d);
        }
        const DetectionSet parsed = parse_detections(serialize_detections(set, w, h), w, h, "img");
        CHECK(parsed == set);
    }
}

namespace {

GrayImage image_with_squares(int w, int h, const std::vector<BBox>& squares) {
    GrayImage img(w, h, 255);
    for (const BBox& s : squares) {
        for (int y = s.y0; y < s.y0 + s.h; ++y) {
            for (int x = s.x0; x < s.x0 + s.w; ++x) img.at(x, y) = 10;
        }
    }
    return img;
}

}  // namespace

TEST_CASE("baseline detector finds a dark square") {
    const GrayImage img = image_with_squares(100, 100, {BBox{40, 40, 10, 10}});
    const DetectionSet set = baseline_detect(img);
    REQUIRE(set.detections.size() == 1);
    const BBox box = set.detections[0].box;
    CHECK(box.x0 <= 40);
    CHECK(box.y0 <= 40);
    CHECK(box.x0 + box.w >= 50);
    CHECK(box.y0 + box.h >= 50);
    CHECK(set.detections[0].confidence == 1.0);
    CHECK(set.detections[0].cls == ObjectClass::crystal);
}

TEST_CASE("baseline confidences are area ratios") {
    // Keep the squares below the row block formed by the 30% intensity
    // ties of the uniform background (that block is dropped by the
    // max-area bound).
    const GrayImage img =
        image_with_squares(100, 100, {BBox{10, 40, 10, 10}, BBox{60, 60, 5, 5}});
    const DetectionSet set = baseline_detect(img);
    REQUIRE(set.detections.size() == 2);
    CHECK(set.detections[0].confidence == doctest::Approx(1.0));
    CHECK(set.detections[1].confidence == doctest::Approx(0.25));
}

TEST_CASE("baseline on a blank image yields nothing") {
    const GrayImage img(64, 64, 200);
    CHECK(baseline_detect(img).detections.empty());
}

TEST_CASE("baseline is translation equivariant away from borders") {
    const GrayImage a = image_with_squares(120, 120, {BBox{30, 60, 8, 12}});
    const GrayImage b = image_with_squares(120, 120, {BBox{47, 41, 8, 12}});
    const DetectionSet da = baseline_detect(a);
    const DetectionSet db = baseline_detect(b);
    REQUIRE(da.detections.size() == 1);
    REQUIRE(db.detections.size() == 1);
    CHECK(db.detections[0].box.x0 - da.detections[0].box.x0 == 17);
    CHECK(db.detections[0].box.y0 - da.detections[0].box.y0 == -19);
    CHECK(da.detections[0].box.w == db.detections[0].box.w);
    CHECK(da.detections[0].box.h == db.detections[0].box.h);
}

TEST_CASE("baseline drops components outside the area bounds") {
    BaselineConfig cfg;
    cfg.min_area = 20;
    cfg.max_area_fraction = 0.02;  // 100x100 image -> max 200 px
    const GrayImage img = image_with_squares(
        100, 100, {BBox{10, 40, 3, 3}, BBox{40, 40, 10, 10}, BBox{60, 60, 30, 30}});
    const DetectionSet set = baseline_detect(img, cfg);
    REQUIRE(set.detections.size() == 1);  // 9 px too small, 900 px too big
    CHECK(set.detections[0].box.x0 <= 40);
    CHECK(set.detections[0].box.x0 + set.detections[0].box.w >= 50);
}
