#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crystalseg/raster.hpp"

namespace crystalseg {

/// One detector output row.
struct Detection {
    ObjectClass cls = ObjectClass::crystal;
    BBox box;               // pixel coordinates, clamped to the image
    double confidence = 1.0;

    bool operator==(const Detection&) const = default;
};

/// Ordered detections for one image; the source order matters for
/// deterministic instance ids and matching.
struct DetectionSet {
    std::string image_id;
    std::vector<Detection> detections;

    bool operator==(const DetectionSet&) const = default;
};

/// Parse the normalized detection text format: one object per line,
///   class_id x_center y_center width height [confidence]
/// all geometry in [0,1], class_id in {0,1,2}, confidence defaulting
/// to 1.0. '#' lines are comments. Geometry converts to pixels as
/// x0 = round((x_center - width/2) * img_w), w = round(width * img_w)
/// (and likewise for y), rounding half away from zero, then clamps to
/// the image. FormatError messages carry the 1-based line number.
DetectionSet parse_detections(std::string_view text, int img_w, int img_h,
                              std::string image_id = {});

/// Inverse of parse_detections, floats at 6 decimals. Parsing the
/// result recovers the same DetectionSet.
std::string serialize_detections(const DetectionSet& set, int img_w, int img_h);

/// Knobs for the classical fallback detector.
struct BaselineConfig {
    double dark_fraction = 0.3;      // global percentile binarization
    std::int64_t min_area = 20;      // components below are dropped
    double max_area_fraction = 0.25; // of the image area; above are dropped
};

/// Blob detector used when no external detector output exists:
/// global percentile binarization, connected components, per-component
/// tight box inflated by 2 px. Every detection is labeled crystal with
/// confidence = component area / largest retained component area.
DetectionSet baseline_detect(const GrayImage& img, const BaselineConfig& cfg = {});

}  // namespace crystalseg
