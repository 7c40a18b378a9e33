#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace crystalseg {

// Coordinate convention used everywhere in this library:
// x = column, y = row, origin at the top-left corner of the image.

/// Object classes emitted by the detector and the annotation rules.
/// Integer codes are stable and used in detection files and CSVs.
enum class ObjectClass : int {
    crystal = 0,
    hard_mimic = 1,
    air_bubble = 2,
};

const char* to_string(ObjectClass cls);
std::optional<ObjectClass> object_class_from_string(std::string_view name);
std::optional<ObjectClass> object_class_from_code(int code);

/// 8-bit grayscale image, row-major, 0 = black, 255 = white.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

    std::int64_t pixel_count() const { return static_cast<std::int64_t>(width) * height; }

    bool operator==(const GrayImage&) const = default;
};

/// Axis-aligned box. x0/y0 are the inclusive top-left pixel, w/h the extent.
struct BBox {
    int x0 = 0;
    int y0 = 0;
    int w = 0;
    int h = 0;

    /// Intersect with [0,image_w) x [0,image_h). The result may be
    /// degenerate (w or h <= 0) when the box lies fully outside.
    BBox clamped(int image_w, int image_h) const;

    bool empty() const { return w <= 0 || h <= 0; }
    std::int64_t area() const { return empty() ? 0 : static_cast<std::int64_t>(w) * h; }

    bool operator==(const BBox&) const = default;
};

/// One instance's pixel support: a binary grid anchored at an offset
/// (x0, y0) in image coordinates. bits are row-major 0/1 values local
/// to the grid. A 0x0 mask is a valid empty mask.
struct BitMask {
    int x0 = 0;
    int y0 = 0;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BitMask() = default;
    BitMask(int w, int h);
    BitMask(int origin_x, int origin_y, int w, int h);

    bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    /// Number of set bits.
    std::int64_t area() const;

    BBox extent() const { return BBox{x0, y0, width, height}; }

    /// Tight bounding box of the set bits, in image coordinates.
    /// Empty mask yields a degenerate box.
    BBox tight_box() const;

    bool operator==(const BitMask&) const = default;
};

/// Instance identifiers on a grid: 0 = background, k >= 1 = instance k.
/// Valid label maps carry a contiguous id set {0..K}.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> labels;

    LabelMap() = default;
    LabelMap(int w, int h);

    std::uint32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::uint32_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }

    std::uint32_t max_label() const;

    bool operator==(const LabelMap&) const = default;
};

/// Throws ValidationError when the id set is not contiguous {0..K};
/// the message lists (a prefix of) the missing ids.
void validate_label_map(const LabelMap& map);

/// Extract the pixels of one instance as a BitMask anchored at the
/// instance's tight bounding box.
BitMask mask_of_label(const LabelMap& map, std::uint32_t label);

/// Sub-image copy. The box is clamped to the image first; a box fully
/// outside the image raises ValidationError.
GrayImage crop(const GrayImage& img, const BBox& box);

}  // namespace crystalseg
