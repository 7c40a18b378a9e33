#pragma once

#include <utility>
#include <vector>

#include "crystalseg/raster.hpp"

namespace crystalseg {

/// Pixel adjacency. Foreground and background connectivity are dual:
/// eight-connected foreground pairs with four-connected background.
enum class Connectivity {
    four,
    eight,
};

constexpr Connectivity dual(Connectivity c) {
    return c == Connectivity::four ? Connectivity::eight : Connectivity::four;
}

const char* to_string(Connectivity c);

/// Neighborhood shape for erode/dilate/open. Always contains the origin
/// and is symmetric under negation.
struct StructuringElement {
    enum class Shape { square, disk };

    Shape shape = Shape::square;
    int radius = 1;
    std::vector<std::pair<int, int>> offsets;  // (dx, dy)

    /// All offsets with max(|dx|,|dy|) <= radius.
    static StructuringElement square(int radius);
    /// All offsets with dx^2 + dy^2 <= radius^2.
    static StructuringElement disk(int radius);
};

// All operations below treat pixels outside a mask's extent as
// background and preserve the input's origin and extent; dilation is
// clipped at the extent (tests that exercise erode/dilate duality pad
// the canvas first).

/// Mark exactly k = floor(fraction * N + 0.5) bits, the k darkest
/// pixels of the region; ties at the threshold intensity go to the
/// earlier pixel in row-major order. The result's origin is (0,0).
BitMask percentile_binarize(const GrayImage& region, double fraction);

/// Union of the input with every background region that cannot reach
/// the extent border, where background pixels connect via
/// background_conn.
BitMask fill_holes(const BitMask& mask, Connectivity background_conn);

/// Pixels whose whole SE neighborhood is set.
BitMask erode(const BitMask& mask, const StructuringElement& se);

/// Pixels covered by the SE placed on any set pixel.
BitMask dilate(const BitMask& mask, const StructuringElement& se);

/// dilate(erode(mask)).
BitMask open(const BitMask& mask, const StructuringElement& se);

/// Label each maximal connected foreground region, ids assigned in
/// order of first row-major pixel, starting at 1. The result grid
/// matches the mask extent.
LabelMap connected_components(const BitMask& mask, Connectivity conn);

/// The component with the largest pixel count; ties go to the smaller
/// component id. Empty input yields an empty mask with the same extent.
BitMask largest_component(const BitMask& mask, Connectivity conn);

}  // namespace crystalseg
