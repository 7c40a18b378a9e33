#include "crystalseg/raster.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "crystalseg/errors.hpp"

namespace crystalseg {

const char* to_string(ObjectClass cls) {
    switch (cls) {
        case ObjectClass::crystal: return "crystal";
        case ObjectClass::hard_mimic: return "hard_mimic";
        case ObjectClass::air_bubble: return "air_bubble";
    }
    return "unknown";
}

std::optional<ObjectClass> object_class_from_string(std::string_view name) {
    if (name == "crystal") return ObjectClass::crystal;
    if (name == "hard_mimic") return ObjectClass::hard_mimic;
    if (name == "air_bubble") return ObjectClass::air_bubble;
    return std::nullopt;
}

std::optional<ObjectClass> object_class_from_code(int code) {
    if (code < 0 || code > 2) return std::nullopt;
    return static_cast<ObjectClass>(code);
}

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
    if (w < 1 || h < 1) throw ValidationError("GrayImage dimensions must be >= 1");
    data.assign(static_cast<std::size_t>(w) * h, fill);
}

BBox BBox::clamped(int image_w, int image_h) const {
    const int cx0 = std::clamp(x0, 0, image_w);
    const int cy0 = std::clamp(y0, 0, image_h);
    const int cx1 = std::clamp(x0 + w, 0, image_w);
    const int cy1 = std::clamp(y0 + h, 0, image_h);
    return BBox{cx0, cy0, cx1 - cx0, cy1 - cy0};
}

BitMask::BitMask(int w, int h) : width(w), height(h) {
    if (w < 0 || h < 0) throw ValidationError("BitMask dimensions must be >= 0");
    bits.assign(static_cast<std::size_t>(w) * h, 0);
}

BitMask::BitMask(int origin_x, int origin_y, int w, int h) : BitMask(w, h) {
    x0 = origin_x;
    y0 = origin_y;
}

std::int64_t BitMask::area() const {
    return std::accumulate(bits.begin(), bits.end(), std::int64_t{0},
                           [](std::int64_t acc, std::uint8_t b) { return acc + (b != 0); });
}

BBox BitMask::tight_box() const {
    int min_x = width, min_y = height, max_x = -1, max_y = -1;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!get(x, y)) continue;
            min_x = std::min(min_x, x);
            min_y = std::min(min_y, y);
            max_x = std::max(max_x, x);
            max_y = std::max(max_y, y);
        }
    }
    if (max_x < 0) return BBox{x0, y0, 0, 0};
    return BBox{x0 + min_x, y0 + min_y, max_x - min_x + 1, max_y - min_y + 1};
}

LabelMap::LabelMap(int w, int h) : width(w), height(h) {
    if (w < 0 || h < 0) throw ValidationError("LabelMap dimensions must be >= 0");
    labels.assign(static_cast<std::size_t>(w) * h, 0);
}

std::uint32_t LabelMap::max_label() const {
    std::uint32_t m = 0;
    for (std::uint32_t v : labels) m = std::max(m, v);
    return m;
}

void validate_label_map(const LabelMap& map) {
    const std::uint32_t k = map.max_label();
    std::vector<bool> seen(static_cast<std::size_t>(k) + 1, false);
    for (std::uint32_t v : map.labels) seen[v] = true;

    std::vector<std::uint32_t> missing;
    for (std::uint32_t id = 1; id <= k; ++id) {
        if (!seen[id]) missing.push_back(id);
    }
    if (missing.empty()) return;

    std::ostringstream msg;
    msg << "label map ids are not contiguous {0.." << k << "}; missing:";
    const std::size_t shown = std::min<std::size_t>(missing.size(), 16);
    for (std::size_t i = 0; i < shown; ++i) msg << ' ' << missing[i];
    if (missing.size() > shown) msg << " ... (" << missing.size() << " total)";
    throw ValidationError(msg.str());
}

BitMask mask_of_label(const LabelMap& map, std::uint32_t label) {
    int min_x = map.width, min_y = map.height, max_x = -1, max_y = -1;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            if (map.at(x, y) != label) continue;
            min_x = std::min(min_x, x);
            min_y = std::min(min_y, y);
            max_x = std::max(max_x, x);
            max_y = std::max(max_y, y);
        }
    }
    if (max_x < 0) return BitMask{};
    BitMask out(min_x, min_y, max_x - min_x + 1, max_y - min_y + 1);
    for (int y = min_y; y <= max_y; ++y) {
        for (int x = min_x; x <= max_x; ++x) {
            if (map.at(x, y) == label) out.set(x - min_x, y - min_y, true);
        }
    }
    return out;
}

GrayImage crop(const GrayImage& img, const BBox& box) {
    const BBox c = box.clamped(img.width, img.height);
    if (c.empty()) {
        std::ostringstream msg;
        msg << "crop box (" << box.x0 << ',' << box.y0 << ',' << box.w << ',' << box.h
            << ") lies fully outside a " << img.width << 'x' << img.height << " image";
        throw ValidationError(msg.str());
    }
    GrayImage out(c.w, c.h);
    for (int y = 0; y < c.h; ++y) {
        const auto* src = img.data.data() + static_cast<std::size_t>(c.y0 + y) * img.width + c.x0;
        std::copy(src, src + c.w, out.data.data() + static_cast<std::size_t>(y) * c.w);
    }
    return out;
}

}  // namespace crystalseg
