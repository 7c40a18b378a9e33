#include "crystalseg/morphology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "crystalseg/errors.hpp"

namespace crystalseg {

namespace {

// Neighbor offsets; the first four entries are the 4-neighborhood.
constexpr std::array<std::pair<int, int>, 8> kNeighbors = {{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1},
}};

int neighbor_count(Connectivity c) {
    return c == Connectivity::four ? 4 : 8;
}

}  // namespace

const char* to_string(Connectivity c) {
    return c == Connectivity::four ? "four" : "eight";
}

StructuringElement StructuringElement::square(int radius) {
    if (radius < 1) throw ValidationError("structuring element radius must be >= 1");
    StructuringElement se;
    se.shape = Shape::square;
    se.radius = radius;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) se.offsets.emplace_back(dx, dy);
    }
    return se;
}

StructuringElement StructuringElement::disk(int radius) {
    if (radius < 1) throw ValidationError("structuring element radius must be >= 1");
    StructuringElement se;
    se.shape = Shape::disk;
    se.radius = radius;
    const int r2 = radius * radius;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dx * dx + dy * dy <= r2) se.offsets.emplace_back(dx, dy);
        }
    }
    return se;
}

BitMask percentile_binarize(const GrayImage& region, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ValidationError("binarize fraction must lie in (0,1)");
    }
    const std::int64_t n = region.pixel_count();
    // Round-half-up pixel budget.
    const auto k = static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(n) + 0.5));

    std::array<std::int64_t, 256> hist{};
    for (std::uint8_t v : region.data) ++hist[v];

    // Threshold intensity: everything strictly darker is set, and the
    // remaining budget is spent on threshold-valued pixels in scan order.
    std::int64_t below = 0;
    int threshold = 0;
    while (threshold < 256 && below + hist[threshold] < k) {
        below += hist[threshold];
        ++threshold;
    }

    BitMask out(region.width, region.height);
    std::int64_t at_threshold_budget = k - below;
    for (std::size_t i = 0; i < region.data.size(); ++i) {
        const int v = region.data[i];
        if (v < threshold) {
            out.bits[i] = 1;
        } else if (v == threshold && at_threshold_budget > 0) {
            out.bits[i] = 1;
            --at_threshold_budget;
        }
    }
    return out;
}

BitMask fill_holes(const BitMask& mask, Connectivity background_conn) {
    if (mask.width == 0 || mask.height == 0) return mask;
    const int w = mask.width, h = mask.height;
    const int nn = neighbor_count(background_conn);

    // Flood the background from the extent border; anything the flood
    // misses is a hole.
    std::vector<std::uint8_t> reached(mask.bits.size(), 0);
    std::vector<int> stack;
    auto push = [&](int x, int y) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (mask.bits[i] == 0 && !reached[i]) {
            reached[i] = 1;
            stack.push_back(static_cast<int>(i));
        }
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const int x = i % w, y = i / w;
        for (int k = 0; k < nn; ++k) {
            const int nx = x + kNeighbors[k].first;
            const int ny = y + kNeighbors[k].second;
            if (nx >= 0 && nx < w && ny >= 0 && ny < h) push(nx, ny);
        }
    }

    BitMask out = mask;
    for (std::size_t i = 0; i < out.bits.size(); ++i) {
        if (!reached[i]) out.bits[i] = 1;
    }
    return out;
}

BitMask erode(const BitMask& mask, const StructuringElement& se) {
    BitMask out(mask.x0, mask.y0, mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            bool keep = true;
            for (const auto& [dx, dy] : se.offsets) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= mask.width || ny < 0 || ny >= mask.height || !mask.get(nx, ny)) {
                    keep = false;
                    break;
                }
            }
            if (keep) out.set(x, y, true);
        }
    }
    return out;
}

BitMask dilate(const BitMask& mask, const StructuringElement& se) {
    BitMask out(mask.x0, mask.y0, mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            for (const auto& [dx, dy] : se.offsets) {
                const int nx = x + dx, ny = y + dy;
                if (nx >= 0 && nx < mask.width && ny >= 0 && ny < mask.height) out.set(nx, ny, true);
            }
        }
    }
    return out;
}

BitMask open(const BitMask& mask, const StructuringElement& se) {
    return dilate(erode(mask, se), se);
}

LabelMap connected_components(const BitMask& mask, Connectivity conn) {
    const int w = mask.width, h = mask.height;
    LabelMap map(w, h);
    if (w == 0 || h == 0) return map;

    // Classic two-pass union-find over provisional labels, then a
    // relabeling pass that assigns dense ids in first-pixel order.
    std::vector<std::uint32_t> parent(1, 0);  // parent[0] unused (background)
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent[b] = a;
        else parent[a] = b;
    };

    // Previously-visited neighbors in a row-major scan.
    const std::array<std::pair<int, int>, 4> prior4 = {{{-1, 0}, {0, -1}, {-1, -1}, {1, -1}}};
    const int prior_n = conn == Connectivity::four ? 2 : 4;

    std::vector<std::uint32_t> prov(mask.bits.size(), 0);
    std::uint32_t next_prov = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (mask.bits[i] == 0) continue;
            std::uint32_t label = 0;
            for (int k = 0; k < prior_n; ++k) {
                const int nx = x + prior4[k].first;
                const int ny = y + prior4[k].second;
                if (nx < 0 || nx >= w || ny < 0) continue;
                const std::uint32_t nl = prov[static_cast<std::size_t>(ny) * w + nx];
                if (nl == 0) continue;
                if (label == 0) label = nl;
                else unite(label, nl);
            }
            if (label == 0) {
                label = ++next_prov;
                parent.push_back(label);
            }
            prov[i] = label;
        }
    }

    std::vector<std::uint32_t> dense(next_prov + 1, 0);
    std::uint32_t next_id = 0;
    for (std::size_t i = 0; i < prov.size(); ++i) {
        if (prov[i] == 0) continue;
        const std::uint32_t root = find(prov[i]);
        if (dense[root] == 0) dense[root] = ++next_id;
        map.labels[i] = dense[root];
    }
    return map;
}

BitMask largest_component(const BitMask& mask, Connectivity conn) {
    const LabelMap map = connected_components(mask, conn);
    const std::uint32_t k = map.max_label();
    BitMask out(mask.x0, mask.y0, mask.width, mask.height);
    if (k == 0) return out;

    std::vector<std::int64_t> areas(static_cast<std::size_t>(k) + 1, 0);
    for (std::uint32_t v : map.labels) ++areas[v];
    std::uint32_t best = 1;
    for (std::uint32_t id = 2; id <= k; ++id) {
        if (areas[id] > areas[best]) best = id;  // strict: ties keep the lower id
    }
    for (std::size_t i = 0; i < map.labels.size(); ++i) {
        if (map.labels[i] == best) out.bits[i] = 1;
    }
    return out;
}

}  // namespace crystalseg
