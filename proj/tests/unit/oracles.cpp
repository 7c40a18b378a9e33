#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace oracle {

namespace {

bool adjacent(int ax, int ay, int bx, int by, Connectivity conn) {
    const int dx = std::abs(ax - bx), dy = std::abs(ay - by);
    if (dx == 0 && dy == 0) return false;
    if (conn == Connectivity::four) return dx + dy == 1;
    return dx <= 1 && dy <= 1;
}

}  // namespace

BitMask binarize(const GrayImage& region, double fraction) {
    const std::int64_t n = region.pixel_count();
    const auto k = static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
    std::vector<std::size_t> order(region.data.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return region.data[a] < region.data[b];
    });
    BitMask out(region.width, region.height);
    for (std::int64_t i = 0; i < k; ++i) out.bits[order[static_cast<std::size_t>(i)]] = 1;
    return out;
}

BitMask fill_holes(const BitMask& mask, Connectivity background_conn) {
    const int w = mask.width, h = mask.height;
    if (w == 0 || h == 0) return mask;
    std::vector<std::uint8_t> reachable(mask.bits.size(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            if (border && !mask.get(x, y)) reachable[static_cast<std::size_t>(y) * w + x] = 1;
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                if (mask.bits[i] != 0 || reachable[i]) continue;
                for (int ny = 0; ny < h && !reachable[i]; ++ny) {
                    for (int nx = 0; nx < w; ++nx) {
                        if (reachable[static_cast<std::size_t>(ny) * w + nx] &&
                            adjacent(x, y, nx, ny, background_conn)) {
                            reachable[i] = 1;
                            changed = true;
                            break;
                        }
                    }
                }
            }
        }
    }
    BitMask out = mask;
    for (std::size_t i = 0; i < out.bits.size(); ++i) {
        if (!reachable[i]) out.bits[i] = 1;
    }
    return out;
}

BitMask erode(const BitMask& mask, const StructuringElement& se) {
    BitMask out = mask;
    // Every background (or outside) pixel vetoes all positions whose SE
    // placement would touch it.
    for (int y = -se.radius; y < mask.height + se.radius; ++y) {
        for (int x = -se.radius; x < mask.width + se.radius; ++x) {
            const bool background =
                x < 0 || x >= mask.width || y < 0 || y >= mask.height || !mask.get(x, y);
            if (!background) continue;
            for (const auto& [dx, dy] : se.offsets) {
                const int px = x - dx, py = y - dy;
                if (px >= 0 && px < mask.width && py >= 0 && py < mask.height) {
                    out.set(px, py, false);
                }
            }
        }
    }
    return out;
}

BitMask dilate(const BitMask& mask, const StructuringElement& se) {
    const int pad = se.radius;
    BitMask padded(mask.width + 2 * pad, mask.height + 2 * pad);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.get(x, y)) padded.set(x + pad, y + pad, true);
        }
    }
    for (auto& b : padded.bits) b = b ? 0 : 1;  // complement
    const BitMask eroded = oracle::erode(padded, se);
    BitMask out(mask.x0, mask.y0, mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            out.set(x, y, !eroded.get(x + pad, y + pad));
        }
    }
    return out;
}

BitMask open(const BitMask& mask, const StructuringElement& se) {
    return oracle::dilate(oracle::erode(mask, se), se);
}

LabelMap components(const BitMask& mask, Connectivity conn) {
    LabelMap map(mask.width, mask.height);
    std::uint32_t next = 0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y) || map.at(x, y) != 0) continue;
            ++next;
            std::deque<std::pair<int, int>> queue{{x, y}};
            map.at(x, y) = next;
            while (!queue.empty()) {
                const auto [cx, cy] = queue.front();
                queue.pop_front();
                for (int ny = std::max(0, cy - 1); ny <= std::min(mask.height - 1, cy + 1); ++ny) {
                    for (int nx = std::max(0, cx - 1); nx <= std::min(mask.width - 1, cx + 1);
                         ++nx) {
                        if (!adjacent(cx, cy, nx, ny, conn)) continue;
                        if (mask.get(nx, ny) && map.at(nx, ny) == 0) {
                            map.at(nx, ny) = next;
                            queue.emplace_back(nx, ny);
                        }
                    }
                }
            }
        }
    }
    return map;
}

BitMask largest(const BitMask& mask, Connectivity conn) {
    const LabelMap map = components(mask, conn);
    const std::uint32_t k = map.max_label();
    BitMask out(mask.x0, mask.y0, mask.width, mask.height);
    if (k == 0) return out;
    std::vector<std::int64_t> areas(static_cast<std::size_t>(k) + 1, 0);
    for (std::uint32_t v : map.labels) ++areas[v];
    std::uint32_t best = 1;
    for (std::uint32_t id = 2; id <= k; ++id) {
        if (areas[id] > areas[best]) best = id;
    }
    for (std::size_t i = 0; i < map.labels.size(); ++i) {
        if (map.labels[i] == best) out.bits[i] = 1;
    }
    return out;
}

double average_precision(const std::vector<PooledPrediction>& preds, std::int64_t n_gt) {
    const std::size_t n = preds.size();
    if (n == 0) return 0.0;
    std::vector<double> precision(n), recall(n);
    std::int64_t tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (preds[i].matched) ++tp;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
    }
    std::vector<double> levels = recall;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    double ap = 0.0, prev = 0.0;
    for (double r : levels) {
        if (r <= 0.0) continue;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (recall[i] >= r) best = std::max(best, precision[i]);
        }
        ap += (r - prev) * best;
        prev = r;
    }
    return ap;
}

BitMask random_mask(crystalseg::Xoshiro256StarStar& rng, int w, int h, double density) {
    BitMask mask(w, h);
    for (auto& b : mask.bits) b = rng.next_double() < density ? 1 : 0;
    return mask;
}

GrayImage random_image(crystalseg::Xoshiro256StarStar& rng, int w, int h) {
    GrayImage img(w, h);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.next_below(256));
    return img;
}

}  // namespace oracle
