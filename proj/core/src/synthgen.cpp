#include "crystalseg/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "crystalseg/errors.hpp"
#include "crystalseg/morphology.hpp"
#include "crystalseg/rng.hpp"

namespace crystalseg {

namespace {

// Intensity drops relative to the background. Crystal interiors sit
// slightly below the background so the percentile binarization orders
// edge < interior < exterior cleanly under noise.
constexpr int kInteriorDrop = 25;
constexpr int kMimicDrop = 60;
constexpr int kBubbleRingExtraDrop = 20;
constexpr int kBorderMargin = 3;   // objects keep this distance from the image border
constexpr int kPlacementGap = 3;   // minimum Chebyshev gap between masks
constexpr double kMinBoxFill = 0.72;  // crystal area / tight-bbox area
constexpr int kMaxAttempts = 1000;

struct Point {
    double x, y;
};

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool point_in_convex(const std::vector<Point>& poly, double px, double py) {
    // Convex polygon in CCW order: inside iff never on the right side.
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % poly.size()];
        if (cross(a, b, Point{px, py}) < 0) return false;
    }
    return true;
}

// Rasterize into a mask anchored at the polygon's pixel bounding box.
BitMask rasterize_polygon(const std::vector<Point>& poly) {
    double min_x = poly[0].x, max_x = poly[0].x, min_y = poly[0].y, max_y = poly[0].y;
    for (const Point& p : poly) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const int x0 = static_cast<int>(std::floor(min_x));
    const int y0 = static_cast<int>(std::floor(min_y));
    const int w = static_cast<int>(std::ceil(max_x)) - x0 + 1;
    const int h = static_cast<int>(std::ceil(max_y)) - y0 + 1;
    BitMask mask(x0, y0, w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (point_in_convex(poly, x0 + x + 0.5, y0 + y + 0.5)) mask.set(x, y, true);
        }
    }
    return mask;
}

// Shrink the anchored mask to the tight extent of its set bits.
BitMask tighten(const BitMask& mask) {
    const BBox t = mask.tight_box();
    if (t.empty()) return BitMask{};
    BitMask out(t.x0, t.y0, t.w, t.h);
    for (int y = 0; y < t.h; ++y) {
        for (int x = 0; x < t.w; ++x) {
            out.set(x, y, mask.get(t.x0 - mask.x0 + x, t.y0 - mask.y0 + y));
        }
    }
    return out;
}

// Box sizes for three successive box blurs approximating a Gaussian.
std::array<int, 3> boxes_for_gauss(double sigma) {
    const double w_ideal = std::sqrt(12.0 * sigma * sigma / 3.0 + 1.0);
    int wl = static_cast<int>(std::floor(w_ideal));
    if (wl % 2 == 0) --wl;
    wl = std::max(wl, 1);
    const int wu = wl + 2;
    const double m_ideal =
        (12.0 * sigma * sigma - 3.0 * wl * wl - 12.0 * wl - 9.0) / (-4.0 * wl - 4.0);
    const int m = std::clamp(static_cast<int>(std::llround(m_ideal)), 0, 3);
    std::array<int, 3> sizes{};
    for (int i = 0; i < 3; ++i) sizes[i] = i < m ? wl : wu;
    return sizes;
}

void box_blur_pass(std::vector<double>& field, int w, int h, int radius) {
    if (radius < 1) return;
    const double norm = 1.0 / (2 * radius + 1);
    std::vector<double> tmp(field.size(), 0.0);
    for (int y = 0; y < h; ++y) {  // horizontal
        double acc = 0.0;
        for (int x = -radius; x <= radius; ++x) {
            if (x >= 0 && x < w) acc += field[static_cast<std::size_t>(y) * w + x];
        }
        for (int x = 0; x < w; ++x) {
            tmp[static_cast<std::size_t>(y) * w + x] = acc * norm;
            const int out_x = x - radius, in_x = x + radius + 1;
            if (out_x >= 0) acc -= field[static_cast<std::size_t>(y) * w + out_x];
            if (in_x < w) acc += field[static_cast<std::size_t>(y) * w + in_x];
        }
    }
    for (int x = 0; x < w; ++x) {  // vertical
        double acc = 0.0;
        for (int y = -radius; y <= radius; ++y) {
            if (y >= 0 && y < h) acc += tmp[static_cast<std::size_t>(y) * w + x];
        }
        for (int y = 0; y < h; ++y) {
            field[static_cast<std::size_t>(y) * w + x] = acc * norm;
            const int out_y = y - radius, in_y = y + radius + 1;
            if (out_y >= 0) acc -= tmp[static_cast<std::size_t>(out_y) * w + x];
            if (in_y < h) acc += tmp[static_cast<std::size_t>(in_y) * w + x];
        }
    }
}

std::uint8_t clamp_u8(long v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

struct Placer {
    const SceneSpec& spec;
    Xoshiro256StarStar& rng;
    BitMask occupied;  // union of placed masks dilated by their gaps

    explicit Placer(const SceneSpec& s, Xoshiro256StarStar& r)
        : spec(s), rng(r), occupied(s.width, s.height) {}

    bool overlaps(const BitMask& mask, int margin = 0) const {
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                if (!mask.get(x, y)) continue;
                const int x_lo = std::max(0, mask.x0 + x - margin);
                const int x_hi = std::min(spec.width - 1, mask.x0 + x + margin);
                const int y_lo = std::max(0, mask.y0 + y - margin);
                const int y_hi = std::min(spec.height - 1, mask.y0 + y + margin);
                for (int iy = y_lo; iy <= y_hi; ++iy) {
                    for (int ix = x_lo; ix <= x_hi; ++ix) {
                        if (occupied.get(ix, iy)) return true;
                    }
                }
            }
        }
        return false;
    }

    bool inside_margins(const BitMask& mask) const {
        return mask.x0 >= kBorderMargin && mask.y0 >= kBorderMargin &&
               mask.x0 + mask.width <= spec.width - kBorderMargin &&
               mask.y0 + mask.height <= spec.height - kBorderMargin;
    }

    void occupy(const BitMask& mask, int gap) {
        const StructuringElement se = StructuringElement::square(gap);
        // Dilate within the image-sized canvas.
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                if (!mask.get(x, y)) continue;
                for (const auto& [dx, dy] : se.offsets) {
                    const int ix = mask.x0 + x + dx, iy = mask.y0 + y + dy;
                    if (ix >= 0 && ix < spec.width && iy >= 0 && iy < spec.height) {
                        occupied.set(ix, iy, true);
                    }
                }
            }
        }
    }

    [[noreturn]] void fail(int object_index) const {
        std::ostringstream msg;
        msg << "synthgen: could not place object " << object_index << " after " << kMaxAttempts
            << " attempts";
        throw GenerationError(msg.str());
    }

    // Sample a center for an object of the given radius, keeping the
    // whole patch inside the margins.
    bool sample_center(double radius, int& cx, int& cy) {
        const int pad = static_cast<int>(std::ceil(radius)) + 1 + kBorderMargin;
        if (spec.width - 2 * pad <= 0 || spec.height - 2 * pad <= 0) return false;
        cx = rng.next_int(pad, spec.width - pad - 1);
        cy = rng.next_int(pad, spec.height - pad - 1);
        return true;
    }
};

BitMask make_crystal_mask(Placer& placer, Xoshiro256StarStar& rng, int object_index) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const int size = rng.next_int(placer.spec.size_min, placer.spec.size_max);
        const double radius = size / 2.0;
        int cx = 0, cy = 0;
        if (!placer.sample_center(radius, cx, cy)) placer.fail(object_index);

        const int n_vertices = rng.next_int(4, 8);
        std::vector<double> angles(n_vertices);
        for (double& a : angles) a = rng.next_range(0.0, 2.0 * std::numbers::pi);
        std::sort(angles.begin(), angles.end());
        std::vector<Point> pts;
        for (double a : angles) {
            const double r = rng.next_range(0.75 * radius, radius);
            pts.push_back(Point{cx + r * std::cos(a), cy + r * std::sin(a)});
        }
        const std::vector<Point> hull = convex_hull(std::move(pts));
        if (hull.size() < 4) continue;

        BitMask mask = tighten(rasterize_polygon(hull));
        if (mask.area() == 0) continue;
        // A tight box mostly covered by the crystal keeps the
        // percentile binarization from spilling into the surroundings.
        const double fill = static_cast<double>(mask.area()) /
                            static_cast<double>(mask.width * mask.height);
        if (fill < kMinBoxFill) continue;
        if (erode(mask, StructuringElement::square(2)).area() == 0) continue;  // no interior
        if (!placer.inside_margins(mask) || placer.overlaps(mask)) continue;
        return mask;
    }
    placer.fail(object_index);
}

// clearance keeps the blurred tail of a mimic away from already placed
// objects; the occupy gap covers the other direction.
BitMask make_ellipse_mask(Placer& placer, Xoshiro256StarStar& rng, int object_index,
                          int clearance) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const int size = rng.next_int(placer.spec.size_min, placer.spec.size_max);
        const double a = size / 2.0;
        const double b = a * rng.next_range(0.6, 1.0);
        const double theta = rng.next_range(0.0, std::numbers::pi);
        int cx = 0, cy = 0;
        if (!placer.sample_center(a, cx, cy)) placer.fail(object_index);

        const int r = static_cast<int>(std::ceil(a)) + 1;
        BitMask mask(cx - r, cy - r, 2 * r + 1, 2 * r + 1);
        const double ct = std::cos(theta), st = std::sin(theta);
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                const double px = mask.x0 + x + 0.5 - cx, py = mask.y0 + y + 0.5 - cy;
                const double u = px * ct + py * st, v = -px * st + py * ct;
                if ((u * u) / (a * a) + (v * v) / (b * b) <= 1.0) mask.set(x, y, true);
            }
        }
        mask = tighten(mask);
        if (mask.area() == 0) continue;
        if (!placer.inside_margins(mask) || placer.overlaps(mask, clearance)) continue;
        return mask;
    }
    placer.fail(object_index);
}

BitMask make_disk_mask(Placer& placer, Xoshiro256StarStar& rng, int object_index) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const int size = rng.next_int(placer.spec.size_min, placer.spec.size_max);
        const double radius = size / 2.0;
        int cx = 0, cy = 0;
        if (!placer.sample_center(radius, cx, cy)) placer.fail(object_index);

        const int r = static_cast<int>(std::ceil(radius)) + 1;
        BitMask mask(cx - r, cy - r, 2 * r + 1, 2 * r + 1);
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                const double px = mask.x0 + x + 0.5 - cx, py = mask.y0 + y + 0.5 - cy;
                if (px * px + py * py <= radius * radius) mask.set(x, y, true);
            }
        }
        mask = tighten(mask);
        if (mask.area() == 0) continue;
        if (!placer.inside_margins(mask) || placer.overlaps(mask)) continue;
        return mask;
    }
    placer.fail(object_index);
}

void draw_crystal(GrayImage& img, const BitMask& mask, const SceneSpec& spec) {
    const BitMask interior = erode(mask, StructuringElement::square(2));
    const auto edge_level = clamp_u8(spec.background_level - spec.edge_darkness);
    const auto interior_level = clamp_u8(spec.background_level - kInteriorDrop);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            img.at(mask.x0 + x, mask.y0 + y) = interior.get(x, y) ? interior_level : edge_level;
        }
    }
}

void draw_mimic(GrayImage& img, const BitMask& mask, const SceneSpec& spec) {
    const int pad = static_cast<int>(std::ceil(3.0 * spec.mimic_blur_sigma)) + 2;
    const int w = mask.width + 2 * pad, h = mask.height + 2 * pad;
    std::vector<double> delta(static_cast<std::size_t>(w) * h, 0.0);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.get(x, y)) delta[static_cast<std::size_t>(y + pad) * w + (x + pad)] = kMimicDrop;
        }
    }
    for (int box_size : boxes_for_gauss(spec.mimic_blur_sigma)) {
        box_blur_pass(delta, w, h, box_size / 2);
    }
    for (int y = 0; y < h; ++y) {
        const int iy = mask.y0 - pad + y;
        if (iy < 0 || iy >= img.height) continue;
        for (int x = 0; x < w; ++x) {
            const int ix = mask.x0 - pad + x;
            if (ix < 0 || ix >= img.width) continue;
            const long drop = std::lround(delta[static_cast<std::size_t>(y) * w + x]);
            if (drop > 0) img.at(ix, iy) = clamp_u8(static_cast<long>(img.at(ix, iy)) - drop);
        }
    }
}

void draw_bubble(GrayImage& img, const BitMask& mask, const SceneSpec& spec) {
    // Dark ring of ~3 px; the interior stays at background level.
    const BitMask interior = erode(mask, StructuringElement::square(3));
    const auto ring_level = clamp_u8(spec.background_level - spec.edge_darkness - kBubbleRingExtraDrop);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.get(x, y) && !interior.get(x, y)) {
                img.at(mask.x0 + x, mask.y0 + y) = ring_level;
            }
        }
    }
}

}  // namespace

Scene generate(const SceneSpec& spec) {
    if (spec.width < 16 || spec.height < 16) {
        throw ValidationError("synthgen: scene must be at least 16x16");
    }
    if (spec.n_crystals < 0 || spec.n_mimics < 0 || spec.n_bubbles < 0) {
        throw ValidationError("synthgen: object counts must be >= 0");
    }
    if (spec.size_min < 8 || spec.size_min > spec.size_max) {
        throw ValidationError("synthgen: size range must satisfy 8 <= size_min <= size_max");
    }
    if (spec.size_max + 2 * (kBorderMargin + 2) >= std::min(spec.width, spec.height)) {
        throw ValidationError("synthgen: size_max does not fit the image");
    }
    if (spec.noise_sigma < 0.0) throw ValidationError("synthgen: noise_sigma must be >= 0");

    Xoshiro256StarStar rng(spec.seed);
    Scene scene;
    scene.image = GrayImage(spec.width, spec.height,
                            clamp_u8(spec.background_level));
    Placer placer(spec, rng);

    struct Placed {
        ObjectClass cls;
        BitMask mask;
    };
    std::vector<Placed> objects;
    const int blur_reach = static_cast<int>(std::ceil(3.0 * spec.mimic_blur_sigma));
    const int mimic_gap = kPlacementGap + blur_reach;

    int object_index = 0;
    for (int i = 0; i < spec.n_crystals; ++i, ++object_index) {
        BitMask mask = make_crystal_mask(placer, rng, object_index);
        draw_crystal(scene.image, mask, spec);
        placer.occupy(mask, kPlacementGap);
        objects.push_back(Placed{ObjectClass::crystal, std::move(mask)});
    }
    for (int i = 0; i < spec.n_mimics; ++i, ++object_index) {
        BitMask mask = make_ellipse_mask(placer, rng, object_index, blur_reach);
        draw_mimic(scene.image, mask, spec);
        placer.occupy(mask, mimic_gap);
        objects.push_back(Placed{ObjectClass::hard_mimic, std::move(mask)});
    }
    for (int i = 0; i < spec.n_bubbles; ++i, ++object_index) {
        BitMask mask = make_disk_mask(placer, rng, object_index);
        draw_bubble(scene.image, mask, spec);
        placer.occupy(mask, kPlacementGap);
        objects.push_back(Placed{ObjectClass::air_bubble, std::move(mask)});
    }

    if (spec.noise_sigma > 0.0) {
        for (std::uint8_t& v : scene.image.data) {
            const long n = std::lround(spec.noise_sigma * rng.next_gaussian());
            v = clamp_u8(static_cast<long>(v) + n);
        }
    }

    int id = 1;
    for (Placed& obj : objects) {
        const BBox box = obj.mask.tight_box();
        scene.boxes.detections.push_back(Detection{obj.cls, box, 1.0});
        scene.truth.instances.push_back(Instance{id++, obj.cls, std::move(obj.mask), box, 1.0});
    }
    return scene;
}

}  // namespace crystalseg
