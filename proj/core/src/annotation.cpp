#include "crystalseg/annotation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "crystalseg/errors.hpp"
#include "crystalseg/morphology.hpp"
#include "crystalseg/pgm_io.hpp"

namespace crystalseg {

namespace {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double dist2(const Point& a, const Point& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const double abx = b.x - a.x, aby = b.y - a.y;
    const double len2 = abx * abx + aby * aby;
    if (len2 == 0.0) return std::sqrt(dist2(p, a));
    double t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const Point proj{a.x + t * abx, a.y + t * aby};
    return std::sqrt(dist2(p, proj));
}

// Local boundary predicate: a set pixel with a background 4-neighbor
// (outside the extent counts as background).
bool is_boundary(const BitMask& mask, int x, int y) {
    if (!mask.get(x, y)) return false;
    if (x == 0 || x == mask.width - 1 || y == 0 || y == mask.height - 1) return true;
    return !mask.get(x - 1, y) || !mask.get(x + 1, y) || !mask.get(x, y - 1) ||
           !mask.get(x, y + 1);
}

// Clockwise 8-neighborhood starting at W (y grows downward).
constexpr std::array<std::pair<int, int>, 8> kClockwise = {{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1},
}};

int direction_index(int dx, int dy) {
    for (int i = 0; i < 8; ++i) {
        if (kClockwise[i].first == dx && kClockwise[i].second == dy) return i;
    }
    return -1;
}

// Moore boundary trace of the (single) component, pixel centers in
// local coordinates. A lone pixel yields a single point.
std::vector<Point> trace_contour(const BitMask& mask) {
    int sx = -1, sy = -1;
    for (int y = 0; y < mask.height && sx < 0; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.get(x, y)) {
                sx = x;
                sy = y;
                break;
            }
        }
    }
    std::vector<Point> contour;
    auto at = [&](int x, int y) {
        return x >= 0 && x < mask.width && y >= 0 && y < mask.height && mask.get(x, y);
    };

    int cx = sx, cy = sy;
    int b_idx = 0;  // backtrack points W of the start pixel, which is background
    const int start_b_idx = b_idx;
    contour.push_back(Point{static_cast<double>(sx), static_cast<double>(sy)});

    const std::int64_t max_steps = 4 * mask.area() + 8;
    for (std::int64_t step = 0; step < max_steps; ++step) {
        int found = -1;
        for (int i = 1; i <= 8; ++i) {
            const int d = (b_idx + i) % 8;
            if (at(cx + kClockwise[d].first, cy + kClockwise[d].second)) {
                found = i;
                break;
            }
        }
        if (found < 0) break;  // isolated pixel

        const int d = (b_idx + found) % 8;
        const int last_bg = (b_idx + found - 1) % 8;
        const int nx = cx + kClockwise[d].first;
        const int ny = cy + kClockwise[d].second;
        const int bx = cx + kClockwise[last_bg].first;
        const int by = cy + kClockwise[last_bg].second;

        cx = nx;
        cy = ny;
        b_idx = direction_index(bx - cx, by - cy);
        if (cx == sx && cy == sy && b_idx == start_b_idx) break;
        contour.push_back(Point{static_cast<double>(cx), static_cast<double>(cy)});
    }
    return contour;
}

void dp_recurse(const std::vector<Point>& pts, std::size_t lo, std::size_t hi, double eps,
                std::vector<bool>& keep) {
    if (hi <= lo + 1) return;
    double worst = 0.0;
    std::size_t worst_i = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
        if (d > worst) {
            worst = d;
            worst_i = i;
        }
    }
    if (worst > eps) {
        keep[worst_i] = true;
        dp_recurse(pts, lo, worst_i, eps, keep);
        dp_recurse(pts, worst_i, hi, eps, keep);
    }
}

// Douglas-Peucker on a closed contour: anchor at point 0 and at the
// point farthest from it, simplify both halves.
std::vector<Point> simplify_closed(const std::vector<Point>& contour, double eps) {
    const std::size_t n = contour.size();
    if (n <= 3) return contour;

    std::size_t far_i = 1;
    double far_d = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = dist2(contour[0], contour[i]);
        if (d > far_d) {
            far_d = d;
            far_i = i;
        }
    }
    std::vector<bool> keep(n, false);
    keep[0] = keep[far_i] = true;
    dp_recurse(contour, 0, far_i, eps, keep);
    // Wrap-around half: far_i .. n-1 .. 0, handled on a rotated copy.
    std::vector<Point> wrap(contour.begin() + static_cast<std::ptrdiff_t>(far_i), contour.end());
    wrap.push_back(contour[0]);
    std::vector<bool> wrap_keep(wrap.size(), false);
    wrap_keep.front() = wrap_keep.back() = true;
    dp_recurse(wrap, 0, wrap.size() - 1, eps, wrap_keep);
    for (std::size_t i = 0; i + 1 < wrap.size(); ++i) {
        if (wrap_keep[i]) keep[far_i + i] = true;
    }

    std::vector<Point> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) out.push_back(contour[i]);
    }
    return out;
}

double max_deviation(const std::vector<Point>& contour, const std::vector<Point>& polygon) {
    if (polygon.size() < 2) return 0.0;
    double worst = 0.0;
    for (const Point& p : contour) {
        double best = std::numeric_limits<double>::max();
        for (std::size_t e = 0; e < polygon.size(); ++e) {
            const Point& a = polygon[e];
            const Point& b = polygon[(e + 1) % polygon.size()];
            best = std::min(best, point_segment_distance(p, a, b));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Monotone-chain convex hull; returns the hull in counter-clockwise
// order (screen coordinates).
std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
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

double polygon_area(const std::vector<Point>& poly) {
    if (poly.size() < 3) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % poly.size()];
        sum += a.x * b.y - b.x * a.y;
    }
    return std::abs(sum) / 2.0;
}

double gradient_magnitude(const GrayImage& img, int x, int y) {
    auto sample = [&](int sx, int sy) {
        sx = std::clamp(sx, 0, img.width - 1);
        sy = std::clamp(sy, 0, img.height - 1);
        return static_cast<double>(img.at(sx, sy));
    };
    const double gx = (sample(x + 1, y) - sample(x - 1, y)) / 2.0;
    const double gy = (sample(x, y + 1) - sample(x, y - 1)) / 2.0;
    return std::sqrt(gx * gx + gy * gy);
}

}  // namespace

const char* to_string(Rule rule) {
    switch (rule) {
        case Rule::none: return "none";
        case Rule::r1_all_faint: return "R1";
        case Rule::r2_small_no_opening: return "R2";
        case Rule::r3_border_or_tiny: return "R3";
        case Rule::r4_non_polygon: return "R4";
    }
    return "none";
}

ObjectFeatures extract_features(const GrayImage& img, const BitMask& mask,
                                const RuleConfig& cfg) {
    if (mask.area() == 0) throw ValidationError("extract_features: empty mask");
    if (mask.x0 < 0 || mask.y0 < 0 || mask.x0 + mask.width > img.width ||
        mask.y0 + mask.height > img.height) {
        throw ValidationError("extract_features: mask extends outside the image");
    }
    if (connected_components(mask, Connectivity::eight).max_label() != 1) {
        throw ValidationError("extract_features: mask is not a single connected component");
    }

    ObjectFeatures f;
    f.area = static_cast<double>(mask.area());

    std::vector<Point> corner_points;
    std::int64_t boundary_n = 0, sharp_n = 0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            const int ix = mask.x0 + x, iy = mask.y0 + y;
            if (ix == 0 || iy == 0 || ix == img.width - 1 || iy == img.height - 1) {
                f.touches_border = true;
            }
            if (!is_boundary(mask, x, y)) continue;
            ++boundary_n;
            if (gradient_magnitude(img, ix, iy) >= cfg.tau_sharp) ++sharp_n;
            const auto px = static_cast<double>(x), py = static_cast<double>(y);
            corner_points.push_back(Point{px, py});
            corner_points.push_back(Point{px + 1, py});
            corner_points.push_back(Point{px, py + 1});
            corner_points.push_back(Point{px + 1, py + 1});
        }
    }
    f.sharp_edge_fraction =
        boundary_n > 0 ? static_cast<double>(sharp_n) / static_cast<double>(boundary_n) : 0.0;

    const double hull_area = polygon_area(convex_hull(std::move(corner_points)));
    f.solidity = hull_area > 0.0 ? std::min(1.0, f.area / hull_area) : 1.0;

    const std::vector<Point> contour = trace_contour(mask);
    f.polygon_residual = max_deviation(contour, simplify_closed(contour, cfg.eps_poly));

    // Opening test: does the dark-fraction binarization of the object's
    // own bounding box contain a hole before infilling? Restricting to
    // the largest component keeps stray speckle from faking holes.
    const BBox box = mask.tight_box();
    const GrayImage region = crop(img, box);
    const BitMask object = largest_component(percentile_binarize(region, cfg.dark_fraction),
                                             Connectivity::eight);
    f.has_opening = fill_holes(object, Connectivity::four).bits != object.bits;
    return f;
}

Classification classify(const ObjectFeatures& f, const RuleConfig& cfg) {
    if (f.sharp_edge_fraction < cfg.f_all_faint) {
        return {ObjectClass::hard_mimic, Rule::r1_all_faint};
    }
    if (f.area < cfg.a_small && !f.has_opening) {
        return {ObjectClass::hard_mimic, Rule::r2_small_no_opening};
    }
    if ((f.touches_border && !f.has_opening) || f.area < cfg.a_tiny) {
        return {ObjectClass::hard_mimic, Rule::r3_border_or_tiny};
    }
    if ((f.solidity < cfg.s_min || f.polygon_residual > cfg.eps_poly) &&
        f.sharp_edge_fraction < cfg.f_partial) {
        return {ObjectClass::hard_mimic, Rule::r4_non_polygon};
    }
    return {ObjectClass::crystal, Rule::none};
}

RuleConfig parse_rule_config(std::string_view text) {
    RuleConfig cfg;
    std::istringstream stream{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw FormatError("rules: line " + std::to_string(line_no) + ": expected key=value");
            }
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        double v = 0.0;
        try {
            v = std::stod(value);
        } catch (const std::exception&) {
            throw FormatError("rules: line " + std::to_string(line_no) + ": bad value '" + value +
                              "'");
        }
        if (v <= 0.0) {
            throw FormatError("rules: line " + std::to_string(line_no) + ": " + key +
                              " must be positive");
        }
        if (key == "tau_sharp") cfg.tau_sharp = v;
        else if (key == "f_all_faint") cfg.f_all_faint = v;
        else if (key == "f_partial") cfg.f_partial = v;
        else if (key == "a_small") cfg.a_small = v;
        else if (key == "a_tiny") cfg.a_tiny = v;
        else if (key == "s_min") cfg.s_min = v;
        else if (key == "eps_poly") cfg.eps_poly = v;
        else if (key == "dark_fraction") cfg.dark_fraction = v;
        else throw FormatError("rules: line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    return cfg;
}

RuleConfig load_rule_config(const std::filesystem::path& path) {
    return parse_rule_config(read_file(path));
}

}  // namespace crystalseg
