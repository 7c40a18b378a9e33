#include "crystalseg/detect.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "crystalseg/errors.hpp"
#include "crystalseg/morphology.hpp"

namespace crystalseg {

namespace {

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    std::ostringstream msg;
    msg << "detections: line " << line_no << ": " << what;
    throw FormatError(msg.str());
}

double parse_ratio(const std::string& token, std::size_t line_no, const char* field) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        line_error(line_no, std::string("non-numeric ") + field + " '" + token + "'");
    }
    if (used != token.size()) {
        line_error(line_no, std::string("non-numeric ") + field + " '" + token + "'");
    }
    if (!(v >= 0.0 && v <= 1.0)) {
        line_error(line_no, std::string(field) + " " + token + " outside [0,1]");
    }
    return v;
}

int round_px(double v) { return static_cast<int>(std::llround(v)); }

}  // namespace

DetectionSet parse_detections(std::string_view text, int img_w, int img_h, std::string image_id) {
    if (img_w < 1 || img_h < 1) throw ValidationError("image dimensions must be >= 1");
    DetectionSet set;
    set.image_id = std::move(image_id);

    std::istringstream stream{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::istringstream fields(line);
        std::vector<std::string> tok;
        std::string t;
        while (fields >> t) tok.push_back(t);
        if (tok.empty() || tok[0][0] == '#') continue;

        if (tok.size() != 5 && tok.size() != 6) {
            line_error(line_no, "expected 5 or 6 fields, got " + std::to_string(tok.size()));
        }

        int class_id = -1;
        try {
            std::size_t used = 0;
            class_id = std::stoi(tok[0], &used);
            if (used != tok[0].size()) class_id = -1;
        } catch (const std::exception&) {
            class_id = -1;
        }
        const auto cls = object_class_from_code(class_id);
        if (!cls) line_error(line_no, "class_id '" + tok[0] + "' not in {0,1,2}");

        const double xc = parse_ratio(tok[1], line_no, "x_center");
        const double yc = parse_ratio(tok[2], line_no, "y_center");
        const double wn = parse_ratio(tok[3], line_no, "width");
        const double hn = parse_ratio(tok[4], line_no, "height");
        const double conf = tok.size() == 6 ? parse_ratio(tok[5], line_no, "confidence") : 1.0;

        BBox box{round_px((xc - wn / 2.0) * img_w), round_px((yc - hn / 2.0) * img_h),
                 round_px(wn * img_w), round_px(hn * img_h)};
        box = box.clamped(img_w, img_h);
        if (box.empty()) line_error(line_no, "box degenerates to zero area after clamping");

        set.detections.push_back(Detection{*cls, box, conf});
    }
    return set;
}

std::string serialize_detections(const DetectionSet& set, int img_w, int img_h) {
    if (img_w < 1 || img_h < 1) throw ValidationError("image dimensions must be >= 1");
    std::string out;
    char buf[160];
    for (const Detection& d : set.detections) {
        const double xc = (d.box.x0 + d.box.w / 2.0) / img_w;
        const double yc = (d.box.y0 + d.box.h / 2.0) / img_h;
        const double wn = static_cast<double>(d.box.w) / img_w;
        const double hn = static_cast<double>(d.box.h) / img_h;
        std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f %.6f\n",
                      static_cast<int>(d.cls), xc, yc, wn, hn, d.confidence);
        out += buf;
    }
    return out;
}

DetectionSet baseline_detect(const GrayImage& img, const BaselineConfig& cfg) {
    const BitMask fg = percentile_binarize(img, cfg.dark_fraction);
    const LabelMap labels = connected_components(fg, Connectivity::eight);
    const std::uint32_t k = labels.max_label();

    const auto max_area =
        static_cast<std::int64_t>(cfg.max_area_fraction * static_cast<double>(img.pixel_count()));

    struct Component {
        std::int64_t area = 0;
        int min_x = 0, min_y = 0, max_x = -1, max_y = -1;
    };
    std::vector<Component> comps(static_cast<std::size_t>(k) + 1);
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            const std::uint32_t id = labels.at(x, y);
            if (id == 0) continue;
            Component& c = comps[id];
            if (c.area == 0) {
                c.min_x = c.max_x = x;
                c.min_y = c.max_y = y;
            } else {
                c.min_x = std::min(c.min_x, x);
                c.min_y = std::min(c.min_y, y);
                c.max_x = std::max(c.max_x, x);
                c.max_y = std::max(c.max_y, y);
            }
            ++c.area;
        }
    }

    std::vector<std::uint32_t> kept;
    std::int64_t largest = 0;
    for (std::uint32_t id = 1; id <= k; ++id) {
        const std::int64_t a = comps[id].area;
        if (a < cfg.min_area || a > max_area) continue;
        kept.push_back(id);
        largest = std::max(largest, a);
    }

    DetectionSet set;
    for (std::uint32_t id : kept) {
        const Component& c = comps[id];
        BBox box{c.min_x - 2, c.min_y - 2, c.max_x - c.min_x + 5, c.max_y - c.min_y + 5};
        box = box.clamped(img.width, img.height);
        const double conf = static_cast<double>(c.area) / static_cast<double>(largest);
        set.detections.push_back(Detection{ObjectClass::crystal, box, conf});
    }
    return set;
}

}  // namespace crystalseg
