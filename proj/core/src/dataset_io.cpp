#include "crystalseg/dataset_io.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "crystalseg/errors.hpp"
#include "crystalseg/pgm_io.hpp"

namespace crystalseg {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

[[noreturn]] void csv_error(std::size_t line_no, const std::string& what) {
    throw FormatError("classes csv: line " + std::to_string(line_no) + ": " + what);
}

long parse_long(const std::string& s, std::size_t line_no, const char* field) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) csv_error(line_no, std::string("bad ") + field + " '" + s + "'");
        return v;
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception&) {
        csv_error(line_no, std::string("bad ") + field + " '" + s + "'");
    }
}

double parse_double(const std::string& s, std::size_t line_no, const char* field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) csv_error(line_no, std::string("bad ") + field + " '" + s + "'");
        return v;
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception&) {
        csv_error(line_no, std::string("bad ") + field + " '" + s + "'");
    }
}

}  // namespace

std::vector<std::uint32_t> label_assignment(const InstanceSet& set) {
    std::vector<std::uint32_t> labels(set.instances.size(), 0);
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < set.instances.size(); ++i) {
        if (set.instances[i].mask.area() > 0) labels[i] = ++next;
    }
    return labels;
}

LabelMap render_label_map(const InstanceSet& set, int width, int height) {
    LabelMap map(width, height);
    const std::vector<std::uint32_t> labels = label_assignment(set);
    for (std::size_t i = 0; i < set.instances.size(); ++i) {
        if (labels[i] == 0) continue;
        const BitMask& mask = set.instances[i].mask;
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                if (!mask.get(x, y)) continue;
                const int ix = mask.x0 + x, iy = mask.y0 + y;
                if (ix >= 0 && ix < width && iy >= 0 && iy < height) map.at(ix, iy) = labels[i];
            }
        }
    }
    return map;
}

std::string write_classes_csv(const InstanceSet& set) {
    std::string out = "instance_id,label,class,confidence,x0,y0,w,h\n";
    const std::vector<std::uint32_t> labels = label_assignment(set);
    char buf[256];
    for (std::size_t i = 0; i < set.instances.size(); ++i) {
        const Instance& inst = set.instances[i];
        std::snprintf(buf, sizeof(buf), "%d,%u,%s,%.6f,%d,%d,%d,%d\n", inst.id, labels[i],
                      to_string(inst.cls), inst.confidence, inst.box.x0, inst.box.y0, inst.box.w,
                      inst.box.h);
        out += buf;
    }
    return out;
}

InstanceSet read_classes_csv(const std::string& text, const LabelMap& labels,
                             std::string image_id) {
    InstanceSet set;
    set.image_id = std::move(image_id);

    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (!saw_header) {
            if (f.empty() || f[0] != "instance_id") {
                csv_error(line_no, "expected header starting with instance_id");
            }
            saw_header = true;
            continue;
        }
        if (f.size() != 8) csv_error(line_no, "expected 8 fields, got " + std::to_string(f.size()));

        Instance inst;
        const long id = parse_long(f[0], line_no, "instance_id");
        if (id < 1 || id > 1'000'000'000L) csv_error(line_no, "instance_id must be >= 1");
        inst.id = static_cast<int>(id);
        const long label = parse_long(f[1], line_no, "label");
        const auto cls = object_class_from_string(f[2]);
        if (!cls) csv_error(line_no, "unknown class '" + f[2] + "'");
        inst.cls = *cls;
        inst.confidence = parse_double(f[3], line_no, "confidence");
        inst.box = BBox{static_cast<int>(parse_long(f[4], line_no, "x0")),
                        static_cast<int>(parse_long(f[5], line_no, "y0")),
                        static_cast<int>(parse_long(f[6], line_no, "w")),
                        static_cast<int>(parse_long(f[7], line_no, "h"))};
        if (label < 0 || static_cast<std::uint32_t>(label) > labels.max_label()) {
            csv_error(line_no, "label " + std::to_string(label) + " not present in the label map");
        }
        if (label > 0) {
            inst.mask = mask_of_label(labels, static_cast<std::uint32_t>(label));
        } else {
            inst.mask.x0 = inst.box.x0;
            inst.mask.y0 = inst.box.y0;
        }
        set.instances.push_back(std::move(inst));
    }
    if (!saw_header) throw FormatError("classes csv: missing header");
    return set;
}

void write_instance_files(const std::filesystem::path& dir, const InstanceSet& set, int width,
                          int height) {
    save_label_map(dir / (set.image_id + "_labels.pgm"), render_label_map(set, width, height));
    write_file_atomic(dir / (set.image_id + "_classes.csv"), write_classes_csv(set));
}

InstanceSet load_instance_files(const std::filesystem::path& dir, const std::string& image_id) {
    const LabelMap labels = load_label_map(dir / (image_id + "_labels.pgm"));
    const std::string csv = read_file(dir / (image_id + "_classes.csv"));
    return read_classes_csv(csv, labels, image_id);
}

std::vector<std::string> list_image_ids(const std::filesystem::path& dir) {
    std::vector<std::string> ids;
    const std::string suffix = "_labels.pgm";
    if (!std::filesystem::is_directory(dir)) {
        throw FormatError("not a directory: " + dir.string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.size() > suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            ids.push_back(name.substr(0, name.size() - suffix.size()));
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<std::pair<std::string, int>> read_counts_csv(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::vector<std::pair<std::string, int>> counts;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (!saw_header) {
            if (f.size() != 2 || f[0] != "image_id" || f[1] != "count") {
                throw FormatError("counts csv: expected header image_id,count");
            }
            saw_header = true;
            continue;
        }
        if (f.size() != 2) {
            throw FormatError("counts csv: line " + std::to_string(line_no) + ": expected 2 fields");
        }
        counts.emplace_back(f[0], static_cast<int>(parse_long(f[1], line_no, "count")));
    }
    if (!saw_header) throw FormatError("counts csv: missing header");
    return counts;
}

std::string write_counts_csv(const std::vector<std::pair<std::string, int>>& counts) {
    std::string out = "image_id,count\n";
    for (const auto& [id, count] : counts) {
        out += id + ',' + std::to_string(count) + '\n';
    }
    return out;
}

GrayImage render_overlay(const GrayImage& img, const InstanceSet& set) {
    GrayImage out = img;
    for (const Instance& inst : set.instances) {
        const BitMask& mask = inst.mask;
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                if (!mask.get(x, y)) continue;
                const bool boundary = x == 0 || x == mask.width - 1 || y == 0 ||
                                      y == mask.height - 1 || !mask.get(x - 1, y) ||
                                      !mask.get(x + 1, y) || !mask.get(x, y - 1) ||
                                      !mask.get(x, y + 1);
                if (!boundary) continue;
                const int ix = mask.x0 + x, iy = mask.y0 + y;
                if (ix >= 0 && ix < out.width && iy >= 0 && iy < out.height) out.at(ix, iy) = 0;
            }
        }
    }
    return out;
}

}  // namespace crystalseg
