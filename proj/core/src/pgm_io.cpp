#include "crystalseg/pgm_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "crystalseg/errors.hpp"

namespace crystalseg {

namespace {

// Header scanner keeping track of the byte offset for error messages.
class Cursor {
public:
    explicit Cursor(std::string_view bytes) : bytes_(bytes) {}

    std::size_t pos() const { return pos_; }
    bool eof() const { return pos_ >= bytes_.size(); }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    unsigned char peek() const { return static_cast<unsigned char>(bytes_[pos_]); }
    unsigned char take() { return static_cast<unsigned char>(bytes_[pos_++]); }

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream msg;
        msg << "pgm: " << what << " at byte " << pos_;
        throw FormatError(msg.str());
    }

    // Skip whitespace and '#' comments (comment runs to end of line).
    void skip_space_and_comments() {
        while (!eof()) {
            if (std::isspace(peek())) {
                take();
            } else if (peek() == '#') {
                while (!eof() && take() != '\n') {
                }
            } else {
                break;
            }
        }
    }

    // Nonnegative decimal integer, bounded to keep w*h arithmetic safe.
    long parse_int(const char* field) {
        skip_space_and_comments();
        if (eof() || !std::isdigit(peek())) {
            fail(std::string("expected ") + field);
        }
        long value = 0;
        while (!eof() && std::isdigit(peek())) {
            value = value * 10 + (take() - '0');
            if (value > 1'000'000'000L) fail(std::string(field) + " out of range");
        }
        return value;
    }

    const char* data_at_pos() const { return bytes_.data() + pos_; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

struct Header {
    bool binary = false;  // P5 vs P2
    int width = 0;
    int height = 0;
    long maxval = 0;
    Cursor cursor;
};

Header parse_header(std::string_view bytes, long maxval_floor, long maxval_ceil) {
    Cursor cur(bytes);
    if (cur.remaining() < 2) cur.fail("missing magic");
    const char m0 = static_cast<char>(cur.take());
    const char m1 = static_cast<char>(cur.take());
    bool binary;
    if (m0 == 'P' && m1 == '5') {
        binary = true;
    } else if (m0 == 'P' && m1 == '2') {
        binary = false;
    } else {
        throw FormatError("pgm: bad magic (want P5 or P2) at byte 0");
    }

    const long w = cur.parse_int("width");
    const long h = cur.parse_int("height");
    if (w < 1 || h < 1) cur.fail("dimensions must be >= 1");
    const long maxval = cur.parse_int("maxval");
    if (maxval < maxval_floor || maxval > maxval_ceil) {
        std::ostringstream msg;
        msg << "pgm: maxval " << maxval << " outside [" << maxval_floor << ',' << maxval_ceil
            << "] at byte " << cur.pos();
        throw FormatError(msg.str());
    }
    if (binary) {
        // Exactly one whitespace byte separates maxval from the raster.
        if (cur.eof() || !std::isspace(cur.peek())) cur.fail("expected single whitespace before raster");
        cur.take();
    }
    return Header{binary, static_cast<int>(w), static_cast<int>(h), maxval, cur};
}

}  // namespace

GrayImage read_pgm(std::string_view bytes) {
    Header hdr = parse_header(bytes, 1, 255);
    GrayImage img(hdr.width, hdr.height);
    const std::size_t n = img.data.size();
    Cursor& cur = hdr.cursor;

    if (hdr.binary) {
        if (cur.remaining() < n) {
            std::ostringstream msg;
            msg << "pgm: truncated raster, expected " << n << " bytes but only " << cur.remaining()
                << " remain at byte " << cur.pos();
            throw FormatError(msg.str());
        }
        const char* src = cur.data_at_pos();
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = static_cast<unsigned char>(src[i]);
            if (v > hdr.maxval) {
                std::ostringstream msg;
                msg << "pgm: sample " << static_cast<int>(v) << " exceeds maxval " << hdr.maxval
                    << " at byte " << (cur.pos() + i);
                throw FormatError(msg.str());
            }
            img.data[i] = v;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const long v = cur.parse_int("sample");
            if (v > hdr.maxval) cur.fail("sample exceeds maxval");
            img.data[i] = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

std::string write_pgm(const GrayImage& img) {
    std::ostringstream out;
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    return out.str();
}

LabelMap read_label_map(std::string_view bytes) {
    Header hdr = parse_header(bytes, 256, 65535);
    if (!hdr.binary) throw FormatError("pgm: label maps must be binary (P5)");
    LabelMap map(hdr.width, hdr.height);
    const std::size_t n = map.labels.size();
    Cursor& cur = hdr.cursor;
    if (cur.remaining() < 2 * n) {
        std::ostringstream msg;
        msg << "pgm: truncated raster, expected " << 2 * n << " bytes but only " << cur.remaining()
            << " remain at byte " << cur.pos();
        throw FormatError(msg.str());
    }
    const auto* src = reinterpret_cast<const unsigned char*>(cur.data_at_pos());
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t v =
            (static_cast<std::uint32_t>(src[2 * i]) << 8) | static_cast<std::uint32_t>(src[2 * i + 1]);
        if (v > hdr.maxval) {
            std::ostringstream msg;
            msg << "pgm: sample " << v << " exceeds maxval " << hdr.maxval << " at byte "
                << (cur.pos() + 2 * i);
            throw FormatError(msg.str());
        }
        map.labels[i] = v;
    }
    validate_label_map(map);
    return map;
}

std::string write_label_map(const LabelMap& map) {
    if (map.max_label() > 65535) throw ValidationError("label map has ids above 65535");
    std::ostringstream out;
    out << "P5\n" << map.width << ' ' << map.height << "\n65535\n";
    for (std::uint32_t v : map.labels) {
        out.put(static_cast<char>((v >> 8) & 0xFF));
        out.put(static_cast<char>(v & 0xFF));
    }
    return out.str();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw FormatError("read failed for " + path.string());
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out.good()) throw FormatError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

GrayImage load_pgm(const std::filesystem::path& path) {
    try {
        return read_pgm(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

LabelMap load_label_map(const std::filesystem::path& path) {
    try {
        return read_label_map(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_pgm(const std::filesystem::path& path, const GrayImage& img) {
    write_file_atomic(path, write_pgm(img));
}

void save_label_map(const std::filesystem::path& path, const LabelMap& map) {
    write_file_atomic(path, write_label_map(map));
}

}  // namespace crystalseg
