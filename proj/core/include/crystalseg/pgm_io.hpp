#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "crystalseg/raster.hpp"

namespace crystalseg {

// PGM is the only image format this toolkit reads or writes:
// maxval-255 P2/P5 for grayscale images, maxval-65535 P5 (big-endian
// samples) for instance label maps. Writers are bit-exact so that
// repeated runs produce identical files.

/// Parse a P5 (binary) or P2 (ASCII) PGM with maxval <= 255.
/// FormatError messages name the offending byte offset.
GrayImage read_pgm(std::string_view bytes);

/// Serialize as P5, header "P5\n<w> <h>\n255\n". read_pgm(write_pgm(img))
/// reproduces img bit-exactly.
std::string write_pgm(const GrayImage& img);

/// Parse a 16-bit P5 PGM (256 <= maxval <= 65535, two bytes per sample,
/// big-endian) holding instance ids. The id set must be contiguous
/// {0..K}; missing ids raise ValidationError.
LabelMap read_label_map(std::string_view bytes);

/// Serialize as 16-bit P5 with maxval 65535. Labels above 65535 raise
/// ValidationError.
std::string write_label_map(const LabelMap& map);

GrayImage load_pgm(const std::filesystem::path& path);
LabelMap load_label_map(const std::filesystem::path& path);

/// Read a whole file into memory; FormatError when unreadable.
std::string read_file(const std::filesystem::path& path);

/// Write via a temporary file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

void save_pgm(const std::filesystem::path& path, const GrayImage& img);
void save_label_map(const std::filesystem::path& path, const LabelMap& map);

}  // namespace crystalseg
