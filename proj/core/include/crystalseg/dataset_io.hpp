#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "crystalseg/pipeline.hpp"
#include "crystalseg/raster.hpp"

namespace crystalseg {

// On-disk instance datasets pair two files per image:
//   <image_id>_labels.pgm   16-bit label map of the instance masks
//   <image_id>_classes.csv  instance_id,label,class,confidence,x0,y0,w,h
// where `label` is the instance's id in the label map (0 when the
// instance carries no mask, e.g. carried-through bubbles). Count-only
// ground truth instead ships a single counts.csv (image_id,count).

/// Paint instance masks into a dense label map. Masked instances get
/// labels 1..M in instance order; overlap pixels keep the later
/// instance's label.
LabelMap render_label_map(const InstanceSet& set, int width, int height);

/// The label assigned to each instance by render_label_map (0 when the
/// instance has no mask).
std::vector<std::uint32_t> label_assignment(const InstanceSet& set);

std::string write_classes_csv(const InstanceSet& set);
/// Parse a classes CSV; masks are attached from the label map.
InstanceSet read_classes_csv(const std::string& text, const LabelMap& labels,
                             std::string image_id);

/// Write <image_id>_labels.pgm and <image_id>_classes.csv into dir.
void write_instance_files(const std::filesystem::path& dir, const InstanceSet& set, int width,
                          int height);

/// Load one image's instances back from dir.
InstanceSet load_instance_files(const std::filesystem::path& dir, const std::string& image_id);

/// Image ids present in a dataset directory (those with a _labels.pgm),
/// sorted.
std::vector<std::string> list_image_ids(const std::filesystem::path& dir);

/// counts.csv rows in file order.
std::vector<std::pair<std::string, int>> read_counts_csv(const std::filesystem::path& path);
std::string write_counts_csv(const std::vector<std::pair<std::string, int>>& counts);

/// Copy of the image with every instance mask's boundary burned at
/// intensity 0.
GrayImage render_overlay(const GrayImage& img, const InstanceSet& set);

}  // namespace crystalseg
