#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crystalseg/detect.hpp"
#include "crystalseg/morphology.hpp"
#include "crystalseg/raster.hpp"

namespace crystalseg {

/// Knobs for the per-box segmentation stages. Hole filling uses the
/// dual of fg_conn for the background.
struct PipelineConfig {
    double dark_fraction = 0.70;
    StructuringElement se = StructuringElement::square(1);
    Connectivity fg_conn = Connectivity::eight;
    /// When set, per-stage masks are written here as
    /// <image_id>_<det_idx>_<stage>.pgm (stages: binarize, infill,
    /// open, largest).
    std::optional<std::filesystem::path> stage_dump;
};

/// One segmented (or carried-through) detection.
struct Instance {
    int id = 0;  // 1-based, in detection order
    ObjectClass cls = ObjectClass::crystal;
    BitMask mask;  // empty for non-crystal instances
    BBox box;      // clamped detection box
    double confidence = 1.0;

    bool operator==(const Instance&) const = default;
};

/// Labeled instances of one image, either predictions or ground truth.
struct InstanceSet {
    std::string image_id;
    std::vector<Instance> instances;

    bool operator==(const InstanceSet&) const = default;
};

/// Intermediate masks of the four post-crop stages, origin already
/// placed at the clamped box's top-left.
struct StageMasks {
    BitMask binarize;
    BitMask infill;
    BitMask open;
    BitMask largest;
};

StageMasks segment_instance_stages(const GrayImage& img, const BBox& box,
                                   const PipelineConfig& cfg);

/// Crop the box, binarize the darkest fraction, fill holes, open, and
/// keep the largest connected component. The returned mask's origin is
/// the clamped box's top-left; it may be empty when opening removes
/// everything. A box fully outside the image raises ValidationError.
BitMask segment_instance(const GrayImage& img, const BBox& box, const PipelineConfig& cfg);

struct SegmentResult {
    InstanceSet instances;
    std::vector<std::string> warnings;
};

/// Segment every crystal-class detection; hard mimic and air bubble
/// detections are carried through with empty masks so that confusion
/// analysis still sees them. Crystal detections whose mask comes out
/// empty are skipped with a warning. Instance ids run 1..K in
/// detection order over the emitted instances.
SegmentResult segment_image(const GrayImage& img, const DetectionSet& dets,
                            const PipelineConfig& cfg);

}  // namespace crystalseg
