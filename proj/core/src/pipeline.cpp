#include "crystalseg/pipeline.hpp"

#include <sstream>

#include "crystalseg/errors.hpp"
#include "crystalseg/pgm_io.hpp"

namespace crystalseg {

namespace {

GrayImage mask_to_image(const BitMask& mask) {
    GrayImage img(std::max(mask.width, 1), std::max(mask.height, 1));
    for (std::size_t i = 0; i < mask.bits.size(); ++i) img.data[i] = mask.bits[i] ? 255 : 0;
    return img;
}

void dump_stage(const PipelineConfig& cfg, const std::string& image_id, std::size_t det_idx,
                const char* stage, const BitMask& mask) {
    if (!cfg.stage_dump) return;
    std::ostringstream name;
    name << image_id << '_' << det_idx << '_' << stage << ".pgm";
    save_pgm(*cfg.stage_dump / name.str(), mask_to_image(mask));
}

}  // namespace

StageMasks segment_instance_stages(const GrayImage& img, const BBox& box,
                                   const PipelineConfig& cfg) {
    const BBox clamped = box.clamped(img.width, img.height);
    const GrayImage region = crop(img, box);  // raises on a fully-outside box

    StageMasks stages;
    stages.binarize = percentile_binarize(region, cfg.dark_fraction);
    stages.infill = fill_holes(stages.binarize, dual(cfg.fg_conn));
    stages.open = open(stages.infill, cfg.se);
    stages.largest = largest_component(stages.open, cfg.fg_conn);

    for (BitMask* m : {&stages.binarize, &stages.infill, &stages.open, &stages.largest}) {
        m->x0 = clamped.x0;
        m->y0 = clamped.y0;
    }
    return stages;
}

BitMask segment_instance(const GrayImage& img, const BBox& box, const PipelineConfig& cfg) {
    return segment_instance_stages(img, box, cfg).largest;
}

SegmentResult segment_image(const GrayImage& img, const DetectionSet& dets,
                            const PipelineConfig& cfg) {
    SegmentResult result;
    result.instances.image_id = dets.image_id;

    int next_id = 1;
    for (std::size_t det_idx = 0; det_idx < dets.detections.size(); ++det_idx) {
        const Detection& det = dets.detections[det_idx];
        const BBox clamped = det.box.clamped(img.width, img.height);

        if (det.cls != ObjectClass::crystal) {
            BitMask empty;
            empty.x0 = clamped.x0;
            empty.y0 = clamped.y0;
            result.instances.instances.push_back(
                Instance{next_id++, det.cls, std::move(empty), clamped, det.confidence});
            continue;
        }

        StageMasks stages;
        try {
            stages = segment_instance_stages(img, det.box, cfg);
        } catch (const ValidationError& e) {
            std::ostringstream msg;
            msg << dets.image_id << ": detection " << det_idx << " skipped: " << e.what();
            result.warnings.push_back(msg.str());
            continue;
        }
        dump_stage(cfg, dets.image_id, det_idx, "binarize", stages.binarize);
        dump_stage(cfg, dets.image_id, det_idx, "infill", stages.infill);
        dump_stage(cfg, dets.image_id, det_idx, "open", stages.open);
        dump_stage(cfg, dets.image_id, det_idx, "largest", stages.largest);

        if (stages.largest.area() == 0) {
            std::ostringstream msg;
            msg << dets.image_id << ": detection " << det_idx
                << " skipped: mask empty after opening";
            result.warnings.push_back(msg.str());
            continue;
        }
        result.instances.instances.push_back(
            Instance{next_id++, det.cls, std::move(stages.largest), clamped, det.confidence});
    }
    return result;
}

}  // namespace crystalseg
