#include <filesystem>
#include <iostream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "crystalseg/dataset_io.hpp"
#include "crystalseg/detect.hpp"
#include "crystalseg/errors.hpp"
#include "crystalseg/pgm_io.hpp"

namespace crystalseg::cli {

namespace fs = std::filesystem;

PipelineConfig PipelineOptions::to_config() const {
    PipelineConfig cfg;
    if (!(dark_fraction > 0.0 && dark_fraction < 1.0)) {
        throw ValidationError("dark fraction must lie in (0,1)");
    }
    cfg.dark_fraction = dark_fraction;
    if (se_shape == "square") {
        cfg.se = StructuringElement::square(se_radius);
    } else if (se_shape == "disk") {
        cfg.se = StructuringElement::disk(se_radius);
    } else {
        throw ValidationError("se shape must be square or disk");
    }
    if (connectivity == "eight") {
        cfg.fg_conn = Connectivity::eight;
    } else if (connectivity == "four") {
        cfg.fg_conn = Connectivity::four;
    } else {
        throw ValidationError("connectivity must be four or eight");
    }
    if (!stage_dump.empty()) {
        fs::create_directories(stage_dump);
        cfg.stage_dump = fs::path(stage_dump);
    }
    return cfg;
}

int run_segment(const SegmentOptions& opt) {
    const PipelineConfig cfg = opt.pipeline.to_config();
    fs::create_directories(opt.out_dir);

    BaselineConfig baseline_cfg;
    baseline_cfg.dark_fraction = opt.baseline_dark_fraction;
    baseline_cfg.min_area = opt.baseline_min_area;
    baseline_cfg.max_area_fraction = opt.baseline_max_area_fraction;

    Manifest manifest;
    manifest.command = "segment";
    manifest.config = {{"dark_fraction", cfg.dark_fraction},
                       {"se_shape", opt.pipeline.se_shape},
                       {"se_radius", opt.pipeline.se_radius},
                       {"connectivity", opt.pipeline.connectivity},
                       {"baseline", opt.baseline},
                       {"overlay", opt.overlay},
                       {"out", opt.out_dir}};
    if (opt.baseline) {
        manifest.config["baseline_dark_fraction"] = baseline_cfg.dark_fraction;
        manifest.config["baseline_min_area"] = baseline_cfg.min_area;
        manifest.config["baseline_max_area_fraction"] = baseline_cfg.max_area_fraction;
    } else {
        manifest.config["detections"] = opt.detections_dir;
    }

    StageTimer timer;
    int failures = 0;
    for (const std::string& image_path : opt.images) {
        const std::string image_id = fs::path(image_path).stem().string();
        manifest.inputs.push_back(image_path);
        try {
            GrayImage img;
            {
                auto scope = timer.scope("read");
                img = load_pgm(image_path);
            }
            DetectionSet dets;
            {
                auto scope = timer.scope("detect");
                if (opt.baseline) {
                    dets = baseline_detect(img, baseline_cfg);
                    dets.image_id = image_id;
                } else {
                    const fs::path det_path = fs::path(opt.detections_dir) / (image_id + ".txt");
                    if (!fs::exists(det_path)) {
                        throw FormatError("missing detections file " + det_path.string());
                    }
                    dets = parse_detections(read_file(det_path), img.width, img.height, image_id);
                }
            }
            SegmentResult result;
            {
                auto scope = timer.scope("postprocess");
                result = segment_image(img, dets, cfg);
            }
            {
                auto scope = timer.scope("write");
                write_instance_files(opt.out_dir, result.instances, img.width, img.height);
                if (opt.overlay) {
                    save_pgm(fs::path(opt.out_dir) / (image_id + "_overlay.pgm"),
                             render_overlay(img, result.instances));
                }
            }
            for (const std::string& w : result.warnings) {
                manifest.warnings.push_back(w);
                std::cerr << "warning: " << w << "\n";
            }
        } catch (const Error& e) {
            ++failures;
            manifest.warnings.push_back(std::string("error: ") + e.what());
            std::cerr << "error: " << image_id << ": " << e.what() << "\n";
        }
    }

    manifest.timing_s = timer.seconds();
    write_manifest(opt.out_dir, manifest);
    return failures > 0 ? kExitInputError : kExitOk;
}

}  // namespace crystalseg::cli
