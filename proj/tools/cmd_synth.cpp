#include <cstdio>
#include <filesystem>
#include <iostream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "crystalseg/dataset_io.hpp"
#include "crystalseg/detect.hpp"
#include "crystalseg/pgm_io.hpp"
#include "crystalseg/synthgen.hpp"

namespace crystalseg::cli {

namespace fs = std::filesystem;

int run_synth(const SynthOptions& opt) {
    fs::create_directories(opt.out_dir);

    SceneSpec spec;
    spec.width = opt.width;
    spec.height = opt.height;
    spec.n_crystals = opt.crystals;
    spec.n_mimics = opt.mimics;
    spec.n_bubbles = opt.bubbles;
    spec.size_min = opt.size_min;
    spec.size_max = opt.size_max;
    spec.background_level = opt.background;
    spec.noise_sigma = opt.noise_sigma;
    spec.edge_darkness = opt.edge_darkness;
    spec.mimic_blur_sigma = opt.mimic_blur_sigma;

    Manifest manifest;
    manifest.command = "synth";
    manifest.config = {{"out", opt.out_dir},     {"count", opt.count},
                       {"seed", opt.seed},       {"width", spec.width},
                       {"height", spec.height},  {"crystals", spec.n_crystals},
                       {"mimics", spec.n_mimics}, {"bubbles", spec.n_bubbles},
                       {"size_min", spec.size_min}, {"size_max", spec.size_max},
                       {"background", spec.background_level},
                       {"noise_sigma", spec.noise_sigma},
                       {"edge_darkness", spec.edge_darkness},
                       {"mimic_blur_sigma", spec.mimic_blur_sigma}};

    StageTimer timer;
    for (int i = 0; i < opt.count; ++i) {
        spec.seed = opt.seed + static_cast<std::uint64_t>(i);
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%04d", i);

        Scene scene;
        {
            auto scope = timer.scope("generate");
            scene = generate(spec);
        }
        scene.truth.image_id = name;
        scene.boxes.image_id = name;
        {
            auto scope = timer.scope("write");
            save_pgm(fs::path(opt.out_dir) / (std::string(name) + ".pgm"), scene.image);
            write_instance_files(opt.out_dir, scene.truth, spec.width, spec.height);
            write_file_atomic(fs::path(opt.out_dir) / (std::string(name) + "_boxes.txt"),
                              serialize_detections(scene.boxes, spec.width, spec.height));
        }
        std::cout << name << ": " << scene.truth.instances.size() << " objects\n";
    }

    manifest.timing_s = timer.seconds();
    write_manifest(opt.out_dir, manifest);
    return kExitOk;
}

}  // namespace crystalseg::cli
