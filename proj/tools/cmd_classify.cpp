#include <filesystem>
#include <iostream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "crystalseg/annotation.hpp"
#include "crystalseg/errors.hpp"
#include "crystalseg/pgm_io.hpp"

namespace crystalseg::cli {

namespace fs = std::filesystem;

int run_classify(const ClassifyOptions& opt) {
    fs::create_directories(opt.out_dir);

    const RuleConfig cfg =
        opt.rules_path.empty() ? RuleConfig{} : load_rule_config(opt.rules_path);
    const GrayImage img = load_pgm(opt.image_path);
    const LabelMap labels = load_label_map(opt.labels_path);
    if (labels.width != img.width || labels.height != img.height) {
        throw ValidationError("image and label map dimensions differ");
    }
    const std::string image_id = fs::path(opt.image_path).stem().string();

    Manifest manifest;
    manifest.command = "classify";
    manifest.inputs = {opt.image_path, opt.labels_path};
    manifest.config = {{"out", opt.out_dir},
                       {"rules", opt.rules_path},
                       {"tau_sharp", cfg.tau_sharp},
                       {"f_all_faint", cfg.f_all_faint},
                       {"f_partial", cfg.f_partial},
                       {"a_small", cfg.a_small},
                       {"a_tiny", cfg.a_tiny},
                       {"s_min", cfg.s_min},
                       {"eps_poly", cfg.eps_poly},
                       {"dark_fraction", cfg.dark_fraction}};

    StageTimer timer;
    std::string csv = "instance_id,class,rule_fired\n";
    {
        auto scope = timer.scope("classify");
        for (std::uint32_t id = 1; id <= labels.max_label(); ++id) {
            try {
                const ObjectFeatures f = extract_features(img, mask_of_label(labels, id), cfg);
                const Classification c = classify(f, cfg);
                csv += std::to_string(id);
                csv += ',';
                csv += to_string(c.cls);
                csv += ',';
                csv += to_string(c.fired);
                csv += '\n';
            } catch (const ValidationError& e) {
                const std::string w =
                    "instance " + std::to_string(id) + " skipped: " + e.what();
                manifest.warnings.push_back(w);
                std::cerr << "warning: " << w << "\n";
            }
        }
    }
    write_file_atomic(fs::path(opt.out_dir) / (image_id + "_rules.csv"), csv);

    manifest.timing_s = timer.seconds();
    write_manifest(opt.out_dir, manifest);
    std::cout << csv;
    return kExitOk;
}

}  // namespace crystalseg::cli
