#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "crystalseg/dataset_io.hpp"
#include "crystalseg/errors.hpp"
#include "crystalseg/metrics.hpp"
#include "crystalseg/pgm_io.hpp"

namespace crystalseg::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void id_mismatch(const std::vector<std::string>& pred_ids,
                              const std::vector<std::string>& gt_ids) {
    std::ostringstream msg;
    msg << "pred/gt image id sets differ;";
    for (const std::string& id : pred_ids) {
        if (!std::binary_search(gt_ids.begin(), gt_ids.end(), id)) msg << " only in pred: " << id;
    }
    for (const std::string& id : gt_ids) {
        if (!std::binary_search(pred_ids.begin(), pred_ids.end(), id)) msg << " only in gt: " << id;
    }
    throw ValidationError(msg.str());
}

int crystal_count(const InstanceSet& set) {
    int n = 0;
    for (const Instance& inst : set.instances) {
        if (inst.cls == ObjectClass::crystal && inst.mask.area() > 0) ++n;
    }
    return n;
}

}  // namespace

int run_evaluate(const EvaluateOptions& opt) {
    fs::create_directories(opt.out_dir);

    Manifest manifest;
    manifest.command = "evaluate";
    manifest.config = {{"pred", opt.pred_dir},
                       {"gt", opt.gt_dir},
                       {"out", opt.out_dir},
                       {"microns_per_pixel", opt.microns_per_pixel},
                       {"iou", opt.iou}};

    StageTimer timer;
    EvaluationResult result;
    const fs::path counts_path = fs::path(opt.gt_dir) / "counts.csv";
    const bool count_only = fs::exists(counts_path);

    if (count_only) {
        // Count-only ground truth: a counts.csv instead of label maps.
        auto scope = timer.scope("load");
        const auto gt_counts = read_counts_csv(counts_path);
        std::vector<std::string> pred_ids = list_image_ids(opt.pred_dir);
        std::sort(pred_ids.begin(), pred_ids.end());
        std::vector<std::string> gt_ids;
        for (const auto& [id, count] : gt_counts) gt_ids.push_back(id);
        std::sort(gt_ids.begin(), gt_ids.end());
        if (pred_ids != gt_ids) id_mismatch(pred_ids, gt_ids);

        std::vector<CountPair> pairs;
        for (const auto& [id, count] : gt_counts) {
            const InstanceSet pred = load_instance_files(opt.pred_dir, id);
            pairs.push_back(CountPair{id, crystal_count(pred), count});
            manifest.inputs.push_back(id);
        }
        result = evaluate_counts(pairs);
    } else {
        std::vector<std::string> pred_ids, gt_ids;
        std::vector<InstanceSet> preds, gts;
        {
            auto scope = timer.scope("load");
            pred_ids = list_image_ids(opt.pred_dir);
            gt_ids = list_image_ids(opt.gt_dir);
            if (pred_ids != gt_ids) id_mismatch(pred_ids, gt_ids);
            for (const std::string& id : pred_ids) {
                preds.push_back(load_instance_files(opt.pred_dir, id));
                gts.push_back(load_instance_files(opt.gt_dir, id));
                manifest.inputs.push_back(id);
            }
        }
        auto scope = timer.scope("compute");
        result = evaluate_dataset(preds, gts, opt.microns_per_pixel, opt.iou);
    }

    result.report.timing_s = timer.seconds();
    write_file_atomic(fs::path(opt.out_dir) / "report.json", report_to_json(result.report));
    write_file_atomic(fs::path(opt.out_dir) / "per_image.csv", per_image_csv(result.per_image));

    manifest.timing_s = timer.seconds();
    write_manifest(opt.out_dir, manifest);

    std::cout << report_to_json(result.report);
    return result.report.has_undefined() ? kExitUndefinedMetric : kExitOk;
}

}  // namespace crystalseg::cli
