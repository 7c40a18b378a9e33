#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "crystalseg/errors.hpp"
#include "crystalseg/version.hpp"

namespace cli = crystalseg::cli;

namespace {

void add_pipeline_flags(CLI::App& cmd, cli::PipelineOptions& opt) {
    cmd.add_option("--dark-fraction", opt.dark_fraction,
                   "fraction of darkest pixels binarized per box")
        ->capture_default_str();
    cmd.add_option("--se-shape", opt.se_shape, "structuring element shape (square|disk)")
        ->capture_default_str();
    cmd.add_option("--se-radius", opt.se_radius, "structuring element radius in px")
        ->capture_default_str();
    cmd.add_option("--connectivity", opt.connectivity, "foreground connectivity (four|eight)")
        ->capture_default_str();
    cmd.add_option("--stage-dump", opt.stage_dump, "directory for per-stage debug masks");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Instance segmentation and quality-control metrics for microscopic "
                 "food-crystal images"};
    app.set_version_flag("--version", std::string("crystalseg ") + crystalseg::kVersion);
    app.set_config("--config", "", "key=value config file, overridden by flags");
    app.require_subcommand(1);

    cli::SegmentOptions seg;
    CLI::App* segment = app.add_subcommand("segment", "segment detections into instance masks");
    segment->add_option("images", seg.images, "input PGM images")->required()->expected(-1);
    auto* det_opt = segment->add_option("--detections", seg.detections_dir,
                                        "directory with <image_id>.txt detection files");
    auto* baseline_flag =
        segment->add_flag("--baseline", seg.baseline, "use the built-in blob detector");
    det_opt->excludes(baseline_flag);
    segment->add_option("--out", seg.out_dir, "output directory")->required();
    segment->add_flag("--overlay", seg.overlay, "also write boundary overlay images");
    segment->add_option("--baseline-dark-fraction", seg.baseline_dark_fraction,
                        "baseline detector binarization fraction")
        ->capture_default_str();
    segment->add_option("--baseline-min-area", seg.baseline_min_area,
                        "baseline detector minimum component area")
        ->capture_default_str();
    segment->add_option("--baseline-max-area-frac", seg.baseline_max_area_fraction,
                        "baseline detector maximum component area as image fraction")
        ->capture_default_str();
    add_pipeline_flags(*segment, seg.pipeline);

    cli::EvaluateOptions eval;
    CLI::App* evaluate = app.add_subcommand("evaluate", "compare predictions against ground truth");
    evaluate->add_option("--pred", eval.pred_dir, "prediction dataset directory")->required();
    evaluate->add_option("--gt", eval.gt_dir,
                         "ground-truth dataset directory (label maps, or counts.csv)")
        ->required();
    evaluate->add_option("--out", eval.out_dir, "output directory")->required();
    evaluate->add_option("--microns-per-pixel", eval.microns_per_pixel, "pixel pitch in microns")
        ->capture_default_str();
    evaluate->add_option("--iou", eval.iou, "IoU match threshold")->capture_default_str();

    cli::SynthOptions synth;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate synthetic scenes with ground truth");
    synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();
    synth_cmd->add_option("--count", synth.count, "number of scenes")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "base seed (scene i uses seed+i)")
        ->capture_default_str();
    synth_cmd->add_option("--width", synth.width, "scene width")->capture_default_str();
    synth_cmd->add_option("--height", synth.height, "scene height")->capture_default_str();
    synth_cmd->add_option("--crystals", synth.crystals, "crystals per scene")->capture_default_str();
    synth_cmd->add_option("--mimics", synth.mimics, "hard mimics per scene")->capture_default_str();
    synth_cmd->add_option("--bubbles", synth.bubbles, "air bubbles per scene")
        ->capture_default_str();
    synth_cmd->add_option("--size-min", synth.size_min, "min object diameter px")
        ->capture_default_str();
    synth_cmd->add_option("--size-max", synth.size_max, "max object diameter px")
        ->capture_default_str();
    synth_cmd->add_option("--background", synth.background, "background intensity")
        ->capture_default_str();
    synth_cmd->add_option("--noise-sigma", synth.noise_sigma, "noise standard deviation")
        ->capture_default_str();
    synth_cmd->add_option("--edge-darkness", synth.edge_darkness, "crystal edge intensity drop")
        ->capture_default_str();
    synth_cmd->add_option("--mimic-blur-sigma", synth.mimic_blur_sigma, "mimic blur sigma px")
        ->capture_default_str();

    cli::ClassifyOptions cls;
    CLI::App* classify = app.add_subcommand("classify", "apply the crystal / hard-mimic rules");
    classify->add_option("image", cls.image_path, "PGM image")->required();
    classify->add_option("labels", cls.labels_path, "16-bit instance label map")->required();
    classify->add_option("--rules", cls.rules_path, "key=value rules config file");
    classify->add_option("--out", cls.out_dir, "output directory")->required();

    cli::BenchOptions bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "time the post-processing stage");
    bench_cmd->add_option("--width", bench.width, "scene width")->capture_default_str();
    bench_cmd->add_option("--height", bench.height, "scene height")->capture_default_str();
    bench_cmd->add_option("--boxes", bench.boxes, "number of crystal boxes")->capture_default_str();
    bench_cmd->add_option("--repeat", bench.repeat, "number of timed runs")->capture_default_str();
    bench_cmd->add_option("--size-min", bench.size_min, "min crystal diameter px")
        ->capture_default_str();
    bench_cmd->add_option("--size-max", bench.size_max, "max crystal diameter px")
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "scene seed")->capture_default_str();
    bench_cmd->add_option("--budget", bench.budget_s, "wall-clock ceiling to compare against, s")
        ->capture_default_str();
    bench_cmd->add_option("--out", bench.out_dir, "optional output directory for bench.json");
    add_pipeline_flags(*bench_cmd, bench.pipeline);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kExitOk : cli::kExitInputError;
    }

    try {
        if (app.got_subcommand(segment)) {
            if (!seg.baseline && seg.detections_dir.empty()) {
                std::cerr << "error: segment needs --detections or --baseline\n";
                return cli::kExitInputError;
            }
            return cli::run_segment(seg);
        }
        if (app.got_subcommand(evaluate)) return cli::run_evaluate(eval);
        if (app.got_subcommand(synth_cmd)) return cli::run_synth(synth);
        if (app.got_subcommand(classify)) return cli::run_classify(cls);
        if (app.got_subcommand(bench_cmd)) return cli::run_bench(bench);
    } catch (const crystalseg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitInputError;
    }
    return cli::kExitOk;
}
