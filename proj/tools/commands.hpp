#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crystalseg/pipeline.hpp"
#include "crystalseg/synthgen.hpp"

namespace crystalseg::cli {

// Exit codes shared by every command: 0 success, 1 at least one metric
// undefined (nothing else wrong), 2 input errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUndefinedMetric = 1;
inline constexpr int kExitInputError = 2;

struct PipelineOptions {
    double dark_fraction = 0.70;
    std::string se_shape = "square";
    int se_radius = 1;
    std::string connectivity = "eight";
    std::string stage_dump;  // empty = disabled

    PipelineConfig to_config() const;
};

struct SegmentOptions {
    std::vector<std::string> images;
    std::string detections_dir;  // <image_id>.txt per image
    bool baseline = false;
    double baseline_dark_fraction = 0.3;
    std::int64_t baseline_min_area = 20;
    double baseline_max_area_fraction = 0.25;
    std::string out_dir;
    bool overlay = false;
    PipelineOptions pipeline;
};
int run_segment(const SegmentOptions& opt);

struct EvaluateOptions {
    std::string pred_dir;
    std::string gt_dir;
    std::string out_dir;
    double microns_per_pixel = 1.0;
    double iou = 0.5;
};
int run_evaluate(const EvaluateOptions& opt);

struct SynthOptions {
    std::string out_dir;
    int count = 1;
    std::uint64_t seed = 0;
    int width = 256;
    int height = 256;
    int crystals = 6;
    int mimics = 2;
    int bubbles = 2;
    int size_min = 14;
    int size_max = 40;
    int background = 200;
    double noise_sigma = 4.0;
    int edge_darkness = 120;
    double mimic_blur_sigma = 4.0;
};
int run_synth(const SynthOptions& opt);

struct ClassifyOptions {
    std::string image_path;
    std::string labels_path;
    std::string rules_path;  // empty = defaults
    std::string out_dir;
};
int run_classify(const ClassifyOptions& opt);

struct BenchOptions {
    int width = 2048;
    int height = 1536;
    int boxes = 150;
    int repeat = 5;
    int size_min = 40;
    int size_max = 120;
    std::uint64_t seed = 0;
    double budget_s = 1.82;  // reference wall-clock ceiling to compare against
    std::string out_dir;     // empty = print only
    PipelineOptions pipeline;
};
int run_bench(const BenchOptions& opt);

}  // namespace crystalseg::cli
