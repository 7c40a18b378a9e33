#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crystalseg/pipeline.hpp"
#include "crystalseg/raster.hpp"

namespace crystalseg {

/// Per-image counts, covered areas (px^2) and mean crystal sizes (um)
/// for predictions and ground truth.
struct ImageStats {
    std::string image_id;
    int cnt_pred = 0;
    int cnt_gt = 0;
    double cov_pred = 0.0;
    double cov_gt = 0.0;
    double msize_pred = 0.0;
    double msize_gt = 0.0;
};

struct MatchPair {
    int pred_id = 0;
    int gt_id = 0;
    double iou = 0.0;
};

/// Output of greedy instance matching; every paired iou >= threshold
/// and each id appears at most once.
struct MatchResult {
    std::vector<MatchPair> pairs;
    std::vector<int> unmatched_pred;
    std::vector<int> unmatched_gt;
};

/// |A n B| / |A u B| in image coordinates; 0 when both masks are empty.
double mask_iou(const BitMask& a, const BitMask& b);

/// Rectangle IoU; 0 when both boxes are empty.
double box_iou(const BBox& a, const BBox& b);

/// Greedy matching over crystal-class instances: predictions in
/// confidence-descending order (ties: lower id first) each take the
/// unmatched ground-truth instance with maximal mask IoU >= thresh
/// (ties: lower gt id).
MatchResult match_instances(const InstanceSet& pred, const InstanceSet& gt, double thresh = 0.5);

/// Diameter of the circle with the mask's area: 2*sqrt(area/pi),
/// scaled to microns.
double equivalent_diameter_um(double area_px, double microns_per_pixel);

/// A skipped image together with the metric it was excluded from.
struct SkipRecord {
    std::string image_id;
    std::string metric;
    std::string reason;
};

/// Aggregated ratio metric; value is empty when every image was
/// excluded.
struct MetricValue {
    std::optional<double> value;
    std::vector<SkipRecord> skipped;
};

/// 1 - mean(|cnt_pred - cnt_gt| / cnt_gt) over images with cnt_gt > 0;
/// may go negative when the mean relative error exceeds 1.
MetricValue cnt_acc(std::span<const ImageStats> stats);

/// mean(|cov_pred - cov_gt| / cov_gt) over images with cov_gt > 0.
MetricValue cov_err(std::span<const ImageStats> stats);

/// mean(|msize_pred - msize_gt|) in microns over images with ground-
/// truth crystals.
MetricValue size_err(std::span<const ImageStats> stats);

/// One pooled prediction for PR-curve computation.
struct PooledPrediction {
    double confidence = 0.0;
    bool matched = false;
};

/// Area under the precision/recall curve using the monotone precision
/// envelope over all operating points. preds must already be sorted by
/// confidence descending. Empty when n_gt == 0.
std::optional<double> average_precision_50(std::span<const PooledPrediction> preds,
                                           std::int64_t n_gt);

/// Matched ground truth / total ground truth. Empty when n_gt == 0.
std::optional<double> recall_50(std::span<const PooledPrediction> preds, std::int64_t n_gt);

// Confusion matrix rows/columns: crystal, hard_mimic, air_bubble,
// background (in this order).
inline constexpr int kConfusionClasses = 4;
inline constexpr int kBackgroundIndex = 3;
using ConfusionCounts = std::array<std::array<std::int64_t, kConfusionClasses>, kConfusionClasses>;
using ConfusionMatrix = std::array<std::array<double, kConfusionClasses>, kConfusionClasses>;

/// Class-agnostic greedy box matching at the given IoU threshold;
/// matched pairs increment (true_class, pred_class), unmatched ground
/// truth lands in the background column, unmatched predictions in the
/// background row.
ConfusionCounts confusion_matrix(const InstanceSet& pred, const InstanceSet& gt,
                                 double thresh = 0.5);

/// Divide each row by its sum; all-zero rows stay zero.
ConfusionMatrix normalize_rows(const ConfusionCounts& counts);

/// Dataset-level quality report.
struct MetricsReport {
    std::optional<double> cnt_acc;
    std::optional<double> cov_err;   // ratio; serialized as percent
    std::optional<double> size_err;  // microns
    std::optional<double> map50;
    std::optional<double> recall50;
    std::optional<double> mean_matched_iou;
    ConfusionCounts confusion{};
    ConfusionMatrix confusion_normalized{};
    bool confusion_available = false;
    int n_images = 0;
    std::vector<SkipRecord> skipped;
    std::map<std::string, double> timing_s;

    /// True when some metric could not be computed (drives exit code 1).
    bool has_undefined() const;
};

struct EvaluationResult {
    MetricsReport report;
    std::vector<ImageStats> per_image;
};

/// Full mask-based evaluation. preds and gts must be aligned by index
/// (same image in both). Crystal statistics, matching, AP/recall and
/// the confusion matrix are computed per image and pooled over the
/// dataset in input order.
EvaluationResult evaluate_dataset(std::span<const InstanceSet> preds,
                                  std::span<const InstanceSet> gts,
                                  double microns_per_pixel = 1.0, double iou_thresh = 0.5);

/// Count-only evaluation (ground truth is a crystal count per image);
/// only cnt_acc is defined.
struct CountPair {
    std::string image_id;
    int cnt_pred = 0;
    int cnt_gt = 0;
};
EvaluationResult evaluate_counts(std::span<const CountPair> counts);

/// Per-image statistics of one pred/gt pair.
ImageStats compute_image_stats(const InstanceSet& pred, const InstanceSet& gt,
                               double microns_per_pixel);

/// Report JSON with the fixed key set (cnt_acc, cov_err_pct,
/// size_err_um, map50, recall50, mean_matched_iou, confusion,
/// confusion_normalized, skipped, timing_s, n_images); undefined
/// metrics serialize as null.
std::string report_to_json(const MetricsReport& report);

/// CSV: image_id,cnt_pred,cnt_gt,cov_pred,cov_gt,msize_pred,msize_gt
std::string per_image_csv(std::span<const ImageStats> stats);

}  // namespace crystalseg
