#include "crystalseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <nlohmann/json.hpp>

#include "crystalseg/errors.hpp"

namespace crystalseg {

namespace {

using json = nlohmann::ordered_json;

json optional_to_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

// Indices of crystal-class instances, confidence descending with the
// lower instance id winning ties.
std::vector<std::size_t> crystal_indices_by_confidence(const InstanceSet& set) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < set.instances.size(); ++i) {
        if (set.instances[i].cls == ObjectClass::crystal) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const Instance& ia = set.instances[a];
        const Instance& ib = set.instances[b];
        if (ia.confidence != ib.confidence) return ia.confidence > ib.confidence;
        return ia.id < ib.id;
    });
    return idx;
}

std::vector<std::size_t> all_indices_by_confidence(const InstanceSet& set) {
    std::vector<std::size_t> idx(set.instances.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const Instance& ia = set.instances[a];
        const Instance& ib = set.instances[b];
        if (ia.confidence != ib.confidence) return ia.confidence > ib.confidence;
        return ia.id < ib.id;
    });
    return idx;
}

}  // namespace

double mask_iou(const BitMask& a, const BitMask& b) {
    const std::int64_t area_a = a.area();
    const std::int64_t area_b = b.area();
    if (area_a == 0 && area_b == 0) return 0.0;

    const int ix0 = std::max(a.x0, b.x0);
    const int iy0 = std::max(a.y0, b.y0);
    const int ix1 = std::min(a.x0 + a.width, b.x0 + b.width);
    const int iy1 = std::min(a.y0 + a.height, b.y0 + b.height);

    std::int64_t inter = 0;
    for (int y = iy0; y < iy1; ++y) {
        for (int x = ix0; x < ix1; ++x) {
            if (a.get(x - a.x0, y - a.y0) && b.get(x - b.x0, y - b.y0)) ++inter;
        }
    }
    return static_cast<double>(inter) / static_cast<double>(area_a + area_b - inter);
}

double box_iou(const BBox& a, const BBox& b) {
    if (a.empty() && b.empty()) return 0.0;
    const int ix0 = std::max(a.x0, b.x0);
    const int iy0 = std::max(a.y0, b.y0);
    const int ix1 = std::min(a.x0 + a.w, b.x0 + b.w);
    const int iy1 = std::min(a.y0 + a.h, b.y0 + b.h);
    const std::int64_t iw = std::max(0, ix1 - ix0);
    const std::int64_t ih = std::max(0, iy1 - iy0);
    const std::int64_t inter = iw * ih;
    return static_cast<double>(inter) / static_cast<double>(a.area() + b.area() - inter);
}

MatchResult match_instances(const InstanceSet& pred, const InstanceSet& gt, double thresh) {
    const auto pred_order = crystal_indices_by_confidence(pred);
    std::vector<std::size_t> gt_crystals;
    for (std::size_t i = 0; i < gt.instances.size(); ++i) {
        if (gt.instances[i].cls == ObjectClass::crystal) gt_crystals.push_back(i);
    }

    MatchResult result;
    std::vector<bool> gt_taken(gt_crystals.size(), false);
    for (std::size_t pi : pred_order) {
        double best_iou = 0.0;
        std::size_t best_g = gt_crystals.size();
        for (std::size_t g = 0; g < gt_crystals.size(); ++g) {
            if (gt_taken[g]) continue;
            const double iou = mask_iou(pred.instances[pi].mask, gt.instances[gt_crystals[g]].mask);
            if (iou >= thresh && iou > best_iou) {
                best_iou = iou;
                best_g = g;
            }
        }
        if (best_g == gt_crystals.size()) {
            result.unmatched_pred.push_back(pred.instances[pi].id);
        } else {
            gt_taken[best_g] = true;
            result.pairs.push_back(
                MatchPair{pred.instances[pi].id, gt.instances[gt_crystals[best_g]].id, best_iou});
        }
    }
    for (std::size_t g = 0; g < gt_crystals.size(); ++g) {
        if (!gt_taken[g]) result.unmatched_gt.push_back(gt.instances[gt_crystals[g]].id);
    }
    return result;
}

double equivalent_diameter_um(double area_px, double microns_per_pixel) {
    return 2.0 * std::sqrt(area_px / std::numbers::pi) * microns_per_pixel;
}

namespace {

MetricValue mean_over_included(std::span<const ImageStats> stats, const char* metric,
                               const char* reason, bool (*include)(const ImageStats&),
                               double (*term)(const ImageStats&)) {
    MetricValue out;
    double sum = 0.0;
    std::int64_t n = 0;
    for (const ImageStats& s : stats) {
        if (!include(s)) {
            out.skipped.push_back(SkipRecord{s.image_id, metric, reason});
            continue;
        }
        sum += term(s);
        ++n;
    }
    if (n > 0) out.value = sum / static_cast<double>(n);
    return out;
}

}  // namespace

MetricValue cnt_acc(std::span<const ImageStats> stats) {
    MetricValue out = mean_over_included(
        stats, "cnt_acc", "cnt_gt = 0",
        [](const ImageStats& s) { return s.cnt_gt > 0; },
        [](const ImageStats& s) {
            return std::abs(static_cast<double>(s.cnt_pred - s.cnt_gt)) / s.cnt_gt;
        });
    if (out.value) out.value = 1.0 - *out.value;
    return out;
}

MetricValue cov_err(std::span<const ImageStats> stats) {
    return mean_over_included(
        stats, "cov_err", "cov_gt = 0",
        [](const ImageStats& s) { return s.cov_gt > 0; },
        [](const ImageStats& s) { return std::abs(s.cov_pred - s.cov_gt) / s.cov_gt; });
}

MetricValue size_err(std::span<const ImageStats> stats) {
    return mean_over_included(
        stats, "size_err", "no ground-truth crystals",
        [](const ImageStats& s) { return s.cnt_gt > 0; },
        [](const ImageStats& s) { return std::abs(s.msize_pred - s.msize_gt); });
}

std::optional<double> average_precision_50(std::span<const PooledPrediction> preds,
                                           std::int64_t n_gt) {
    if (n_gt == 0) return std::nullopt;
    const std::size_t n = preds.size();
    if (n == 0) return 0.0;

    std::vector<double> precision(n), recall(n);
    std::int64_t tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (preds[i].matched) ++tp;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
    }
    // Monotone envelope: precision at recall r is the best precision at
    // any recall >= r.
    for (std::size_t i = n - 1; i-- > 0;) {
        precision[i] = std::max(precision[i], precision[i + 1]);
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (recall[i] > prev_recall) {
            ap += (recall[i] - prev_recall) * precision[i];
            prev_recall = recall[i];
        }
    }
    return ap;
}

std::optional<double> recall_50(std::span<const PooledPrediction> preds, std::int64_t n_gt) {
    if (n_gt == 0) return std::nullopt;
    std::int64_t tp = 0;
    for (const PooledPrediction& p : preds) tp += p.matched ? 1 : 0;
    return static_cast<double>(tp) / static_cast<double>(n_gt);
}

ConfusionCounts confusion_matrix(const InstanceSet& pred, const InstanceSet& gt,
                                 double thresh) {
    ConfusionCounts counts{};
    const auto pred_order = all_indices_by_confidence(pred);

    std::vector<bool> gt_taken(gt.instances.size(), false);
    for (std::size_t pi : pred_order) {
        double best_iou = 0.0;
        std::size_t best_g = gt.instances.size();
        for (std::size_t g = 0; g < gt.instances.size(); ++g) {
            if (gt_taken[g]) continue;
            const double iou = box_iou(pred.instances[pi].box, gt.instances[g].box);
            if (iou >= thresh && iou > best_iou) {
                best_iou = iou;
                best_g = g;
            }
        }
        const int pred_cls = static_cast<int>(pred.instances[pi].cls);
        if (best_g == gt.instances.size()) {
            ++counts[kBackgroundIndex][pred_cls];
        } else {
            gt_taken[best_g] = true;
            ++counts[static_cast<int>(gt.instances[best_g].cls)][pred_cls];
        }
    }
    for (std::size_t g = 0; g < gt.instances.size(); ++g) {
        if (!gt_taken[g]) ++counts[static_cast<int>(gt.instances[g].cls)][kBackgroundIndex];
    }
    return counts;
}

ConfusionMatrix normalize_rows(const ConfusionCounts& counts) {
    ConfusionMatrix out{};
    for (int r = 0; r < kConfusionClasses; ++r) {
        std::int64_t sum = 0;
        for (int c = 0; c < kConfusionClasses; ++c) sum += counts[r][c];
        if (sum == 0) continue;
        for (int c = 0; c < kConfusionClasses; ++c) {
            out[r][c] = static_cast<double>(counts[r][c]) / static_cast<double>(sum);
        }
    }
    return out;
}

ImageStats compute_image_stats(const InstanceSet& pred, const InstanceSet& gt,
                               double microns_per_pixel) {
    ImageStats stats;
    stats.image_id = gt.image_id.empty() ? pred.image_id : gt.image_id;

    double size_sum_pred = 0.0, size_sum_gt = 0.0;
    for (const Instance& inst : pred.instances) {
        if (inst.cls != ObjectClass::crystal) continue;
        const auto area = static_cast<double>(inst.mask.area());
        ++stats.cnt_pred;
        stats.cov_pred += area;
        size_sum_pred += equivalent_diameter_um(area, microns_per_pixel);
    }
    for (const Instance& inst : gt.instances) {
        if (inst.cls != ObjectClass::crystal) continue;
        const auto area = static_cast<double>(inst.mask.area());
        ++stats.cnt_gt;
        stats.cov_gt += area;
        size_sum_gt += equivalent_diameter_um(area, microns_per_pixel);
    }
    if (stats.cnt_pred > 0) stats.msize_pred = size_sum_pred / stats.cnt_pred;
    if (stats.cnt_gt > 0) stats.msize_gt = size_sum_gt / stats.cnt_gt;
    return stats;
}

bool MetricsReport::has_undefined() const {
    return !cnt_acc || !cov_err || !size_err || !map50 || !recall50 || !confusion_available;
}

EvaluationResult evaluate_dataset(std::span<const InstanceSet> preds,
                                  std::span<const InstanceSet> gts, double microns_per_pixel,
                                  double iou_thresh) {
    if (preds.size() != gts.size()) {
        throw ValidationError("evaluate_dataset: pred/gt image counts differ");
    }

    EvaluationResult result;
    result.report.n_images = static_cast<int>(preds.size());
    result.report.confusion_available = true;

    std::vector<PooledPrediction> pooled;
    std::int64_t total_gt = 0;
    double iou_sum = 0.0;
    std::int64_t iou_n = 0;

    for (std::size_t i = 0; i < preds.size(); ++i) {
        const InstanceSet& pred = preds[i];
        const InstanceSet& gt = gts[i];
        result.per_image.push_back(compute_image_stats(pred, gt, microns_per_pixel));

        const MatchResult match = match_instances(pred, gt, iou_thresh);
        std::vector<bool> matched_ids;
        {
            int max_id = 0;
            for (const Instance& inst : pred.instances) max_id = std::max(max_id, inst.id);
            matched_ids.assign(static_cast<std::size_t>(max_id) + 1, false);
            for (const MatchPair& p : match.pairs) matched_ids[p.pred_id] = true;
        }
        // Pool crystal predictions with their match flags in instance
        // order; the later stable sort keeps that order within equal
        // confidences, so AP is deterministic.
        for (const Instance& inst : pred.instances) {
            if (inst.cls != ObjectClass::crystal) continue;
            pooled.push_back(PooledPrediction{inst.confidence, matched_ids[inst.id]});
        }

        for (const MatchPair& p : match.pairs) {
            iou_sum += p.iou;
            ++iou_n;
        }
        total_gt += static_cast<std::int64_t>(match.pairs.size()) +
                    static_cast<std::int64_t>(match.unmatched_gt.size());

        const ConfusionCounts c = confusion_matrix(pred, gt, iou_thresh);
        for (int r = 0; r < kConfusionClasses; ++r) {
            for (int col = 0; col < kConfusionClasses; ++col) {
                result.report.confusion[r][col] += c[r][col];
            }
        }
    }

    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const PooledPrediction& a, const PooledPrediction& b) {
                         return a.confidence > b.confidence;
                     });

    MetricsReport& rep = result.report;
    auto take = [&rep](MetricValue v, std::optional<double>& slot) {
        slot = v.value;
        rep.skipped.insert(rep.skipped.end(), v.skipped.begin(), v.skipped.end());
    };
    take(cnt_acc(result.per_image), rep.cnt_acc);
    take(cov_err(result.per_image), rep.cov_err);
    take(size_err(result.per_image), rep.size_err);
    rep.map50 = average_precision_50(pooled, total_gt);
    rep.recall50 = recall_50(pooled, total_gt);
    if (iou_n > 0) rep.mean_matched_iou = iou_sum / static_cast<double>(iou_n);
    rep.confusion_normalized = normalize_rows(rep.confusion);
    return result;
}

EvaluationResult evaluate_counts(std::span<const CountPair> counts) {
    EvaluationResult result;
    result.report.n_images = static_cast<int>(counts.size());
    for (const CountPair& c : counts) {
        ImageStats s;
        s.image_id = c.image_id;
        s.cnt_pred = c.cnt_pred;
        s.cnt_gt = c.cnt_gt;
        result.per_image.push_back(std::move(s));
    }
    MetricValue acc = cnt_acc(result.per_image);
    result.report.cnt_acc = acc.value;
    result.report.skipped = std::move(acc.skipped);
    return result;
}

std::string report_to_json(const MetricsReport& report) {
    json j;
    j["cnt_acc"] = optional_to_json(report.cnt_acc);
    j["cov_err_pct"] = report.cov_err ? json(*report.cov_err * 100.0) : json(nullptr);
    j["size_err_um"] = optional_to_json(report.size_err);
    j["map50"] = optional_to_json(report.map50);
    j["recall50"] = optional_to_json(report.recall50);
    j["mean_matched_iou"] = optional_to_json(report.mean_matched_iou);
    if (report.confusion_available) {
        j["confusion"] = report.confusion;
        j["confusion_normalized"] = report.confusion_normalized;
    } else {
        j["confusion"] = nullptr;
        j["confusion_normalized"] = nullptr;
    }
    j["n_images"] = report.n_images;
    json skipped = json::array();
    for (const SkipRecord& s : report.skipped) {
        skipped.push_back({{"image_id", s.image_id}, {"metric", s.metric}, {"reason", s.reason}});
    }
    j["skipped"] = skipped;
    j["timing_s"] = report.timing_s;
    return j.dump(2) + "\n";
}

std::string per_image_csv(std::span<const ImageStats> stats) {
    std::string out = "image_id,cnt_pred,cnt_gt,cov_pred,cov_gt,msize_pred,msize_gt\n";
    char buf[256];
    for (const ImageStats& s : stats) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.1f,%.1f,%.6f,%.6f\n", s.image_id.c_str(),
                      s.cnt_pred, s.cnt_gt, s.cov_pred, s.cov_gt, s.msize_pred, s.msize_gt);
        out += buf;
    }
    return out;
}

}  // namespace crystalseg
