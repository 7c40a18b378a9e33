#pragma once

#include <filesystem>
#include <string_view>

#include "crystalseg/raster.hpp"

namespace crystalseg {

/// Measurable proxies for the crystal / hard-mimic criteria.
struct ObjectFeatures {
    double area = 0.0;                 // px^2
    bool touches_border = false;       // any mask pixel on the image border
    bool has_opening = false;          // binarized bbox shows a hole before infilling
    double sharp_edge_fraction = 0.0;  // boundary pixels with gradient >= tau_sharp
    double solidity = 0.0;             // area / convex hull area
    double polygon_residual = 0.0;     // max boundary deviation from simplified polygon, px
};

/// Thresholds of the rule engine. The numeric defaults are engineering
/// choices tuned on synthetic data; all of them are configurable.
struct RuleConfig {
    double tau_sharp = 24.0;    // gradient magnitude (intensity/px) for a "sharp" boundary pixel
    double f_all_faint = 0.2;   // below this sharp fraction the object is all-faint
    double f_partial = 0.8;     // below this sharp fraction an edge counts as partially faint
    double a_small = 30.0;      // px^2, "small item"
    double a_tiny = 12.0;       // px^2, "very small item"
    double s_min = 0.85;        // minimum solidity of a polygon-like shape
    double eps_poly = 1.5;      // px, polygon simplification tolerance
    double dark_fraction = 0.70;  // binarization fraction for the opening test
};

/// Which rule decided the object, in precedence order.
enum class Rule {
    none,              // crystal: no rule fired
    r1_all_faint,      // all edges faint
    r2_small_no_opening,
    r3_border_or_tiny,
    r4_non_polygon,
};

const char* to_string(Rule rule);

struct Classification {
    ObjectClass cls = ObjectClass::crystal;
    Rule fired = Rule::none;
};

/// Measure one object. The mask must be nonempty, 8-connected and lie
/// within the image; violations raise ValidationError.
///
/// Gradients use central differences with clamped sampling; the
/// boundary is the set of mask pixels with a background 4-neighbor;
/// the convex hull is built over boundary pixel corners; the opening
/// test binarizes the object's bounding box at dark_fraction, keeps
/// the largest component and asks whether hole filling changes it.
ObjectFeatures extract_features(const GrayImage& img, const BitMask& mask,
                                const RuleConfig& cfg = {});

/// Apply the rules in order R1..R4; the first match labels the object
/// a hard mimic, otherwise it is a crystal.
Classification classify(const ObjectFeatures& features, const RuleConfig& cfg);

/// Parse a key=value rules file ('#' comments allowed). Unknown keys
/// raise FormatError.
RuleConfig load_rule_config(const std::filesystem::path& path);
RuleConfig parse_rule_config(std::string_view text);

}  // namespace crystalseg
