#pragma once

#include <cstdint>

#include "crystalseg/detect.hpp"
#include "crystalseg/pipeline.hpp"
#include "crystalseg/raster.hpp"

namespace crystalseg {

/// Parameters of a synthetic microscopy scene. Scenes are a pure
/// function of the spec: the same spec reproduces the same scene
/// bit-for-bit on every platform.
struct SceneSpec {
    int width = 256;
    int height = 256;
    int n_crystals = 0;
    int n_mimics = 0;
    int n_bubbles = 0;
    int size_min = 14;  // object diameter range, px
    int size_max = 40;
    int background_level = 200;
    double noise_sigma = 4.0;
    int edge_darkness = 120;  // intensity drop of crystal edges
    double mimic_blur_sigma = 4.0;
    std::uint64_t seed = 0;
};

/// A generated scene with exact ground truth: disjoint instance masks
/// with classes, and the tight bounding box of every mask as an oracle
/// detection at confidence 1.0.
struct Scene {
    GrayImage image;
    InstanceSet truth;
    DetectionSet boxes;
};

/// Generate a scene: crystals are convex polygons (4-8 vertices) with
/// dark 2 px edges and near-background interiors, hard mimics are
/// blurred blobs, air bubbles are dark-ringed circles. Objects are
/// placed by rejection sampling (at most 1000 attempts each; failure
/// raises GenerationError naming the object index), then integer-
/// quantized Gaussian noise is added. PRNG: xoshiro256** seeded via
/// splitmix64.
Scene generate(const SceneSpec& spec);

}  // namespace crystalseg
