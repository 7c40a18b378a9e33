#include <benchmark/benchmark.h>

#include "crystalseg/pipeline.hpp"
#include "crystalseg/synthgen.hpp"

using namespace crystalseg;

namespace {

Scene bench_scene(int side, int crystals, int size_min, int size_max) {
    SceneSpec spec;
    spec.width = side;
    spec.height = side;
    spec.n_crystals = crystals;
    spec.size_min = size_min;
    spec.size_max = size_max;
    spec.seed = 7;
    return generate(spec);
}

void BM_SegmentInstance(benchmark::State& state) {
    const Scene scene = bench_scene(512, 1, static_cast<int>(state.range(0)),
                                    static_cast<int>(state.range(0)));
    const PipelineConfig cfg;
    const BBox box = scene.boxes.detections.at(0).box;
    for (auto _ : state) {
        benchmark::DoNotOptimize(segment_instance(scene.image, box, cfg));
    }
    state.SetItemsProcessed(state.iterations() * box.area());
}
BENCHMARK(BM_SegmentInstance)->Arg(24)->Arg(64)->Arg(120);

void BM_SegmentImage(benchmark::State& state) {
    const Scene scene =
        bench_scene(1024, static_cast<int>(state.range(0)), 20, 60);
    const PipelineConfig cfg;
    std::int64_t box_area = 0;
    for (const Detection& det : scene.boxes.detections) box_area += det.box.area();
    for (auto _ : state) {
        benchmark::DoNotOptimize(segment_image(scene.image, scene.boxes, cfg));
    }
    state.SetItemsProcessed(state.iterations() * box_area);
}
BENCHMARK(BM_SegmentImage)->Arg(10)->Arg(40)->Arg(80);

void BM_GenerateScene(benchmark::State& state) {
    SceneSpec spec;
    spec.n_crystals = 6;
    spec.n_mimics = 2;
    spec.n_bubbles = 2;
    for (auto _ : state) {
        spec.seed++;
        benchmark::DoNotOptimize(generate(spec));
    }
    state.SetItemsProcessed(state.iterations() * spec.width * spec.height);
}
BENCHMARK(BM_GenerateScene);

}  // namespace

BENCHMARK_MAIN();
