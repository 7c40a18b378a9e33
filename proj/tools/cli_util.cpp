#include "cli_util.hpp"

#include <algorithm>
#include <cmath>

#include "crystalseg/pgm_io.hpp"
#include "crystalseg/version.hpp"

namespace crystalseg::cli {

nlohmann::ordered_json manifest_json(const Manifest& manifest) {
    nlohmann::ordered_json j;
    j["tool"] = "crystalseg";
    j["version"] = kVersion;
    j["command"] = manifest.command;
    j["config"] = manifest.config;
    j["inputs"] = manifest.inputs;
    j["timing_s"] = manifest.timing_s;
    j["warnings"] = manifest.warnings;
    return j;
}

void write_manifest(const std::filesystem::path& out_dir, const Manifest& manifest) {
    write_file_atomic(out_dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
}

double median_of(std::vector<double> samples) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    if (n % 2 == 1) return samples[n / 2];
    return (samples[n / 2 - 1] + samples[n / 2]) / 2.0;
}

double p95_of(std::vector<double> samples) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const auto idx = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(samples.size()))) - 1;
    return samples[std::min(idx, samples.size() - 1)];
}

}  // namespace crystalseg::cli
