#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace crystalseg::cli {

/// Wall-clock accumulator keyed by stage name.
class StageTimer {
public:
    class Scope {
    public:
        Scope(StageTimer& timer, std::string stage)
            : timer_(timer), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
        ~Scope() {
            const auto end = std::chrono::steady_clock::now();
            timer_.add(stage_, std::chrono::duration<double>(end - start_).count());
        }
        Scope(const Scope&) = delete;
        Scope& operator=(const Scope&) = delete;

    private:
        StageTimer& timer_;
        std::string stage_;
        std::chrono::steady_clock::time_point start_;
    };

    void add(const std::string& stage, double seconds) { seconds_[stage] += seconds; }
    Scope scope(std::string stage) { return Scope(*this, std::move(stage)); }
    const std::map<std::string, double>& seconds() const { return seconds_; }

private:
    std::map<std::string, double> seconds_;
};

/// Run manifest written next to every command's outputs. Timing fields
/// are the only non-reproducible content.
struct Manifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::string> inputs;
    std::map<std::string, double> timing_s;
    std::vector<std::string> warnings;
};

nlohmann::ordered_json manifest_json(const Manifest& manifest);
void write_manifest(const std::filesystem::path& out_dir, const Manifest& manifest);

/// Median and 95th percentile of a sample vector (sorted internally).
double median_of(std::vector<double> samples);
double p95_of(std::vector<double> samples);

}  // namespace crystalseg::cli
