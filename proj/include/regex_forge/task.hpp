#ifndef REGEX_FORGE_TASK_HPP
#define REGEX_FORGE_TASK_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace regex_forge {

enum class TaskSource : std::uint8_t { Oss, RegexLib };

constexpr std::string_view task_source_name(TaskSource s) { return s == TaskSource::Oss ? "oss" : "regexlib"; }

inline std::optional<TaskSource> parse_task_source(std::string_view s) {
    if (s == "oss") return TaskSource::Oss;
    if (s == "regexlib") return TaskSource::RegexLib;
    return std::nullopt;
}

/// A ground-truth regex with the example strings it was observed on.
struct CompositionTask {
    std::string id;
    std::string ground_truth;
    std::vector<std::string> positives;
    std::vector<std::string> negatives;
    TaskSource source = TaskSource::Oss;

    std::size_t test_count() const { return positives.size() + negatives.size(); }
    double positive_ratio() const {
        return test_count() == 0 ? 0.0 : static_cast<double>(positives.size()) / static_cast<double>(test_count());
    }
};

}  // namespace regex_forge

#endif  // REGEX_FORGE_TASK_HPP
