#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "privcore/dataset.hpp"
#include "privcore/gradtrace.hpp"
#include "privcore/linear_model.hpp"
#include "privcore/privacy_select.hpp"
#include "privcore/taskmask.hpp"

namespace privcore {

// Insertion-ordered so every document has a stable field order.
using Json = nlohmann::ordered_json;

// All *_from_json functions throw kParse naming the missing or malformed field.

Json to_json(const LinearModel& model);
LinearModel linear_model_from_json(const Json& j);

Json to_json(const HierarchyConfig& config);
HierarchyConfig hierarchy_from_json(const Json& j);

Json to_json(const GeneratorManifest& manifest);
GeneratorManifest manifest_from_json(const Json& j);

Json to_json(const CoreSet& coreset);
CoreSet coreset_from_json(const Json& j);

Json to_json(const HideConfig& hide);
HideConfig hide_config_from_json(const Json& j);

Json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const Json& j);

// {task, epochs_recorded, config, per_example_avg_norm}
Json to_json(const GradientTrace& trace, const TrainConfig& config);
GradientTrace gradient_trace_from_json(const Json& j);

Json to_json(const TaskPairReport& report);
TaskPairReport task_pair_from_json(const Json& j);

Json to_json(const BucketResult& bucket);
BucketResult bucket_from_json(const Json& j);

Json parse_json(std::string_view text, std::string_view source = "<memory>");
Json read_json_file(const std::filesystem::path& path);
// Pretty-printed with a trailing newline, written atomically.
void write_json_file(const std::filesystem::path& path, const Json& j);
std::string dump_json(const Json& j);

// Two-column series "index,<value_name>".
std::string series_to_csv(std::string_view value_name, const std::vector<double>& values);
std::vector<double> series_from_csv(std::string_view text, std::string_view value_name,
                                    std::string_view source = "<memory>");

}  // namespace privcore
