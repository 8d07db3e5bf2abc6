#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paoi/errors.hpp"
#include "paoi/sim.hpp"
#include "paoi/system.hpp"

namespace paoi::cli {

inline constexpr int kConfigSchemaVersion = 1;

/// Config does not match the schema. The message starts with the JSON path
/// of the offending field.
class ValidationError : public Error {
public:
    using Error::Error;
};

enum class Mode { Exact, Bounds, Simulate, Compare, Advise };

std::optional<Mode> parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

struct Sweep {
    std::string parameter;  // e.g. "class[0].arrival_rate"
    std::vector<double> grid;
};

struct ExperimentConfig {
    std::vector<ClassSpec> classes;
    std::vector<sim::Discipline> disciplines;
    std::optional<Mode> mode;
    std::optional<Sweep> sweep;
    sim::SimConfig sim;
    std::string output;

    /// The system at a sweep value (or the base system without a sweep).
    SystemSpec system_at(std::optional<double> sweep_value) const;
};

ServiceDistribution parse_service(const nlohmann::json& j, const std::string& path);
nlohmann::json service_to_json(const ServiceDistribution& d);

/// Validates and converts a parsed JSON document. Throws ValidationError.
ExperimentConfig parse_config(const nlohmann::json& j);

/// Reads and parses a config file. Throws ValidationError on I/O or JSON
/// syntax errors as well.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Returns `classes` with the scalar at `parameter` replaced by `value`.
/// Throws ValidationError when the path does not resolve.
std::vector<ClassSpec> apply_parameter(std::vector<ClassSpec> classes, const std::string& parameter,
                                       double value);

}  // namespace paoi::cli
