#include "paoi/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace paoi::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError(path + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing required field");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

double positive(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (!(v > 0.0)) fail(path, "must be > 0");
    return v;
}

std::size_t count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto k : known) ok = ok || it.key() == k;
        if (!ok) fail(path + "." + it.key(), "unknown field");
    }
}

sim::SimConfig parse_sim(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown(j,
                   {"seed", "replications", "completions_per_replication", "warmup_completions",
                    "confidence_level", "max_queue_length", "threads"},
                   path);
    sim::SimConfig cfg;
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) fail(path + ".seed", "expected a non-negative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("replications")) cfg.replications = count(j["replications"], path + ".replications");
    if (j.contains("completions_per_replication"))
        cfg.completions_per_replication =
            count(j["completions_per_replication"], path + ".completions_per_replication");
    if (j.contains("warmup_completions"))
        cfg.warmup_completions = count(j["warmup_completions"], path + ".warmup_completions");
    if (j.contains("confidence_level"))
        cfg.confidence_level = number(j["confidence_level"], path + ".confidence_level");
    if (j.contains("max_queue_length"))
        cfg.max_queue_length = count(j["max_queue_length"], path + ".max_queue_length");
    if (j.contains("threads")) cfg.threads = static_cast<unsigned>(count(j["threads"], path + ".threads"));
    try {
        cfg.validate();
    } catch (const ParameterError& e) {
        throw ValidationError(e.what());
    }
    return cfg;
}

}  // namespace

std::optional<Mode> parse_mode(std::string_view name) {
    if (name == "exact") return Mode::Exact;
    if (name == "bounds") return Mode::Bounds;
    if (name == "simulate") return Mode::Simulate;
    if (name == "compare") return Mode::Compare;
    if (name == "advise") return Mode::Advise;
    return std::nullopt;
}

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::Exact:
            return "exact";
        case Mode::Bounds:
            return "bounds";
        case Mode::Simulate:
            return "simulate";
        case Mode::Compare:
            return "compare";
        case Mode::Advise:
            return "advise";
    }
    return "unknown";
}

ServiceDistribution parse_service(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const json& kind_j = field(j, "kind", path);
    if (!kind_j.is_string()) fail(path + ".kind", "expected a string");
    const std::string kind = kind_j.get<std::string>();
    try {
        if (kind == "exponential") {
            reject_unknown(j, {"kind", "rate"}, path);
            return ServiceDistribution::exponential(number(field(j, "rate", path), path + ".rate"));
        }
        if (kind == "deterministic") {
            reject_unknown(j, {"kind", "value"}, path);
            return ServiceDistribution::deterministic(number(field(j, "value", path), path + ".value"));
        }
        if (kind == "uniform") {
            reject_unknown(j, {"kind", "lower", "upper"}, path);
            return ServiceDistribution::uniform(number(field(j, "lower", path), path + ".lower"),
                                                number(field(j, "upper", path), path + ".upper"));
        }
        if (kind == "gamma") {
            reject_unknown(j, {"kind", "shape", "rate"}, path);
            return ServiceDistribution::gamma(number(field(j, "shape", path), path + ".shape"),
                                              number(field(j, "rate", path), path + ".rate"));
        }
    } catch (const ParameterError& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown distribution kind '" + kind + "'");
}

json service_to_json(const ServiceDistribution& d) {
    return std::visit(
        [](const auto& law) -> json {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>) return {{"kind", "exponential"}, {"rate", law.rate}};
            if constexpr (std::is_same_v<T, Deterministic>)
                return {{"kind", "deterministic"}, {"value", law.value}};
            if constexpr (std::is_same_v<T, Uniform>)
                return {{"kind", "uniform"}, {"lower", law.lower}, {"upper", law.upper}};
            if constexpr (std::is_same_v<T, Gamma>)
                return {{"kind", "gamma"}, {"shape", law.shape}, {"rate", law.rate}};
        },
        d.law());
}

std::vector<ClassSpec> apply_parameter(std::vector<ClassSpec> classes, const std::string& parameter,
                                       double value) {
    static const std::regex pattern(R"(^class\[(\d+)\]\.(arrival_rate|service\.(rate|value|lower|upper|shape))$)");
    std::smatch m;
    if (!std::regex_match(parameter, m, pattern))
        fail("sweep.parameter", "cannot resolve '" + parameter +
                                    "' (expected class[i].arrival_rate or class[i].service.<field>)");
    const std::size_t idx = std::stoul(m[1].str());
    if (idx >= classes.size()) fail("sweep.parameter", "class index " + m[1].str() + " out of range");
    if (!(std::isfinite(value) && value > 0.0)) fail("sweep.grid", "values must be > 0");

    ClassSpec& cls = classes[idx];
    if (m[2] == "arrival_rate") {
        cls.arrival_rate = value;
        return classes;
    }
    json svc = service_to_json(cls.service);
    const std::string key = m[3].str();
    if (!svc.contains(key))
        fail("sweep.parameter", "service of class[" + m[1].str() + "] has no field '" + key + "'");
    svc[key] = value;
    cls.service = parse_service(svc, "classes[" + m[1].str() + "].service");
    return classes;
}

SystemSpec ExperimentConfig::system_at(std::optional<double> sweep_value) const {
    if (sweep && sweep_value) return SystemSpec(apply_parameter(classes, sweep->parameter, *sweep_value));
    return SystemSpec(classes);
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) fail("$", "config must be a JSON object");
    reject_unknown(j, {"schema_version", "classes", "disciplines", "mode", "sweep", "sim", "output"}, "$");
    if (j.contains("schema_version")) {
        if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kConfigSchemaVersion)
            fail("$.schema_version", "unsupported schema version (expected 1)");
    }

    ExperimentConfig cfg;
    const json& classes = field(j, "classes", "$");
    if (!classes.is_array() || classes.empty()) fail("$.classes", "expected a nonempty array");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const std::string path = "$.classes[" + std::to_string(i) + "]";
        const json& c = classes[i];
        if (!c.is_object()) fail(path, "expected an object");
        reject_unknown(c, {"arrival_rate", "service"}, path);
        const double rate = positive(field(c, "arrival_rate", path), path + ".arrival_rate");
        cfg.classes.push_back({rate, parse_service(field(c, "service", path), path + ".service")});
    }

    if (j.contains("disciplines")) {
        const json& ds = j["disciplines"];
        if (!ds.is_array() || ds.empty()) fail("$.disciplines", "expected a nonempty array");
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const std::string path = "$.disciplines[" + std::to_string(i) + "]";
            if (!ds[i].is_string()) fail(path, "expected a string");
            auto d = sim::parse_discipline(ds[i].get<std::string>());
            if (!d) fail(path, "unknown discipline (buffer1_replace, fcfs, lcfs)");
            if (std::find(cfg.disciplines.begin(), cfg.disciplines.end(), *d) != cfg.disciplines.end())
                fail(path, "duplicate discipline");
            cfg.disciplines.push_back(*d);
        }
    }

    if (j.contains("mode")) {
        if (!j["mode"].is_string()) fail("$.mode", "expected a string");
        cfg.mode = parse_mode(j["mode"].get<std::string>());
        if (!cfg.mode) fail("$.mode", "unknown mode");
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        if (!s.is_object()) fail("$.sweep", "expected an object");
        reject_unknown(s, {"parameter", "grid"}, "$.sweep");
        const json& param = field(s, "parameter", "$.sweep");
        if (!param.is_string()) fail("$.sweep.parameter", "expected a string");
        const json& grid = field(s, "grid", "$.sweep");
        if (!grid.is_array() || grid.empty()) fail("$.sweep.grid", "must be a nonempty array");
        Sweep sweep{param.get<std::string>(), {}};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const std::string path = "$.sweep.grid[" + std::to_string(i) + "]";
            const double v = positive(grid[i], path);
            if (!sweep.grid.empty() && !(v > sweep.grid.back())) fail(path, "grid must be strictly increasing");
            sweep.grid.push_back(v);
        }
        for (double v : sweep.grid) (void)apply_parameter(cfg.classes, sweep.parameter, v);
        cfg.sweep = std::move(sweep);
    }

    if (j.contains("sim")) cfg.sim = parse_sim(j["sim"], "$.sim");

    if (j.contains("output")) {
        if (!j["output"].is_string()) fail("$.output", "expected a string");
        cfg.output = j["output"].get<std::string>();
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path.string() + ": cannot open config file");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": invalid JSON (" + e.what() + ")");
    }
    return parse_config(j);
}

}  // namespace paoi::cli
