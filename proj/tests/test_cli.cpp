#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "paoi/cli/run.hpp"
#include "paoi/infinite.hpp"

using namespace paoi;
using namespace paoi::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_config() {
    return json::parse(R"({
        "schema_version": 1,
        "classes": [
            {"arrival_rate": 0.1, "service": {"kind": "exponential", "rate": 0.1}},
            {"arrival_rate": 0.1, "service": {"kind": "exponential", "rate": 0.1}}
        ],
        "disciplines": ["buffer1_replace"],
        "sweep": {"parameter": "class[0].arrival_rate", "grid": [0.05, 0.1]},
        "sim": {"seed": 3, "replications": 4, "completions_per_replication": 2000, "warmup_completions": 100}
    })");
}

std::string validation_message(const json& j) {
    try {
        parse_config(j);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

std::string csv_text(const std::vector<ResultRow>& rows, bool dominance) {
    std::ostringstream out;
    write_csv(out, rows, dominance);
    return out.str();
}

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "paoi_cli_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p) << content;
    return p;
}

int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "paoi");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return main_entry(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("valid config parses") {
    const auto cfg = parse_config(base_config());
    CHECK(cfg.classes.size() == 2);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->grid == std::vector<double>{0.05, 0.1});
    CHECK(cfg.sim.seed == 3);
    CHECK(cfg.system_at(0.05).arrival_rate(0) == 0.05);
    CHECK(cfg.system_at(std::nullopt).arrival_rate(0) == 0.1);
}

TEST_CASE("schema violations name the field") {
    auto j = base_config();
    j["sweep"]["grid"] = json::array();
    CHECK(validation_message(j).rfind("$.sweep.grid", 0) == 0);

    j = base_config();
    j["sweep"]["grid"] = {0.1, 0.1};
    CHECK(validation_message(j).rfind("$.sweep.grid[1]", 0) == 0);

    j = base_config();
    j["sweep"]["grid"] = {-0.1, 0.1};
    CHECK(validation_message(j).rfind("$.sweep.grid[0]", 0) == 0);

    j = base_config();
    j["sweep"]["parameter"] = "class[5].arrival_rate";
    CHECK(validation_message(j).find("sweep.parameter") != std::string::npos);

    j = base_config();
    j["sweep"]["parameter"] = "class[0].service.shape";
    CHECK(validation_message(j).find("no field 'shape'") != std::string::npos);

    j = base_config();
    j["classes"][1]["service"] = {{"kind", "uniform"}, {"lower", 3}, {"upper", 1}};
    CHECK(validation_message(j).rfind("$.classes[1].service", 0) == 0);

    j = base_config();
    j["classes"][0]["arrival_rate"] = 0;
    CHECK(validation_message(j).rfind("$.classes[0].arrival_rate", 0) == 0);

    j = base_config();
    j["classes"][0]["service"]["kind"] = "pareto";
    CHECK(validation_message(j).rfind("$.classes[0].service.kind", 0) == 0);

    j = base_config();
    j["colour"] = "blue";
    CHECK(validation_message(j).rfind("$.colour", 0) == 0);

    j = base_config();
    j.erase("classes");
    CHECK(validation_message(j).rfind("$.classes", 0) == 0);

    j = base_config();
    j["disciplines"] = {"buffer1_replace", "buffer1_replace"};
    CHECK(validation_message(j).rfind("$.disciplines[1]", 0) == 0);

    j = base_config();
    j["sim"]["replications"] = 1;
    CHECK_FALSE(validation_message(j).empty());

    j = base_config();
    j["schema_version"] = 2;
    CHECK(validation_message(j).rfind("$.schema_version", 0) == 0);
}

TEST_CASE("service parameters can be swept") {
    auto j = base_config();
    j["classes"][0]["service"] = {{"kind", "gamma"}, {"shape", 10}, {"rate", 1}};
    j["sweep"] = {{"parameter", "class[0].service.shape"}, {"grid", {2, 4}}};
    const auto cfg = parse_config(j);
    CHECK(cfg.system_at(4.0).mean_service(0) == 4.0);
}

TEST_CASE("exact mode rejects non-exponential buffer-one models") {
    auto j = base_config();
    j["classes"][0]["service"] = {{"kind", "gamma"}, {"shape", 10}, {"rate", 1}};
    j["classes"][1]["service"] = {{"kind", "gamma"}, {"shape", 10}, {"rate", 1}};
    const auto cfg = parse_config(j);
    try {
        run(cfg, Mode::Exact);
        FAIL("expected a capability error");
    } catch (const UnsupportedModelError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("bounds") != std::string::npos);
        CHECK(msg.find("simulate") != std::string::npos);
    }
    CHECK(run(cfg, Mode::Bounds).rows.size() == 4);

    j["classes"][1]["service"] = {{"kind", "uniform"}, {"lower", 0}, {"upper", 20}};
    try {
        run(parse_config(j), Mode::Bounds);
        FAIL("expected a capability error");
    } catch (const UnsupportedModelError& e) {
        CHECK(std::string(e.what()).find("simulate") != std::string::npos);
    }

    j["disciplines"] = {"lcfs"};
    CHECK_THROWS_AS(run(parse_config(j), Mode::Exact), UnsupportedModelError);
}

TEST_CASE("row layout and CSV columns") {
    auto j = base_config();
    j["disciplines"] = {"buffer1_replace", "fcfs"};
    for (auto& c : j["classes"]) c["service"]["rate"] = 1.0;
    const auto out = run(parse_config(j), Mode::Compare);
    // Per point: buffer1 exact+bound+sim, fcfs exact+sim, two classes each.
    CHECK(out.rows.size() == 2 * (3 + 2) * 2);
    const std::string text = csv_text(out.rows, true);
    const std::string header = text.substr(0, text.find('\n'));
    CHECK(header ==
          "sweep_param,sweep_value,discipline,class,method,paoi,ci_halfwidth,E_P,E_W,E_I,E_G,bound_minus_sim");
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) CHECK(std::count(line.begin(), line.end(), ',') == 11);
    for (const auto& r : out.rows) {
        CHECK(r.ci_halfwidth.has_value() == (r.method == Method::Sim));
        CHECK(r.components.has_value() == (r.method != Method::Sim));
        CHECK(r.bound_minus_sim.has_value() == (r.method == Method::Bound));
    }
    CHECK(csv_text(out.rows, false).substr(0, header.size() - 16) == header.substr(0, header.size() - 16));
}

TEST_CASE("runs are deterministic") {
    const auto cfg = parse_config(base_config());
    CHECK(csv_text(run(cfg, Mode::Compare).rows, true) == csv_text(run(cfg, Mode::Compare).rows, true));
}

TEST_CASE("numbers round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 2.75, 1e-300, 123456789.123}) CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(2.0) == "2");
}

TEST_CASE("advice examples") {
    auto j = json::parse(R"({
        "classes": [
            {"arrival_rate": 0.3, "service": {"kind": "exponential", "rate": 1}},
            {"arrival_rate": 0.1, "service": {"kind": "exponential", "rate": 1}}
        ],
        "disciplines": ["fcfs"]
    })");
    auto out = advise(parse_config(j));
    REQUIRE(out.rows.size() == 2);
    CHECK(out.rows[1].order == std::vector<std::size_t>{2, 1});
    CHECK(out.rows[1].average_paoi < out.rows[0].average_paoi);

    std::swap(j["classes"][0], j["classes"][1]);
    out = advise(parse_config(j));
    CHECK(out.rows[1].order == std::vector<std::size_t>{1, 2});
    CHECK(out.rows[1].average_paoi == out.rows[0].average_paoi);

    j["disciplines"] = {"lcfs"};
    CHECK_THROWS_AS(advise(parse_config(j)), UnsupportedModelError);
    j["disciplines"] = {"fcfs"};
    j["classes"][0]["arrival_rate"] = 0.95;
    CHECK_THROWS_AS(advise(parse_config(j)), StabilityError);
}

TEST_CASE("advice matches brute force for k=5") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.02, 0.18);
    json j;
    j["disciplines"] = {"fcfs"};
    for (int i = 0; i < 5; ++i)
        j["classes"].push_back({{"arrival_rate", u(gen)}, {"service", {{"kind", "uniform"}, {"lower", 0}, {"upper", 2 * u(gen) * 5}}}});
    const auto cfg = parse_config(j);
    const auto out = advise(cfg);
    const SystemSpec spec = cfg.system_at(std::nullopt);
    std::vector<std::size_t> perm(5);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = 1e300;
    do {
        best = std::min(best, infinite::fcfs_average_paoi(spec.reordered(perm)));
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(out.rows[1].average_paoi == doctest::Approx(best).epsilon(1e-13));
}

TEST_CASE("exit codes") {
    auto good = base_config();
    const auto good_path = temp_file("good.json", good.dump());
    const auto out_path = (fs::temp_directory_path() / "paoi_cli_test" / "out.csv").string();
    CHECK(invoke({"bounds", "--config", good_path.string(), "--out", out_path, "--quiet"}) == 0);
    CHECK(fs::file_size(out_path) > 0);

    auto bad = base_config();
    bad["sweep"]["grid"] = json::array();
    CHECK(invoke({"exact", "--config", temp_file("bad.json", bad.dump()).string(), "--out", out_path}) == 1);
    CHECK(invoke({"exact", "--config", temp_file("broken.json", "{not json").string(), "--out", out_path}) == 1);
    CHECK(invoke({"exact", "--config", "/nonexistent/config.json"}) == 1);
    CHECK(invoke({"frobnicate", "--config", good_path.string()}) == 1);

    auto gamma = base_config();
    gamma["classes"][0]["service"] = {{"kind", "gamma"}, {"shape", 2}, {"rate", 1}};
    CHECK(invoke({"exact", "--config", temp_file("gamma.json", gamma.dump()).string(), "--out", out_path}) == 2);

    auto unstable = base_config();
    unstable["disciplines"] = {"fcfs"};
    unstable["classes"][0]["service"]["rate"] = 0.01;
    CHECK(invoke({"exact", "--config", temp_file("unstable.json", unstable.dump()).string(), "--out", out_path}) == 3);

    auto mismatch = base_config();
    mismatch["mode"] = "simulate";
    CHECK(invoke({"exact", "--config", temp_file("mismatch.json", mismatch.dump()).string(), "--out", out_path}) == 1);
}

TEST_CASE("shipped configs validate") {
    int n = 0;
    for (const auto& entry : fs::directory_iterator(fs::path(PAOI_SOURCE_DIR) / "configs")) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_config(entry.path()));
        ++n;
    }
    CHECK(n >= 15);
}
