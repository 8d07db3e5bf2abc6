#include "paoi/cli/run.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include "paoi/bounds_mg.hpp"
#include "paoi/exact_mm.hpp"
#include "paoi/infinite.hpp"

namespace paoi::cli {

namespace {

using sim::Discipline;

struct Point {
    std::string param;
    std::optional<double> value;
};

std::vector<Point> sweep_points(const ExperimentConfig& cfg) {
    if (!cfg.sweep) return {Point{}};
    std::vector<Point> pts;
    for (double v : cfg.sweep->grid) pts.push_back({cfg.sweep->parameter, v});
    return pts;
}

std::string fallback_list(const SystemSpec& spec) {
    std::string s = "simulate";
    if (spec.common_service()) s = "bounds or " + s;
    return s;
}

// Exact rows, or an explanation of why there are none.
std::optional<std::vector<PAoIComponents>> exact_route(const SystemSpec& spec, Discipline d, std::string& why) {
    switch (d) {
        case Discipline::FcfsInfinite:
            return infinite::fcfs_paoi(spec);
        case Discipline::LcfsInfinite:
            why = "no exact analysis for lcfs; fallback: bounds or simulate";
            return std::nullopt;
        case Discipline::Buffer1Replace: {
            for (std::size_t i = 0; i < spec.size(); ++i) {
                if (!exact_mm::exact_supported(spec, i)) {
                    std::ostringstream msg;
                    msg << "no exact analysis for buffer1_replace class " << i + 1
                        << " (needs exponential service, k <= " << exact_mm::kMaxClasses
                        << ", classes above 2 need identical rates in the classes above); fallback: "
                        << fallback_list(spec);
                    why = msg.str();
                    return std::nullopt;
                }
            }
            const auto pi = exact_mm::stationary(exact_mm::build_rate_matrix(spec));
            std::vector<PAoIComponents> out;
            for (std::size_t i = 0; i < spec.size(); ++i) out.push_back(exact_mm::paoi_exact(spec, pi, i));
            return out;
        }
    }
    return std::nullopt;
}

std::optional<std::vector<PAoIComponents>> bound_route(const SystemSpec& spec, Discipline d, std::string& why) {
    switch (d) {
        case Discipline::FcfsInfinite:
            why = "fcfs has an exact solution; use exact";
            return std::nullopt;
        case Discipline::LcfsInfinite:
            return infinite::lcfs_paoi_upper_bound(spec);
        case Discipline::Buffer1Replace:
            if (!spec.common_service()) {
                why = "buffer1_replace bound needs one service law shared by all classes; fallback: simulate";
                return std::nullopt;
            }
            return bounds_mg::paoi_upper_bound(spec, bounds_mg::rejection_probs(spec));
    }
    return std::nullopt;
}

void push_analytic(std::vector<ResultRow>& rows, const Point& pt, Discipline d, Method m,
                   const std::vector<PAoIComponents>& comps) {
    for (std::size_t i = 0; i < comps.size(); ++i) {
        ResultRow r;
        r.sweep_param = pt.param;
        r.sweep_value = pt.value;
        r.discipline = d;
        r.cls = i + 1;
        r.method = m;
        r.paoi = comps[i].total;
        r.components = comps[i];
        rows.push_back(r);
    }
}

void push_sim(std::vector<ResultRow>& rows, const Point& pt, Discipline d, const sim::SimEstimate& est) {
    for (std::size_t i = 0; i < est.classes.size(); ++i) {
        ResultRow r;
        r.sweep_param = pt.param;
        r.sweep_value = pt.value;
        r.discipline = d;
        r.cls = i + 1;
        r.method = Method::Sim;
        r.paoi = est.classes[i].paoi_mean;
        r.ci_halfwidth = est.classes[i].ci_halfwidth;
        rows.push_back(r);
    }
}

std::vector<Discipline> disciplines_for(const ExperimentConfig& cfg) {
    if (cfg.disciplines.empty()) throw ValidationError("$.disciplines: missing required field");
    return cfg.disciplines;
}

}  // namespace

RunOutput run(const ExperimentConfig& cfg, Mode mode) {
    if (mode == Mode::Advise) throw ParameterError("use advise() for the advise verb");
    if (cfg.mode && *cfg.mode != mode)
        throw ValidationError("$.mode: config declares '" + std::string(to_string(*cfg.mode)) +
                              "' but the verb is '" + std::string(to_string(mode)) + "'");
    const auto disciplines = disciplines_for(cfg);

    RunOutput out;
    std::ostringstream summary;
    for (const Point& pt : sweep_points(cfg)) {
        const SystemSpec spec = cfg.system_at(pt.value);
        for (Discipline d : disciplines) {
            std::string why;
            const std::size_t first = out.rows.size();
            if (mode == Mode::Exact) {
                auto c = exact_route(spec, d, why);
                if (!c) throw UnsupportedModelError(why);
                push_analytic(out.rows, pt, d, Method::Exact, *c);
            } else if (mode == Mode::Bounds) {
                if (d == Discipline::FcfsInfinite) {
                    push_analytic(out.rows, pt, d, Method::Exact, infinite::fcfs_paoi(spec));
                } else {
                    auto c = bound_route(spec, d, why);
                    if (!c) throw UnsupportedModelError(why);
                    push_analytic(out.rows, pt, d, Method::Bound, *c);
                }
            } else if (mode == Mode::Simulate) {
                push_sim(out.rows, pt, d, sim::simulate(spec, d, cfg.sim));
            } else {  // compare
                if (auto c = exact_route(spec, d, why)) push_analytic(out.rows, pt, d, Method::Exact, *c);
                auto b = bound_route(spec, d, why);
                if (b) push_analytic(out.rows, pt, d, Method::Bound, *b);
                const auto est = sim::simulate(spec, d, cfg.sim);
                push_sim(out.rows, pt, d, est);
                for (std::size_t r = first; r < out.rows.size(); ++r) {
                    auto& row = out.rows[r];
                    if (row.method == Method::Bound) row.bound_minus_sim = row.paoi - est.classes[row.cls - 1].paoi_mean;
                }
            }
            if (pt.value) summary << pt.param << '=' << format_number(*pt.value) << ' ';
            summary << sim::to_string(d) << ':';
            for (std::size_t r = first; r < out.rows.size(); ++r) {
                const auto& row = out.rows[r];
                summary << "  c" << row.cls << ' ' << to_string(row.method) << '=' << format_number(row.paoi);
                if (row.ci_halfwidth) summary << "+-" << format_number(*row.ci_halfwidth);
            }
            summary << '\n';
        }
    }
    out.summary = summary.str();
    return out;
}

AdviceOutput advise(const ExperimentConfig& cfg) {
    if (cfg.mode && *cfg.mode != Mode::Advise)
        throw ValidationError("$.mode: config declares '" + std::string(to_string(*cfg.mode)) +
                              "' but the verb is 'advise'");
    for (Discipline d : cfg.disciplines)
        if (d != Discipline::FcfsInfinite)
            throw UnsupportedModelError("priority advice is only defined for fcfs buffers; got " +
                                        std::string(sim::to_string(d)));

    AdviceOutput out;
    std::ostringstream summary;
    for (const Point& pt : sweep_points(cfg)) {
        const SystemSpec spec = cfg.system_at(pt.value);
        const auto order = infinite::optimal_priority_order(spec);
        AdviceRow given{pt.param, pt.value, "given", {}, infinite::fcfs_average_paoi(spec)};
        for (std::size_t i = 0; i < spec.size(); ++i) given.order.push_back(i + 1);
        AdviceRow rec{pt.param, pt.value, "recommended", {}, infinite::fcfs_average_paoi(spec.reordered(order))};
        for (std::size_t i : order) rec.order.push_back(i + 1);

        if (pt.value) summary << pt.param << '=' << format_number(*pt.value) << ' ';
        summary << "recommended order (";
        for (std::size_t i = 0; i < rec.order.size(); ++i) summary << (i ? "," : "") << rec.order[i];
        summary << ") average PAoI " << format_number(rec.average_paoi) << " vs given "
                << format_number(given.average_paoi) << '\n';
        out.rows.push_back(std::move(given));
        out.rows.push_back(std::move(rec));
    }
    out.summary = summary.str();
    return out;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const UnsupportedModelError*>(&e)) return 2;
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const StabilityError*>(&e)) return 3;
    return 1;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Peak age of information for multi-class priority queues"};
    app.require_subcommand(1);
    std::string config_path, out_path;
    bool quiet = false;
    const std::pair<const char*, const char*> verbs[] = {
        {"exact", "exact PAoI where an exact analysis exists"},
        {"bounds", "upper bounds (exact values where those are cheaper)"},
        {"simulate", "discrete-event simulation with confidence intervals"},
        {"compare", "exact, bound and simulated rows side by side"},
        {"advise", "priority order minimising the FCFS class-average PAoI"},
    };
    for (const auto& [verb, help] : verbs) {
        auto* sub = app.add_subcommand(verb, help);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_path, "CSV output path (overrides the config's output; '-' for stdout)");
        sub->add_flag("--quiet", quiet, "suppress the summary");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    const std::string verb = app.get_subcommands().front()->get_name();

    try {
        const ExperimentConfig cfg = load_config(config_path);
        const Mode mode = *parse_mode(verb);
        std::string target = out_path.empty() ? cfg.output : out_path;
        if (target.empty()) target = "-";

        std::ostringstream csv;
        std::string summary;
        if (mode == Mode::Advise) {
            auto res = advise(cfg);
            write_advice_csv(csv, res.rows);
            summary = std::move(res.summary);
        } else {
            auto res = run(cfg, mode);
            write_csv(csv, res.rows, mode == Mode::Compare);
            summary = std::move(res.summary);
        }

        if (target == "-") {
            std::cout << csv.str();
            if (!quiet) std::cerr << summary;
        } else {
            std::ofstream f(target, std::ios::binary);
            if (!f) throw ValidationError("$.output: cannot write '" + target + "'");
            f << csv.str();
            if (!f) throw ValidationError("$.output: write failed for '" + target + "'");
            if (!quiet) std::cout << summary << "wrote " << target << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        const int rc = exit_code_for(e);
        const char* label = rc == 2 ? "capability error" : rc == 3 ? "numerical error" : "validation error";
        std::cerr << "paoi: " << label << ": " << e.what() << '\n';
        return rc;
    }
}

}  // namespace paoi::cli
